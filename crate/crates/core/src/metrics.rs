//! Metrics of spherical cells: areas, inradii, circumradii, and the density
//! expressions attached to caps inscribed in triangles and lunes.
//!
//! Everything here works on convex cells contained in an open hemisphere,
//! which is exactly the shape of a cell cut out by great circles that do not
//! all pass through one point.  The central subtlety is that the largest cap
//! contained in a spherical triangle is *not* always the cap touching all
//! three sides: for "thin" triangles the optimum touches only the two long
//! sides and coincides with the largest cap of a lune spanned by them.

use crate::geom::{
    add3, deepest_point, scale3, sdist, triangle_metrics, GeomError, SphericalCap, UnitVector,
};
use crate::nd;
use crate::tol::Tolerances;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Two constraints are considered tight at the optimum when their slacks
/// differ by at most this much (used to classify inscribed vs lune mode).
const ACTIVE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    /// Vertex list fails one of the polygon invariants; the payload names
    /// the violated invariant.
    InvalidPolygon(&'static str),
    /// Lune parameters are inconsistent.
    InvalidLune(&'static str),
    /// Side lengths do not form a spherical triangle.
    InvalidSides,
    /// Scalar argument outside the domain of the formula.
    OutOfDomain,
    /// The two caps overlap where disjoint caps are required.
    OverlappingCaps,
    /// The configuration is not contained in any open hemisphere.
    NoCommonHemisphere,
    /// Caps that must be congruent have different radii.
    MixedRadii,
    Geom(GeomError),
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::InvalidPolygon(why) => write!(f, "invalid spherical polygon: {why}"),
            MetricsError::InvalidLune(why) => write!(f, "invalid lune: {why}"),
            MetricsError::InvalidSides => write!(f, "side lengths do not form a spherical triangle"),
            MetricsError::OutOfDomain => write!(f, "argument outside the formula's domain"),
            MetricsError::OverlappingCaps => write!(f, "caps overlap"),
            MetricsError::NoCommonHemisphere => {
                write!(f, "configuration spans more than an open hemisphere")
            }
            MetricsError::MixedRadii => write!(f, "caps are not congruent"),
            MetricsError::Geom(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MetricsError {}

impl From<GeomError> for MetricsError {
    fn from(e: GeomError) -> Self {
        MetricsError::Geom(e)
    }
}

/// Convex spherical polygon, vertices in counterclockwise order as seen
/// from outside the sphere, contained in an open hemisphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPolygon {
    vertices: Vec<UnitVector>,
}

impl SphericalPolygon {
    pub fn new(vertices: Vec<UnitVector>, tol: &Tolerances) -> Result<Self, MetricsError> {
        if vertices.len() < 3 {
            return Err(MetricsError::InvalidPolygon("fewer than three vertices"));
        }
        let s = vertices.len();
        for i in 0..s {
            let d = sdist(vertices[i], vertices[(i + 1) % s]);
            if d < tol.eps_angle {
                return Err(MetricsError::InvalidPolygon("consecutive vertices coincide"));
            }
            if d > PI - tol.eps_angle {
                return Err(MetricsError::InvalidPolygon(
                    "consecutive vertices are antipodal",
                ));
            }
        }
        let (_, depth) = deepest_point(&vertices).expect("vertex list is nonempty");
        if depth <= tol.eps_angle {
            return Err(MetricsError::InvalidPolygon(
                "not contained in an open hemisphere",
            ));
        }
        let poly = SphericalPolygon { vertices };
        for n in poly.edge_poles() {
            for &v in &poly.vertices {
                if n.dot(v) < -tol.eps_angle {
                    return Err(MetricsError::InvalidPolygon(
                        "not convex in counterclockwise order",
                    ));
                }
            }
        }
        for ang in poly.interior_angles() {
            if ang < tol.eps_angle || ang > PI - tol.eps_angle {
                return Err(MetricsError::InvalidPolygon(
                    "interior angle outside (0, pi)",
                ));
            }
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[UnitVector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Inward unit poles of the side great circles.  Counterclockwise vertex
    /// order puts the interior on the positive side of every `v_i x v_{i+1}`.
    pub fn edge_poles(&self) -> Vec<UnitVector> {
        let s = self.vertices.len();
        (0..s)
            .map(|i| {
                UnitVector::from_array(self.vertices[i].cross_raw(self.vertices[(i + 1) % s]))
                    .expect("consecutive vertices are distinct and non-antipodal")
            })
            .collect()
    }

    fn interior_angles(&self) -> Vec<f64> {
        let s = self.vertices.len();
        (0..s)
            .map(|i| {
                let v = self.vertices[i];
                let tp = v
                    .tangent_toward(self.vertices[(i + s - 1) % s])
                    .expect("consecutive vertices are distinct and non-antipodal");
                let tn = v
                    .tangent_toward(self.vertices[(i + 1) % s])
                    .expect("consecutive vertices are distinct and non-antipodal");
                tp.dot(tn).clamp(-1.0, 1.0).acos()
            })
            .collect()
    }
}

/// Lune (digon): the region between two half great circles meeting at
/// `vertex` and its antipode, symmetric about `bisector_direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lune {
    vertex: UnitVector,
    angle: f64,
    bisector_direction: UnitVector,
}

impl Lune {
    pub fn new(
        vertex: UnitVector,
        angle: f64,
        bisector_direction: UnitVector,
        tol: &Tolerances,
    ) -> Result<Self, MetricsError> {
        if !(angle > 0.0 && angle < PI) {
            return Err(MetricsError::InvalidLune("angle outside (0, pi)"));
        }
        if vertex.dot(bisector_direction).abs() > tol.eps_angle {
            return Err(MetricsError::InvalidLune("bisector not orthogonal to vertex"));
        }
        Ok(Lune { vertex, angle, bisector_direction })
    }

    pub fn vertex(&self) -> UnitVector {
        self.vertex
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn bisector_direction(&self) -> UnitVector {
        self.bisector_direction
    }

    /// Radius of the largest cap inside the lune: half the lune angle.
    pub fn inradius(&self) -> f64 {
        self.angle / 2.0
    }

    /// Center of the largest inscribed cap: the midpoint of the bisector
    /// arc, a quarter turn from the vertex.
    pub fn incenter(&self) -> UnitVector {
        self.bisector_direction
    }

    pub fn area(&self) -> f64 {
        2.0 * self.angle
    }

    /// Inward poles of the two bounding great circles.
    pub fn side_poles(&self) -> (UnitVector, UnitVector) {
        let w = UnitVector::from_array(self.vertex.cross_raw(self.bisector_direction))
            .expect("vertex and bisector are orthogonal");
        let (s, c) = ((self.angle / 2.0).sin(), (self.angle / 2.0).cos());
        let b = self.bisector_direction.as_array();
        let n1 = UnitVector::from_array(add3(scale3(b, s), scale3(w.as_array(), c)))
            .expect("pole combination is unit");
        let n2 = UnitVector::from_array(add3(scale3(b, s), scale3(w.as_array(), -c)))
            .expect("pole combination is unit");
        (n1, n2)
    }

    pub fn contains(&self, p: UnitVector, eps: f64) -> bool {
        let (n1, n2) = self.side_poles();
        p.dot(n1) >= -eps && p.dot(n2) >= -eps
    }
}

/// How the largest contained cap of a cell touches the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InradiusMode {
    /// Touches at least three sides: the classical inscribed cap.
    Inscribed,
    /// Touches only two sides: the cap is the largest cap of a lune (or
    /// strip) spanned by those sides.
    Lune,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InradiusResult {
    pub radius: f64,
    pub center: UnitVector,
    pub mode: InradiusMode,
}

/// Area by angle excess: sum of interior angles minus `(s - 2) pi`.
pub fn polygon_area(p: &SphericalPolygon) -> f64 {
    let s = p.vertices.len() as f64;
    p.interior_angles().iter().sum::<f64>() - (s - 2.0) * PI
}

/// Radius of the cap touching all three sides of the triangle with the
/// given side lengths: `tan r = sqrt(sin(P-A) sin(P-B) sin(P-C) / sin P)`
/// with `P` the half perimeter.
pub fn inscribed_radius_triangle(
    a: f64,
    b: f64,
    c: f64,
    tol: &Tolerances,
) -> Result<f64, MetricsError> {
    let eps = tol.eps_angle;
    for s in [a, b, c] {
        if !s.is_finite() || s < eps || s > PI - eps {
            return Err(MetricsError::InvalidSides);
        }
    }
    let per = a + b + c;
    if per > 2.0 * PI - eps
        || a + b <= c + eps
        || b + c <= a + eps
        || c + a <= b + eps
    {
        return Err(MetricsError::InvalidSides);
    }
    let p = per / 2.0;
    let num = (p - a).sin() * (p - b).sin() * (p - c).sin();
    let den = p.sin();
    if num <= 0.0 || den <= 0.0 {
        return Err(MetricsError::InvalidSides);
    }
    Ok((num / den).sqrt().atan())
}

/// Largest cap contained in the triangle `(a, b, c)`.
///
/// With the sides sorted `a <= b <= c`, the optimum touches only the two
/// longer sides exactly when `b + c - a > pi`; the cap is then the largest
/// cap of the lune at the vertex facing side `a`, of radius half the
/// smallest angle.  Otherwise it is the inscribed cap.  The boundary case
/// `b + c - a = pi`, where both descriptions coincide, is routed to the
/// inscribed branch.
pub fn triangle_inradius(
    a: UnitVector,
    b: UnitVector,
    c: UnitVector,
    tol: &Tolerances,
) -> Result<InradiusResult, MetricsError> {
    // Orient counterclockwise so that edge poles point inward.
    let det = crate::geom::dot3(a.cross_raw(b), c.as_array());
    let verts = if det >= 0.0 { [a, b, c] } else { [a, c, b] };
    let m = triangle_metrics(verts[0], verts[1], verts[2], tol)?;

    let mut i0 = 0;
    for i in 1..3 {
        if m.sides[i] < m.sides[i0] {
            i0 = i;
        }
    }
    let lune_excess = m.sides[0] + m.sides[1] + m.sides[2] - 2.0 * m.sides[i0];
    if lune_excess > PI + tol.eps_angle {
        // Largest cap of the lune at the vertex facing the shortest side.
        let v = verts[i0];
        let tp = v.tangent_toward(verts[(i0 + 2) % 3])?;
        let tn = v.tangent_toward(verts[(i0 + 1) % 3])?;
        let center = UnitVector::from_array(add3(tp.as_array(), tn.as_array()))
            .map_err(|_| MetricsError::Geom(GeomError::DegenerateTriangle))?;
        return Ok(InradiusResult {
            radius: m.angles[i0] / 2.0,
            center,
            mode: InradiusMode::Lune,
        });
    }

    let radius = inscribed_radius_triangle(m.sides[0], m.sides[1], m.sides[2], tol)?;
    // Incenter: the point with equal positive dot against all three inward
    // side poles.
    let poles: Vec<UnitVector> = (0..3)
        .map(|i| {
            UnitVector::from_array(verts[i].cross_raw(verts[(i + 1) % 3]))
                .map_err(|_| MetricsError::Geom(GeomError::DegenerateTriangle))
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<f64>> = poles.iter().map(|p| p.as_array().to_vec()).collect();
    let sol = nd::solve(rows, vec![1.0, 1.0, 1.0])
        .ok_or(MetricsError::Geom(GeomError::DegenerateTriangle))?;
    let mut center = UnitVector::normalized(sol[0], sol[1], sol[2])?;
    if center.dot(poles[0]) < 0.0 {
        center = center.antipode();
    }
    Ok(InradiusResult { radius, center, mode: InradiusMode::Inscribed })
}

/// Largest cap contained in a convex polygon, by exact max-min optimization
/// over the inward side poles: maximize the smallest signed distance to the
/// sides.  The optimizer of `max min_i <x, n_i>` is the equalizer of at most
/// three active poles, so enumerating singletons, pairs and triples is exact.
pub fn inradius_polygon(p: &SphericalPolygon) -> InradiusResult {
    let poles = p.edge_poles();
    let (center, depth) = deepest_point(&poles).expect("polygon has at least three sides");
    let radius = depth.clamp(-1.0, 1.0).asin();
    let active = poles
        .iter()
        .filter(|n| n.dot(center) <= depth + ACTIVE_EPS)
        .count();
    let mode = if active >= 3 { InradiusMode::Inscribed } else { InradiusMode::Lune };
    InradiusResult { radius, center, mode }
}

/// Smallest cap containing every point of the set.  Requires the set to lie
/// in an open hemisphere, where caps of radius below `pi/2` behave as convex
/// ranges and the randomized incremental algorithm applies.
pub fn min_enclosing_cap(
    points: &[UnitVector],
    tol: &Tolerances,
) -> Result<SphericalCap, MetricsError> {
    if points.is_empty() {
        return Err(MetricsError::OutOfDomain);
    }
    let (_, depth) = deepest_point(points).expect("point list is nonempty");
    if depth <= tol.eps_angle {
        return Err(MetricsError::NoCommonHemisphere);
    }
    let pts: Vec<Vec<f64>> = points.iter().map(|p| p.as_array().to_vec()).collect();
    let (c, cos_r) = nd::min_enclosing_cap_nd(&pts).expect("point list is nonempty");
    let center = UnitVector::normalized(c[0], c[1], c[2])?;
    let radius = cos_r.clamp(-1.0, 1.0).acos().min(FRAC_PI_2);
    SphericalCap::new(center, radius).map_err(MetricsError::Geom)
}

/// Smallest cap containing the polygon.  Caps of radius at most `pi/2` are
/// spherically convex, so covering the vertices covers the polygon.
pub fn circumradius_polygon(p: &SphericalPolygon, tol: &Tolerances) -> SphericalCap {
    min_enclosing_cap(&p.vertices, tol).expect("polygon lies in an open hemisphere")
}

/// Area of the regular `k`-gon circumscribed about a cap of radius `r`:
/// `2k arccos(cos r sin(pi/k)) - (k-2) pi`.  Defined for real `k >= 2` so
/// that convexity in `k` makes sense; at `k = 2` it degenerates to the lune
/// of angle `2r`.
pub fn dowker_area_circumscribed(r: f64, k: f64) -> Result<f64, MetricsError> {
    if !r.is_finite() || !k.is_finite() || r <= 0.0 || r >= FRAC_PI_2 || k < 2.0 {
        return Err(MetricsError::OutOfDomain);
    }
    Ok(2.0 * k * (r.cos() * (PI / k).sin()).acos() - (k - 2.0) * PI)
}

/// Area of the regular `s`-gon inscribed in a cap of radius `big_r`,
/// assembled from `2s` copies of the half apex triangle (cap center, one
/// vertex, adjacent side midpoint).
pub fn dowker_area_inscribed(
    big_r: f64,
    s: u32,
    tol: &Tolerances,
) -> Result<f64, MetricsError> {
    if !big_r.is_finite() || big_r <= 0.0 || big_r >= FRAC_PI_2 || s < 3 {
        return Err(MetricsError::OutOfDomain);
    }
    let apex = UnitVector::new(0.0, 0.0, 1.0).expect("north pole is unit");
    let v0 = UnitVector::sph(big_r, 0.0);
    let v1 = UnitVector::sph(big_r, 2.0 * PI / s as f64);
    let mid = UnitVector::from_array(add3(v0.as_array(), v1.as_array()))?;
    let t = triangle_metrics(apex, v0, mid, tol)?;
    Ok(2.0 * s as f64 * t.area)
}

/// Density of a cap of radius `rho` relative to an isosceles triangle with
/// base `a` and legs `b`: `2 alpha (1 - cos rho) / (2 alpha + beta - pi)`,
/// where `alpha` is the base angle and `beta` the apex angle.
///
/// The angles come from the right-triangle relations obtained by splitting
/// along the apex altitude: `cos alpha = tan(a/2) / tan b` and
/// `cot(beta/2) = cos b tan alpha`.
pub fn isosceles_density(a: f64, b: f64, rho: f64) -> Result<f64, MetricsError> {
    if !a.is_finite() || !b.is_finite() || !rho.is_finite() {
        return Err(MetricsError::OutOfDomain);
    }
    if rho < 0.0 || a < 2.0 * rho || a >= PI || b <= a / 2.0 || b >= FRAC_PI_2 {
        return Err(MetricsError::OutOfDomain);
    }
    let alpha = ((a / 2.0).tan() / b.tan()).clamp(-1.0, 1.0).acos();
    let beta = 2.0 * (1.0 / (b.cos() * alpha.tan())).atan();
    let excess = 2.0 * alpha + beta - PI;
    if excess <= 0.0 {
        return Err(MetricsError::OutOfDomain);
    }
    Ok(2.0 * alpha * (1.0 - rho.cos()) / excess)
}

/// Inradius of the isosceles triangle with sides `pi/2`, `pi/2`, `phi`
/// (half of a lune of angle `phi` split along the perpendicular bisector):
/// `arctan(sin(phi/2))`.
pub fn lune_inradius_isosceles(phi: f64) -> Result<f64, MetricsError> {
    if !phi.is_finite() || phi <= 0.0 || phi >= PI {
        return Err(MetricsError::OutOfDomain);
    }
    Ok((phi / 2.0).sin().atan())
}

/// Angle of the smallest lune containing two disjoint congruent caps.
///
/// Both bounding circles support both caps on the same side; with center
/// distance `t` and cap radius `rho` the angle is
/// `2 arcsin(sin rho / cos(t/2))`, strictly increasing in `t`.  Touching
/// caps give `2 arcsin(tan rho)`.
pub fn lune_thickness_two_caps(
    c1: &SphericalCap,
    c2: &SphericalCap,
    tol: &Tolerances,
) -> Result<f64, MetricsError> {
    let rho = c1.radius();
    if (c2.radius() - rho).abs() > tol.eps_angle {
        return Err(MetricsError::MixedRadii);
    }
    let t = sdist(c1.center(), c2.center());
    if t < 2.0 * rho - tol.eps_angle {
        return Err(MetricsError::OverlappingCaps);
    }
    if t + 2.0 * rho >= PI - tol.eps_angle {
        return Err(MetricsError::NoCommonHemisphere);
    }
    let p = rho.sin() / (t / 2.0).cos();
    Ok(2.0 * p.clamp(-1.0, 1.0).asin())
}

/// Interior angles and area of a simple closed geodesic walk.
///
/// Measures the region to the *left* of the direction of travel, so a
/// counterclockwise walk of a cell (as seen from outside the sphere) yields
/// the cell itself and a clockwise walk yields its complement.  Unlike
/// [`SphericalPolygon`] the region need not be convex: reflex vertices get
/// interior angles above `pi`.  The area is `2 pi` minus the sum of turning
/// angles, exact for every simple closed walk.  Straight (angle `pi`)
/// vertices are accepted; cusps are rejected.
pub fn walk_metrics(
    vertices: &[UnitVector],
    tol: &Tolerances,
) -> Result<(Vec<f64>, f64), MetricsError> {
    let s = vertices.len();
    if s < 3 {
        return Err(MetricsError::InvalidPolygon("fewer than three vertices"));
    }
    for i in 0..s {
        let d = sdist(vertices[i], vertices[(i + 1) % s]);
        if d < tol.eps_angle || d > PI - tol.eps_angle {
            return Err(MetricsError::InvalidPolygon(
                "walk side degenerate or antipodal",
            ));
        }
    }
    let mut angles = Vec::with_capacity(s);
    let mut turn_sum = 0.0;
    for i in 0..s {
        let v = vertices[i];
        let prev = vertices[(i + s - 1) % s];
        let next = vertices[(i + 1) % s];
        let arrive = v.tangent_toward(prev)?.antipode();
        let depart = v.tangent_toward(next)?;
        let turn = crate::geom::dot3(arrive.cross_raw(depart), v.as_array())
            .atan2(arrive.dot(depart));
        if turn.abs() > PI - tol.eps_angle {
            return Err(MetricsError::InvalidPolygon("cusp in walk"));
        }
        angles.push(PI - turn);
        turn_sum += turn;
    }
    let area = 2.0 * PI - turn_sum;
    if area <= tol.eps_area {
        return Err(MetricsError::InvalidPolygon("walk bounds no area"));
    }
    Ok((angles, area))
}
