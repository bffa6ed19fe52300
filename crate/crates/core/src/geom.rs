//! Spherical geometry primitives on the unit sphere in `R^3`.
//!
//! Conventions: all angles and distances are radians, all points are unit
//! vectors, and a great circle is stored by an unoriented pole (the pole and
//! its antipode describe the same circle, so poles are canonicalized to have
//! their first nonzero coordinate positive).

use core::fmt;

use crate::tol::{Tolerances, EPS_UNIT};

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Raw 3-vector; not necessarily unit length.
pub type Vec3 = [f64; 3];

#[inline]
pub fn dot3(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn add3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub3(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale3(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn norm3(a: Vec3) -> f64 {
    dot3(a, a).sqrt()
}

/// Errors raised by the geometric primitives.
#[derive(Debug, Clone, PartialEq)]
pub enum GeomError {
    /// A vector that should be unit length is not, or cannot be normalized.
    NotUnit { norm: f64 },
    /// Normalization of an (almost) zero vector was requested.
    ZeroVector,
    /// Two great circles that must be distinct coincide within tolerance.
    CoincidentCircles,
    /// Triangle vertices lie on a common great circle or coincide.
    DegenerateTriangle,
    /// Point set is concyclic-degenerate: fewer than three distinct points,
    /// points on a common great circle, or not concyclic at all.
    DegeneratePoints,
    /// Cap radius outside `[0, pi/2]`.
    CapRadiusOutOfRange { radius: f64 },
}

impl fmt::Display for GeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeomError::NotUnit { norm } => write!(f, "vector norm {norm} is not 1"),
            GeomError::ZeroVector => write!(f, "cannot normalize a zero vector"),
            GeomError::CoincidentCircles => write!(f, "great circles coincide"),
            GeomError::DegenerateTriangle => write!(f, "triangle vertices are degenerate"),
            GeomError::DegeneratePoints => write!(f, "point set is degenerate for a circumcap"),
            GeomError::CapRadiusOutOfRange { radius } => {
                write!(f, "cap radius {radius} outside [0, pi/2]")
            }
        }
    }
}

impl core::error::Error for GeomError {}

/// A point on the unit sphere (equivalently a unit direction in `R^3`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVector {
    /// Accepts coordinates that are already unit length within `eps_unit`.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeomError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if (norm - 1.0).abs() > EPS_UNIT {
            return Err(GeomError::NotUnit { norm });
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes arbitrary coordinates onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self, GeomError> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-14 {
            return Err(GeomError::ZeroVector);
        }
        Ok(Self { x: x / norm, y: y / norm, z: z / norm })
    }

    pub fn from_array(v: Vec3) -> Result<Self, GeomError> {
        Self::normalized(v[0], v[1], v[2])
    }

    /// Point at colatitude `theta` from the north pole `(0,0,1)` and azimuth
    /// `phi` measured from the `x` axis.
    pub fn sph(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    #[inline]
    pub fn as_array(self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Cross product; the result is generally not unit length.
    #[inline]
    pub fn cross_raw(self, other: Self) -> Vec3 {
        cross3(self.as_array(), other.as_array())
    }

    #[inline]
    pub fn antipode(self) -> Self {
        Self { x: -self.x, y: -self.y, z: -self.z }
    }

    /// True when the two points are within `eps` radians of each other.
    pub fn approx_eq(self, other: Self, eps: f64) -> bool {
        sdist(self, other) <= eps
    }

    /// Unit tangent vector at `self` pointing along the geodesic toward
    /// `other`.  Fails when the points coincide or are antipodal.
    pub fn tangent_toward(self, other: Self) -> Result<UnitVector, GeomError> {
        let t = sub3(other.as_array(), scale3(self.as_array(), self.dot(other)));
        UnitVector::from_array(t).map_err(|_| GeomError::DegeneratePoints)
    }

    /// Walks distance `dist` from `self` along the unit tangent `dir`
    /// (which must be orthogonal to `self`).
    pub fn geodesic_point(self, dir: UnitVector, dist: f64) -> UnitVector {
        let v = add3(
            scale3(self.as_array(), dist.cos()),
            scale3(dir.as_array(), dist.sin()),
        );
        // dir orthogonal to self keeps v unit up to roundoff.
        UnitVector::from_array(v).expect("geodesic point normalizes")
    }
}

/// Spherical (angular) distance between two points, in `[0, pi]`.
///
/// Computed as `atan2(|a x b|, <a, b>)` rather than `arccos(<a, b>)`: the
/// arccosine form loses half the significant digits near coincident or
/// antipodal points, which matters when distances feed merge thresholds.
#[inline]
pub fn sdist(a: UnitVector, b: UnitVector) -> f64 {
    norm3(cross3(a.as_array(), b.as_array())).atan2(a.dot(b))
}

/// An unoriented great circle, stored by a canonical pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreatCircle {
    pole: UnitVector,
}

impl GreatCircle {
    /// Canonicalizes the pole sign: first nonzero coordinate positive.
    pub fn new(pole: UnitVector) -> Self {
        let coords = pole.as_array();
        for c in coords {
            if c.abs() > 1e-15 {
                if c < 0.0 {
                    return Self { pole: pole.antipode() };
                }
                break;
            }
        }
        Self { pole }
    }

    /// Great circle through two non-antipodal, distinct points.
    pub fn through(a: UnitVector, b: UnitVector) -> Result<Self, GeomError> {
        let pole = UnitVector::from_array(a.cross_raw(b))
            .map_err(|_| GeomError::DegeneratePoints)?;
        Ok(Self::new(pole))
    }

    #[inline]
    pub fn pole(&self) -> UnitVector {
        self.pole
    }

    /// True when the circles are the same within `eps_angle` on the pole axis.
    pub fn coincident_with(&self, other: &GreatCircle, tol: &Tolerances) -> bool {
        norm3(self.pole.cross_raw(other.pole)) < tol.eps_angle.sin().max(tol.eps_angle * 0.5)
    }

    /// Orthonormal frame `(u, w)` of the circle plane with `u x w = pole`,
    /// so that `point_at(t) = u cos t + w sin t` runs counterclockwise
    /// around the pole.
    pub fn basis(&self) -> (UnitVector, UnitVector) {
        let p = self.pole.as_array();
        // Pick the coordinate axis least aligned with the pole.
        let axis = if p[0].abs() <= p[1].abs() && p[0].abs() <= p[2].abs() {
            [1.0, 0.0, 0.0]
        } else if p[1].abs() <= p[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let u = UnitVector::from_array(cross3(axis, p)).expect("axis not parallel to pole");
        let w = UnitVector::from_array(cross3(p, u.as_array())).expect("unit frame");
        (u, w)
    }

    /// Point of the circle at parameter `t` relative to [`GreatCircle::basis`].
    pub fn point_at(&self, t: f64) -> UnitVector {
        let (u, w) = self.basis();
        UnitVector::from_array(add3(
            scale3(u.as_array(), t.cos()),
            scale3(w.as_array(), t.sin()),
        ))
        .expect("circle point normalizes")
    }

    /// Parameter of (the projection of) `p` relative to [`GreatCircle::basis`].
    pub fn angle_of(&self, p: UnitVector) -> f64 {
        let (u, w) = self.basis();
        p.dot(w).atan2(p.dot(u))
    }
}

/// Distance from a point to a great circle: `arcsin(|<p, pole>|)`.
#[inline]
pub fn circle_distance(p: UnitVector, g: &GreatCircle) -> f64 {
    p.dot(g.pole()).abs().clamp(0.0, 1.0).asin()
}

/// Both intersection points of two distinct great circles (an antipodal
/// pair).
pub fn intersect_circles(
    a: &GreatCircle,
    b: &GreatCircle,
    tol: &Tolerances,
) -> Result<(UnitVector, UnitVector), GeomError> {
    if a.coincident_with(b, tol) {
        return Err(GeomError::CoincidentCircles);
    }
    let v = UnitVector::from_array(a.pole().cross_raw(b.pole()))
        .map_err(|_| GeomError::CoincidentCircles)?;
    Ok((v, v.antipode()))
}

/// A spherical cap: all points within `radius` of `center`.
///
/// Radii are restricted to `[0, pi/2]`; a radius-zero cap is a point and a
/// radius `pi/2` cap is a closed hemisphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCap {
    center: UnitVector,
    radius: f64,
}

impl SphericalCap {
    pub fn new(center: UnitVector, radius: f64) -> Result<Self, GeomError> {
        if !(0.0..=core::f64::consts::FRAC_PI_2).contains(&radius) {
            return Err(GeomError::CapRadiusOutOfRange { radius });
        }
        Ok(Self { center, radius })
    }

    #[inline]
    pub fn center(&self) -> UnitVector {
        self.center
    }

    #[inline]
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Closed containment test with `eps` slack in radians.
    pub fn contains(&self, p: UnitVector, eps: f64) -> bool {
        sdist(self.center, p) <= self.radius + eps
    }

    /// Area of the cap, `2 pi (1 - cos radius)`.
    pub fn area(&self) -> f64 {
        2.0 * core::f64::consts::PI * (1.0 - self.radius.cos())
    }
}

/// Side lengths, interior angles, and area of a spherical triangle.
///
/// `sides[i]` is the side opposite vertex `i` and `angles[i]` the interior
/// angle at vertex `i`; the area is the spherical excess
/// `angles[0] + angles[1] + angles[2] - pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleMetrics {
    pub sides: [f64; 3],
    pub angles: [f64; 3],
    pub area: f64,
}

/// Metrics of the triangle `(a, b, c)`.
///
/// Angles come from the spherical law of cosines,
/// `cos A = (cos a - cos b cos c) / (sin b sin c)`, with operands clamped
/// into `[-1, 1]`.  Vertices on a common great circle within `eps_angle`
/// are rejected as degenerate.
pub fn triangle_metrics(
    a: UnitVector,
    b: UnitVector,
    c: UnitVector,
    tol: &Tolerances,
) -> Result<TriangleMetrics, GeomError> {
    let sides = [sdist(b, c), sdist(c, a), sdist(a, b)];
    for s in sides {
        if s < tol.eps_angle || s > core::f64::consts::PI - tol.eps_angle {
            return Err(GeomError::DegenerateTriangle);
        }
    }
    // Height of each vertex over the opposite side's great circle.
    let n = cross3(a.as_array(), b.as_array());
    let h = dot3(n, c.as_array()).abs() / norm3(n);
    if h < tol.eps_angle {
        return Err(GeomError::DegenerateTriangle);
    }
    let angle = |opp: f64, s1: f64, s2: f64| -> f64 {
        let v = (opp.cos() - s1.cos() * s2.cos()) / (s1.sin() * s2.sin());
        v.clamp(-1.0, 1.0).acos()
    };
    let angles = [
        angle(sides[0], sides[1], sides[2]),
        angle(sides[1], sides[2], sides[0]),
        angle(sides[2], sides[0], sides[1]),
    ];
    let area = angles[0] + angles[1] + angles[2] - core::f64::consts::PI;
    Ok(TriangleMetrics { sides, angles, area })
}

/// Smallest cap whose boundary passes through all given points.
///
/// The points must be concyclic within `eps_angle` (guaranteed for three
/// points in general position).  Fails for fewer than three distinct points
/// or for points on a common great circle, where the side of the cap is
/// ambiguous.
pub fn circumcap(points: &[UnitVector], tol: &Tolerances) -> Result<SphericalCap, GeomError> {
    let mut distinct: alloc::vec::Vec<UnitVector> = alloc::vec::Vec::new();
    for &p in points {
        if !distinct.iter().any(|q| q.approx_eq(p, 1e-12)) {
            distinct.push(p);
        }
    }
    if distinct.len() < 3 {
        return Err(GeomError::DegeneratePoints);
    }
    // Most robust plane normal over triples with the first point fixed.
    let a = distinct[0].as_array();
    let mut best = [0.0; 3];
    let mut best_norm = 0.0;
    for i in 1..distinct.len() {
        for j in (i + 1)..distinct.len() {
            let n = cross3(
                sub3(distinct[i].as_array(), a),
                sub3(distinct[j].as_array(), a),
            );
            let nn = norm3(n);
            if nn > best_norm {
                best_norm = nn;
                best = n;
            }
        }
    }
    if best_norm < 1e-12 {
        return Err(GeomError::DegeneratePoints);
    }
    let mut n = scale3(best, 1.0 / best_norm);
    let mut h = dot3(n, a);
    if h < 0.0 {
        n = scale3(n, -1.0);
        h = -h;
    }
    if h < 1e-12 {
        // Plane through the origin: the points lie on a great circle.
        return Err(GeomError::DegeneratePoints);
    }
    for p in &distinct {
        if (dot3(n, p.as_array()) - h).abs() > tol.eps_angle {
            return Err(GeomError::DegeneratePoints);
        }
    }
    let center = UnitVector::from_array(n).expect("normal is unit");
    SphericalCap::new(center, h.clamp(-1.0, 1.0).acos())
}

/// Maximizes `min_i <u, dirs[i]>` over unit vectors `u`.
///
/// Returns the maximizer and the attained value.  The optimum of this
/// concave program is pinned by at most three active directions, so exact
/// enumeration of the candidate supports (singletons, bisector pairs, and
/// equalizing triples) solves it to roundoff.  `None` only for an empty
/// input.
///
/// Geometric readings: over the inward side poles of a convex cell this
/// yields the incenter (the value is the sine of the inradius); over a
/// point set it yields the center of the smallest enclosing cap (the value
/// is the cosine of its radius).
pub fn deepest_point(dirs: &[UnitVector]) -> Option<(UnitVector, f64)> {
    if dirs.is_empty() {
        return None;
    }
    let eval = |u: UnitVector| -> f64 {
        dirs.iter().map(|d| u.dot(*d)).fold(f64::INFINITY, f64::min)
    };
    let mut best: Option<(UnitVector, f64)> = None;
    let mut consider = |u: UnitVector| {
        let v = eval(u);
        if best.map_or(true, |(_, bv)| v > bv) {
            best = Some((u, v));
        }
    };
    let m = dirs.len();
    for i in 0..m {
        consider(dirs[i]);
        for j in (i + 1)..m {
            if let Ok(u) =
                UnitVector::from_array(add3(dirs[i].as_array(), dirs[j].as_array()))
            {
                consider(u);
            }
            for k in (j + 1)..m {
                let t = cross3(
                    sub3(dirs[i].as_array(), dirs[j].as_array()),
                    sub3(dirs[j].as_array(), dirs[k].as_array()),
                );
                if let Ok(u) = UnitVector::from_array(t) {
                    consider(u);
                    consider(u.antipode());
                }
            }
        }
    }
    best
}
