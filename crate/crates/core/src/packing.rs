//! Totally separable cap packings: verification (witness-based and
//! search-based), packing density, the closed-form radius bounds, the named
//! optimal configurations, the lune-grid construction, and saturation.
//!
//! A packing of congruent caps is *totally separable* (TS) when every two
//! caps are separated by some great circle that avoids the interiors of all
//! caps in the family.  A [`SeparationWitness`] records such a circle
//! family together with a pair assignment; verification either checks a
//! supplied witness or assembles one by an exact separator search.

use crate::arrangement::{build_tiling, cell_metrics, ArrangementError};
use crate::geom::{sdist, GeomError, GreatCircle, SphericalCap, UnitVector};
use crate::molnar::saturation_radius;
use crate::tol::Tolerances;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Cap-count ceiling for the witness-free separator search.  The search
/// itself is polynomial, but completeness rests on an equalizer-enumeration
/// argument that is independently cross-checked only at desk scale, so
/// larger families must supply a witness.
pub const MAX_EXHAUSTIVE_CAPS: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub enum PackingError {
    /// Caps that must be congruent have different radii.
    MixedRadii,
    /// No great circle separates the requested pair while avoiding every
    /// cap interior.
    Infeasible,
    /// Cap count above [`MAX_EXHAUSTIVE_CAPS`] without a witness.
    TooManyCaps,
    UnknownName(String),
    /// Scalar argument or index outside the operation's domain.
    OutOfDomain,
    /// Saturation would break separability; the payload lists the
    /// offending cap indices.
    CannotSaturate(Vec<usize>),
    Geom(GeomError),
    Arrangement(ArrangementError),
}

impl fmt::Display for PackingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PackingError::MixedRadii => write!(f, "caps are not congruent"),
            PackingError::Infeasible => {
                write!(f, "no admissible great circle separates the pair")
            }
            PackingError::TooManyCaps => write!(
                f,
                "more than {MAX_EXHAUSTIVE_CAPS} caps; separator search needs a witness"
            ),
            PackingError::UnknownName(name) => write!(f, "unknown packing name: {name}"),
            PackingError::OutOfDomain => write!(f, "argument outside the operation's domain"),
            PackingError::CannotSaturate(caps) => {
                write!(f, "saturation breaks separability at caps {caps:?}")
            }
            PackingError::Geom(e) => write!(f, "{e}"),
            PackingError::Arrangement(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PackingError {}

impl From<GeomError> for PackingError {
    fn from(e: GeomError) -> Self {
        PackingError::Geom(e)
    }
}

impl From<ArrangementError> for PackingError {
    fn from(e: ArrangementError) -> Self {
        PackingError::Arrangement(e)
    }
}

/// A family of congruent spherical caps (disjointness is a verification
/// result, not a construction invariant, so overlapping families can be
/// built and then reported).
#[derive(Debug, Clone, PartialEq)]
pub struct CapPacking {
    radius: f64,
    centers: Vec<UnitVector>,
}

impl CapPacking {
    pub fn new(centers: Vec<UnitVector>, radius: f64) -> Result<Self, PackingError> {
        if !(0.0..=FRAC_PI_2).contains(&radius) {
            return Err(PackingError::OutOfDomain);
        }
        Ok(CapPacking { radius, centers })
    }

    /// Builds from explicit caps; all radii must agree within `eps_angle`.
    pub fn from_caps(caps: &[SphericalCap], tol: &Tolerances) -> Result<Self, PackingError> {
        let Some(first) = caps.first() else {
            return Err(PackingError::OutOfDomain);
        };
        let radius = first.radius();
        if caps.iter().any(|c| (c.radius() - radius).abs() > tol.eps_angle) {
            return Err(PackingError::MixedRadii);
        }
        Ok(CapPacking { radius, centers: caps.iter().map(|c| c.center()).collect() })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn centers(&self) -> &[UnitVector] {
        &self.centers
    }

    pub fn caps(&self) -> Vec<SphericalCap> {
        self.centers
            .iter()
            .map(|&c| SphericalCap::new(c, self.radius).expect("radius validated on construction"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// A family of great circles certifying total separability: every circle
/// avoids every cap interior, and each unordered pair of caps is assigned a
/// circle that puts the two centers on opposite sides.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationWitness {
    pub circles: Vec<GreatCircle>,
    pub pair_assignment: BTreeMap<(usize, usize), usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PackingReport {
    pub is_packing: bool,
    pub is_ts: bool,
    /// `m (1 - cos rho) / 2`, the fraction of the sphere covered.
    pub density: f64,
    pub witness: Option<SeparationWitness>,
    /// Pairs that overlap (packing check) or resist separation (TS check).
    pub failures: Vec<(usize, usize)>,
}

/// Checks pairwise interior-disjointness and computes the density.
///
/// The separability fields are left negative: `is_ts` only becomes true
/// through [`verify_ts`].
pub fn verify_packing(p: &CapPacking, tol: &Tolerances) -> PackingReport {
    let m = p.len();
    let mut failures = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            if sdist(p.centers[i], p.centers[j]) < 2.0 * p.radius - tol.eps_angle {
                failures.push((i, j));
            }
        }
    }
    PackingReport {
        is_packing: failures.is_empty(),
        is_ts: false,
        density: m as f64 * (1.0 - p.radius.cos()) / 2.0,
        witness: None,
        failures,
    }
}

/// A great circle separating caps `i` and `j` while avoiding every cap
/// interior, or [`PackingError::Infeasible`] when none exists.
///
/// The objective `max_u min_k |<u, c_k>|` subject to the sign constraints
/// at `i` and `j` is, within each sign class, a concave max–min of linear
/// functions on the sphere; its optimum is pinned by at most three active
/// constraints.  Enumerating the equalizer directions of every subset of
/// size up to three under every sign pattern therefore visits an optimizer
/// of every sign class, which makes the search exact without walking the
/// exponential family of sign vectors.
pub fn find_separating_circle(
    p: &CapPacking,
    i: usize,
    j: usize,
    tol: &Tolerances,
) -> Result<GreatCircle, PackingError> {
    let m = p.len();
    if i >= m || j >= m || i == j {
        return Err(PackingError::OutOfDomain);
    }
    if m > MAX_EXHAUSTIVE_CAPS {
        return Err(PackingError::TooManyCaps);
    }
    let c = p.centers();
    let s = p.radius().sin();
    let eps = tol.eps_angle;

    let mut best: Option<(f64, GreatCircle)> = None;
    let mut consider = |u: UnitVector| {
        let u = if u.dot(c[i]) >= 0.0 { u } else { u.antipode() };
        if u.dot(c[i]) < s - eps || u.dot(c[j]) > -(s - eps) {
            return;
        }
        let margin = c.iter().map(|&ck| u.dot(ck).abs()).fold(f64::INFINITY, f64::min);
        if margin < s - eps {
            return;
        }
        let circle = GreatCircle::new(u);
        let better = match &best {
            None => true,
            Some((bm, bc)) => {
                margin > *bm + 1e-15
                    || ((margin - *bm).abs() <= 1e-15
                        && circle.pole().as_array() < bc.pole().as_array())
            }
        };
        if better {
            best = Some((margin, circle));
        }
    };

    for k in 0..m {
        consider(c[k]);
    }
    for a in 0..m {
        for b in (a + 1)..m {
            for sb in [1.0, -1.0] {
                let v = [
                    c[a].x + sb * c[b].x,
                    c[a].y + sb * c[b].y,
                    c[a].z + sb * c[b].z,
                ];
                if let Ok(u) = UnitVector::from_array(v) {
                    consider(u);
                }
            }
        }
    }
    for a in 0..m {
        for b in (a + 1)..m {
            for d in (b + 1)..m {
                for (sb, sd) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let p1 = c[a].as_array();
                    let p2 = [sb * c[b].x, sb * c[b].y, sb * c[b].z];
                    let p3 = [sd * c[d].x, sd * c[d].y, sd * c[d].z];
                    let e1 = [p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2]];
                    let e2 = [p2[0] - p3[0], p2[1] - p3[1], p2[2] - p3[2]];
                    let n = crate::geom::cross3(e1, e2);
                    if let Ok(u) = UnitVector::from_array(n) {
                        consider(u);
                    }
                }
            }
        }
    }

    best.map(|(_, circle)| circle).ok_or(PackingError::Infeasible)
}

/// Assigns to every unordered pair the first listed circle that strictly
/// separates it with full clearance.
fn assign_pairs(
    circles: &[GreatCircle],
    p: &CapPacking,
    tol: &Tolerances,
) -> Result<BTreeMap<(usize, usize), usize>, PackingError> {
    let s = p.radius().sin();
    let eps = tol.eps_angle;
    let c = p.centers();
    let mut map = BTreeMap::new();
    for i in 0..c.len() {
        for j in (i + 1)..c.len() {
            let q = circles
                .iter()
                .position(|circle| {
                    let di = circle.pole().dot(c[i]);
                    let dj = circle.pole().dot(c[j]);
                    di.abs() >= s - eps && dj.abs() >= s - eps && di * dj < 0.0
                })
                .ok_or(PackingError::Infeasible)?;
            map.insert((i, j), q);
        }
    }
    Ok(map)
}

/// Verifies total separability.
///
/// With a witness, checks that every witness circle clears every cap and
/// that each pair's assigned circle separates it (pole sign free).  Without
/// one, runs [`find_separating_circle`] on every pair and assembles a
/// witness from the found circles.  Pairs that fail either way are listed
/// in the report; an overlapping family short-circuits with
/// `is_packing = false`.
pub fn verify_ts(
    p: &CapPacking,
    witness: Option<&SeparationWitness>,
    tol: &Tolerances,
) -> Result<PackingReport, PackingError> {
    let mut report = verify_packing(p, tol);
    if !report.is_packing {
        return Ok(report);
    }
    let m = p.len();
    let s = p.radius().sin();
    let eps = tol.eps_angle;
    match witness {
        Some(w) => {
            let mut bad_circle = vec![false; w.circles.len()];
            for (q, circle) in w.circles.iter().enumerate() {
                for &ck in p.centers() {
                    if circle.pole().dot(ck).abs() < s - eps {
                        bad_circle[q] = true;
                    }
                }
            }
            let mut failures = Vec::new();
            for i in 0..m {
                for j in (i + 1)..m {
                    let ok = match w.pair_assignment.get(&(i, j)) {
                        Some(&q) if q < w.circles.len() && !bad_circle[q] => {
                            let di = w.circles[q].pole().dot(p.centers[i]);
                            let dj = w.circles[q].pole().dot(p.centers[j]);
                            di.abs() >= s - eps && dj.abs() >= s - eps && di * dj < 0.0
                        }
                        _ => false,
                    };
                    if !ok {
                        failures.push((i, j));
                    }
                }
            }
            report.is_ts = failures.is_empty();
            if report.is_ts {
                report.witness = Some(w.clone());
            }
            report.failures = failures;
        }
        None => {
            if m > MAX_EXHAUSTIVE_CAPS {
                return Err(PackingError::TooManyCaps);
            }
            let mut circles: Vec<GreatCircle> = Vec::new();
            let mut pair_assignment = BTreeMap::new();
            let mut failures = Vec::new();
            for i in 0..m {
                for j in (i + 1)..m {
                    match find_separating_circle(p, i, j, tol) {
                        Ok(circle) => {
                            let q = circles
                                .iter()
                                .position(|e| e.coincident_with(&circle, tol))
                                .unwrap_or_else(|| {
                                    circles.push(circle);
                                    circles.len() - 1
                                });
                            pair_assignment.insert((i, j), q);
                        }
                        Err(PackingError::Infeasible) => failures.push((i, j)),
                        Err(e) => return Err(e),
                    }
                }
            }
            report.is_ts = failures.is_empty();
            if report.is_ts {
                report.witness = Some(SeparationWitness { circles, pair_assignment });
            }
            report.failures = failures;
        }
    }
    Ok(report)
}

/// Density of the extremal corner configuration: three caps of radius
/// `rho` wedged against two orthogonal great circles,
/// `(1 - cos rho) / (1 - pi / (4 arcsin(1/(sqrt(2) cos rho))))`.
///
/// Strictly decreasing on `(0, pi/4)` with limit `pi/4` at `0+`; every
/// totally separable packing of caps of radius `rho < pi/4` has density at
/// most this value.
pub fn delta_bound(rho: f64) -> Result<f64, PackingError> {
    if !rho.is_finite() || rho <= 0.0 || rho >= FRAC_PI_4 {
        return Err(PackingError::OutOfDomain);
    }
    let a = (1.0 / (SQRT_2 * rho.cos())).asin();
    Ok((1.0 - rho.cos()) / (1.0 - PI / (4.0 * a)))
}

/// Upper bound for the largest radius of `k` congruent caps forming a
/// totally separable packing:
/// `arccos(1 / (sqrt(2) sin(k pi / (4(k - 2)))))` for `k >= 5`.
pub fn rstam_upper(k: usize) -> Result<f64, PackingError> {
    if k < 5 {
        return Err(PackingError::OutOfDomain);
    }
    let angle = k as f64 / (k as f64 - 2.0) * FRAC_PI_4;
    Ok((1.0 / (SQRT_2 * angle.sin())).clamp(-1.0, 1.0).acos())
}

/// Exact largest radius of `k` separable congruent caps where known:
/// `pi/2` for two caps, `pi/4` for three or four, `arctan(3/4)` for five
/// or six, `arcsin(1/sqrt(3))` for seven or eight.  `None` beyond eight
/// (open) and below two.
pub fn rstam_known(k: usize) -> Option<f64> {
    match k {
        2 => Some(FRAC_PI_2),
        3 | 4 => Some(FRAC_PI_4),
        5 | 6 => Some(0.75f64.atan()),
        7 | 8 => Some((1.0 / 3f64.sqrt()).asin()),
        _ => None,
    }
}

/// Base triangle of the six-cap configuration: a regular spherical
/// triangle of side `arccos(1/4)`, realized with vertices at colatitude
/// `pi/4`.
fn cuboctahedral_triangle() -> [UnitVector; 3] {
    [
        UnitVector::sph(FRAC_PI_4, 0.0),
        UnitVector::sph(FRAC_PI_4, 2.0 * PI / 3.0),
        UnitVector::sph(FRAC_PI_4, 4.0 * PI / 3.0),
    ]
}

/// A named packing together with its generating separation witness.
///
/// `octahedral8`: eight caps of radius `arcsin(1/sqrt(3))` inscribed in
/// the octants of three orthogonal circles.  `cuboctahedral6`: six caps of
/// radius `arctan(3/4)` inscribed in the isosceles triangles cut by the
/// side lines of a regular triangle of side `arccos(1/4)`.  `octa_sub`
/// with parameter 5 or 7: leading subsets of `octahedral8`.  `kissing8`:
/// the octahedral centers with radius `pi/6`.
pub fn named_packing(
    name: &str,
    param: Option<usize>,
) -> Result<(CapPacking, SeparationWitness), PackingError> {
    let tol = Tolerances::default();
    let octa_centers = || -> Vec<UnitVector> {
        let mut centers = Vec::with_capacity(8);
        for sx in [1.0, -1.0] {
            for sy in [1.0, -1.0] {
                for sz in [1.0, -1.0] {
                    centers.push(UnitVector::normalized(sx, sy, sz).expect("nonzero"));
                }
            }
        }
        centers
    };
    let coordinate_circles = || -> Vec<GreatCircle> {
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
            .into_iter()
            .map(|a| GreatCircle::new(UnitVector::from_array(a).expect("unit axis")))
            .collect()
    };

    let (packing, circles) = match (name, param) {
        ("octahedral8", None) => {
            let rho = (1.0 / 3f64.sqrt()).asin();
            (CapPacking::new(octa_centers(), rho)?, coordinate_circles())
        }
        ("octa_sub", Some(k)) if k == 5 || k == 7 => {
            let rho = (1.0 / 3f64.sqrt()).asin();
            let centers = octa_centers().into_iter().take(k).collect();
            (CapPacking::new(centers, rho)?, coordinate_circles())
        }
        ("kissing8", None) => {
            (CapPacking::new(octa_centers(), PI / 6.0)?, coordinate_circles())
        }
        ("cuboctahedral6", None) => {
            let [v0, v1, v2] = cuboctahedral_triangle();
            let circles = vec![
                GreatCircle::through(v0, v1)?,
                GreatCircle::through(v1, v2)?,
                GreatCircle::through(v2, v0)?,
            ];
            let tiling = build_tiling(&circles, &tol)?;
            let metrics = cell_metrics(&tiling, &tol)?;
            let rho = 0.75f64.atan();
            let centers: Vec<UnitVector> = metrics
                .per_cell
                .iter()
                .filter(|c| (c.inradius - rho).abs() < 1e-9)
                .map(|c| c.incenter)
                .collect();
            assert_eq!(
                centers.len(),
                6,
                "side lines of the base triangle cut six isosceles cells"
            );
            (CapPacking::new(centers, rho)?, circles)
        }
        ("octahedral8" | "octa_sub" | "kissing8" | "cuboctahedral6", _) => {
            return Err(PackingError::OutOfDomain);
        }
        (other, _) => return Err(PackingError::UnknownName(String::from(other))),
    };
    let pair_assignment = assign_pairs(&circles, &packing, &tol)?;
    Ok((packing, SeparationWitness { circles, pair_assignment }))
}

/// Separable grid packing in the lune crossing of two orthogonal pencils.
///
/// Two pencils of `k + 1` great circles — one through the poles `±e_y`,
/// one through `±e_z` — slice the lune of half-width `alpha` into `k x k`
/// quadrangles.  Each quadrangle takes its inscribed cap of radius
/// `arcsin(sin(alpha/k) cos alpha)` centered at the crossing of its two
/// midlines; with the antipodal copies this packs `2k^2` caps, and the
/// `2(k + 1)` pencil circles witness total separability.
pub fn lune_grid(
    alpha: f64,
    k: usize,
) -> Result<(CapPacking, SeparationWitness), PackingError> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= FRAC_PI_2 || k < 1 {
        return Err(PackingError::OutOfDomain);
    }
    let tol = Tolerances::default();
    let kf = k as f64;
    let mut circles = Vec::with_capacity(2 * (k + 1));
    for t in 0..=k {
        let phi = -alpha + 2.0 * alpha * t as f64 / kf;
        circles.push(GreatCircle::new(
            UnitVector::normalized(-phi.sin(), 0.0, phi.cos()).expect("unit pole"),
        ));
    }
    for t in 0..=k {
        let psi = -alpha + 2.0 * alpha * t as f64 / kf;
        circles.push(GreatCircle::new(
            UnitVector::normalized(-psi.sin(), psi.cos(), 0.0).expect("unit pole"),
        ));
    }
    let rho = ((alpha / kf).sin() * alpha.cos()).asin();
    let mut centers = Vec::with_capacity(2 * k * k);
    for i in 1..=k {
        let phi = -alpha + (2.0 * i as f64 - 1.0) * alpha / kf;
        for j in 1..=k {
            let psi = -alpha + (2.0 * j as f64 - 1.0) * alpha / kf;
            let c = UnitVector::normalized(1.0, psi.tan(), phi.tan()).expect("nonzero");
            centers.push(c);
            centers.push(c.antipode());
        }
    }
    let packing = CapPacking::new(centers, rho)?;
    let pair_assignment = assign_pairs(&circles, &packing, &tol)?;
    Ok((packing, SeparationWitness { circles, pair_assignment }))
}

/// True when every triple of caps with pairwise center distances at most
/// `2 arcsin(sqrt(2) sin rho)` is totally separable as a three-cap family.
pub fn separable_check_triples(p: &CapPacking, tol: &Tolerances) -> Result<bool, PackingError> {
    let rr = saturation_radius(p.radius()).map_err(|_| PackingError::OutOfDomain)?;
    let reach = 2.0 * rr + tol.eps_angle;
    let m = p.len();
    for a in 0..m {
        for b in (a + 1)..m {
            if sdist(p.centers[a], p.centers[b]) > reach {
                continue;
            }
            for d in (b + 1)..m {
                if sdist(p.centers[a], p.centers[d]) > reach
                    || sdist(p.centers[b], p.centers[d]) > reach
                {
                    continue;
                }
                let triple = CapPacking::new(
                    vec![p.centers[a], p.centers[b], p.centers[d]],
                    p.radius(),
                )?;
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    match find_separating_circle(&triple, i, j, tol) {
                        Ok(_) => {}
                        Err(PackingError::Infeasible) => return Ok(false),
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Deterministic spherical Fibonacci lattice of `n` points.
fn fibonacci_grid(n: usize) -> Vec<UnitVector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|t| {
            let z = 1.0 - (2.0 * t as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * t as f64;
            UnitVector::normalized(r * a.cos(), r * a.sin(), z).expect("off-pole lattice point")
        })
        .collect()
}

/// Empirical covering-radius constant of the Fibonacci lattice: every
/// sphere point lies within `FIB_COVER / sqrt(n)` of a lattice point (with
/// ample margin; validated by probing in the tests).
const FIB_COVER: f64 = 3.2;

/// Returns true when the triples of `p` touching cap `x` (distances within
/// `reach`) are all separable.
fn triples_at_ok(
    p: &CapPacking,
    x: usize,
    reach: f64,
    tol: &Tolerances,
) -> Result<Option<(usize, usize)>, PackingError> {
    let m = p.len();
    for a in 0..m {
        if a == x || sdist(p.centers[a], p.centers[x]) > reach {
            continue;
        }
        for b in (a + 1)..m {
            if b == x
                || sdist(p.centers[b], p.centers[x]) > reach
                || sdist(p.centers[a], p.centers[b]) > reach
            {
                continue;
            }
            let triple =
                CapPacking::new(vec![p.centers[a], p.centers[b], p.centers[x]], p.radius())?;
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                match find_separating_circle(&triple, i, j, tol) {
                    Ok(_) => {}
                    Err(PackingError::Infeasible) => return Ok(Some((a, b))),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(None)
}

/// Greedily extends the packing until a deterministic lattice certifies
/// that every sphere point is within `2 arcsin(sqrt(2) sin rho)` of some
/// center, keeping every touching triple separable.
///
/// New caps land on uncovered lattice points (antipodal partners are added
/// together when they fit) and each addition re-checks the triples it
/// joins.  The lattice spacing is a quarter of the saturation radius, and
/// the greedy threshold is tightened by one spacing so the finite
/// certificate covers all of the sphere, not just the lattice.
pub fn saturate(p: &CapPacking, tol: &Tolerances) -> Result<CapPacking, PackingError> {
    let rho = p.radius();
    if !(rho > 0.0 && rho < FRAC_PI_4) {
        return Err(PackingError::OutOfDomain);
    }
    let rr = saturation_radius(rho).map_err(|_| PackingError::OutOfDomain)?;
    let reach = 2.0 * rr + tol.eps_angle;
    let report = verify_packing(p, tol);
    if !report.is_packing {
        let (i, j) = report.failures[0];
        return Err(PackingError::CannotSaturate(vec![i, j]));
    }
    for x in 0..p.len() {
        if let Some((a, b)) = triples_at_ok(p, x, reach, tol)? {
            return Err(PackingError::CannotSaturate(vec![a, b, x]));
        }
    }

    let spacing = rr / 4.0;
    let n = ((FIB_COVER / spacing) * (FIB_COVER / spacing)).ceil() as usize + 16;
    let grid = fibonacci_grid(n);
    let threshold = 2.0 * rr - spacing;

    let mut out = p.clone();
    for &g in &grid {
        let uncovered = out.centers.iter().all(|&c| sdist(c, g) > threshold);
        if !uncovered {
            continue;
        }
        let mut added = vec![g];
        let anti = g.antipode();
        let anti_fits = out.centers.iter().all(|&c| sdist(c, anti) >= 2.0 * rho - tol.eps_angle)
            && sdist(g, anti) >= 2.0 * rho - tol.eps_angle;
        if anti_fits && out.centers.iter().all(|&c| sdist(c, anti) > threshold) {
            added.push(anti);
        }
        for x in added {
            if out.centers.iter().any(|&c| sdist(c, x) < 2.0 * rho - tol.eps_angle) {
                return Err(PackingError::CannotSaturate(vec![out.len()]));
            }
            out.centers.push(x);
            if let Some((a, b)) = triples_at_ok(&out, out.len() - 1, reach, tol)? {
                return Err(PackingError::CannotSaturate(vec![a, b, out.len() - 1]));
            }
        }
    }
    Ok(out)
}
