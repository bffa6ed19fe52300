//! Great-sphere arrangements on `S^{d-1}` for `3 <= d <= 5`: sign-vector
//! cell enumeration with interior-witness certification, cell circumradii
//! by minimal enclosing caps, the closed-form covering-radius bounds, the
//! Glazyrin and Jung audits, greedy point nets, and a Monte-Carlo check
//! that the inscribed regular simplex maximizes volume inside a cap.

use crate::nd::{deepest_point_nd, dotn, min_enclosing_cap_nd, normalized, nullspace_unit, solve};
use crate::tol::Tolerances;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Sphere-count ceiling keeping the vertex enumeration at desk scale.
pub const MAX_SPHERES: usize = 16;

/// Points closer than this to a great sphere count as lying on it.
const EPS_ON_SPHERE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum HighDimError {
    /// Dimension, sphere count, or scalar argument outside the supported
    /// range.
    OutOfDomain,
    /// More than [`MAX_SPHERES`] great spheres.
    TooLarge,
    /// Parallel poles or concurrences beyond the defining subsets; the
    /// payload lists the offending pole index sets.
    DegenerateArrangement(Vec<Vec<usize>>),
    CellNotInHemisphere,
}

impl fmt::Display for HighDimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HighDimError::OutOfDomain => {
                write!(f, "argument outside the operation's domain")
            }
            HighDimError::TooLarge => {
                write!(f, "more than {MAX_SPHERES} great spheres")
            }
            HighDimError::DegenerateArrangement(sets) => {
                write!(f, "degenerate arrangement; concurrent pole sets {sets:?}")
            }
            HighDimError::CellNotInHemisphere => {
                write!(f, "cell does not fit in an open hemisphere")
            }
        }
    }
}

impl core::error::Error for HighDimError {}

/// An arrangement of `(d-2)`-dimensional great spheres on `S^{d-1}`, each
/// the zero set of one unit pole.
#[derive(Debug, Clone, PartialEq)]
pub struct GreatSphereArrangement {
    d: usize,
    poles: Vec<Vec<f64>>,
}

impl GreatSphereArrangement {
    pub fn new(
        d: usize,
        poles: Vec<Vec<f64>>,
        tol: &Tolerances,
    ) -> Result<Self, HighDimError> {
        if !(3..=5).contains(&d) || poles.len() < 2 {
            return Err(HighDimError::OutOfDomain);
        }
        if poles.len() > MAX_SPHERES {
            return Err(HighDimError::TooLarge);
        }
        let mut unit = Vec::with_capacity(poles.len());
        for p in &poles {
            if p.len() != d {
                return Err(HighDimError::OutOfDomain);
            }
            unit.push(normalized(p).ok_or(HighDimError::OutOfDomain)?);
        }
        // cos(eps) rounds to 1.0 for tight angular tolerances, so compare
        // the complement 1 - |dot| = eps^2 / 2 instead.
        let parallel_gap = (tol.eps_angle * tol.eps_angle / 2.0).max(1e-15);
        for i in 0..unit.len() {
            for j in (i + 1)..unit.len() {
                if 1.0 - dotn(&unit[i], &unit[j]).abs() < parallel_gap {
                    return Err(HighDimError::DegenerateArrangement(vec![vec![i, j]]));
                }
            }
        }
        Ok(GreatSphereArrangement { d, poles: unit })
    }

    /// The `d` coordinate great spheres.
    pub fn orthogonal(d: usize) -> Result<Self, HighDimError> {
        let poles = (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                v
            })
            .collect();
        Self::new(d, poles, &Tolerances::default())
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn poles(&self) -> &[Vec<f64>] {
        &self.poles
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A full-dimensional cell of the arrangement, named by its sign vector:
/// the closure of `{x : signs[i] * <x, pole_i> > 0 for all i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignCell {
    pub signs: Vec<i8>,
    /// Cell vertices: the arrangement vertices adjacent to the cell, in
    /// deterministic enumeration order.
    pub vertices: Vec<Vec<f64>>,
    /// Interior point certifying that the sign region is full-dimensional.
    pub witness: Vec<f64>,
}

fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// `2 (C(n-1,0) + ... + C(n-1,d-1))`: no arrangement of `n` great spheres
/// on `S^{d-1}` has more full-dimensional cells.
pub fn cell_count_bound(n: usize, d: usize) -> u64 {
    2 * (0..d).map(|i| binom(n - 1, i)).sum::<u64>()
}

/// Enumerates the full-dimensional cells of a simple arrangement.
///
/// Every `(d-1)`-subset of poles pins an antipodal vertex pair through its
/// nullspace; each vertex joins the cells of all sign completions over its
/// defining subset.  A candidate sign vector is kept only with an interior
/// witness: the vertex sum when it is strictly interior, otherwise the
/// deepest point of the signed poles.  Rank-deficient subsets and vertices
/// meeting spheres beyond their defining subset are collected and reported
/// as degeneracies.
pub fn enumerate_cells(
    a: &GreatSphereArrangement,
    _tol: &Tolerances,
) -> Result<Vec<SignCell>, HighDimError> {
    let d = a.d;
    let n = a.poles.len();
    if n < d {
        return Err(HighDimError::OutOfDomain);
    }

    let mut degeneracies: Vec<Vec<usize>> = Vec::new();
    // (position, defining subset, base signs on the non-defining spheres)
    let mut vertices: Vec<(Vec<f64>, Vec<usize>, Vec<i8>)> = Vec::new();
    for subset in combinations(n, d - 1) {
        let rows: Vec<Vec<f64>> = subset.iter().map(|&i| a.poles[i].clone()).collect();
        match nullspace_unit(&rows) {
            None => degeneracies.push(subset.clone()),
            Some(v) => {
                for candidate in [v.clone(), v.iter().map(|x| -x).collect::<Vec<f64>>()] {
                    let mut base = Vec::with_capacity(n - (d - 1));
                    let mut concurrence = None;
                    for j in 0..n {
                        if subset.contains(&j) {
                            continue;
                        }
                        let s = dotn(&candidate, &a.poles[j]);
                        if s.abs() < EPS_ON_SPHERE {
                            let mut set = subset.clone();
                            set.push(j);
                            set.sort_unstable();
                            concurrence = Some(set);
                            break;
                        }
                        base.push(if s > 0.0 { 1i8 } else { -1i8 });
                    }
                    match concurrence {
                        Some(set) => {
                            if !degeneracies.contains(&set) {
                                degeneracies.push(set);
                            }
                        }
                        None => vertices.push((candidate, subset.clone(), base)),
                    }
                }
            }
        }
    }
    if !degeneracies.is_empty() {
        return Err(HighDimError::DegenerateArrangement(degeneracies));
    }

    let mut candidates: BTreeMap<Vec<i8>, Vec<usize>> = BTreeMap::new();
    for (vi, (_, subset, base)) in vertices.iter().enumerate() {
        for mask in 0..(1u32 << (d - 1)) {
            let mut signs = vec![0i8; n];
            for (t, &i) in subset.iter().enumerate() {
                signs[i] = if mask & (1 << t) == 0 { 1 } else { -1 };
            }
            let mut b = base.iter();
            for (j, s) in signs.iter_mut().enumerate() {
                if !subset.contains(&j) {
                    *s = *b.next().expect("one base sign per non-defining sphere");
                }
            }
            candidates.entry(signs).or_default().push(vi);
        }
    }

    let mut cells = Vec::new();
    for (signs, vidx) in candidates {
        let mut sum = vec![0.0; d];
        for &vi in &vidx {
            for (acc, x) in sum.iter_mut().zip(&vertices[vi].0) {
                *acc += x;
            }
        }
        let strict = |w: &[f64]| {
            signs
                .iter()
                .zip(&a.poles)
                .all(|(&s, p)| s as f64 * dotn(w, p) > EPS_ON_SPHERE)
        };
        let witness = match normalized(&sum).filter(|w| strict(w)) {
            Some(w) => Some(w),
            None => {
                let dirs: Vec<Vec<f64>> = signs
                    .iter()
                    .zip(&a.poles)
                    .map(|(&s, p)| p.iter().map(|x| s as f64 * x).collect())
                    .collect();
                deepest_point_nd(&dirs)
                    .filter(|(_, depth)| *depth > EPS_ON_SPHERE)
                    .map(|(w, _)| w)
            }
        };
        if let Some(witness) = witness {
            let vertices = vidx.iter().map(|&vi| vertices[vi].0.clone()).collect();
            cells.push(SignCell { signs, vertices, witness });
        }
    }
    assert!(
        cells.len() as u64 <= cell_count_bound(n, d),
        "cell count exceeds the binomial bound"
    );
    Ok(cells)
}

/// Radius of the smallest cap containing the cell, from the minimal
/// enclosing cap of its vertices (cells are hulls of their vertices, and
/// caps below a half turn are convex).
pub fn cell_circumradius(cell: &SignCell) -> Result<f64, HighDimError> {
    let (_, cos_r) =
        min_enclosing_cap_nd(&cell.vertices).ok_or(HighDimError::OutOfDomain)?;
    if cos_r <= EPS_ON_SPHERE {
        return Err(HighDimError::CellNotInHemisphere);
    }
    Ok(cos_r.clamp(-1.0, 1.0).acos())
}

/// The three covering-radius bounds for `n` great spheres on `S^{d-1}`:
/// the exact value `arccos(1/sqrt(d))` at `n = d`, the cell-count lower
/// bound `arcsin(d / (2 sum C(n-1,i)))` for `d > 3`, and the net-based
/// upper bound `arcsin(4 n^{-1/d} sqrt((2d-2)/d))` for `n > d`, clamped
/// and flagged when its argument exceeds one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgsBounds {
    pub exact_at_n_eq_d: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub upper_clamped: bool,
}

pub fn rgs_bounds(n: usize, d: usize) -> Result<RgsBounds, HighDimError> {
    if !(3..=5).contains(&d) || n < d {
        return Err(HighDimError::OutOfDomain);
    }
    let exact_at_n_eq_d = (n == d).then(|| (1.0 / (d as f64).sqrt()).acos());
    let lower = (d > 3).then(|| {
        let cells: u64 = (0..d).map(|i| binom(n - 1, i)).sum();
        (d as f64 / (2.0 * cells as f64)).asin()
    });
    let mut upper_clamped = false;
    let upper = (n > d).then(|| {
        let arg = 4.0 * (n as f64).powf(-1.0 / d as f64)
            * ((2.0 * d as f64 - 2.0) / d as f64).sqrt();
        if arg > 1.0 {
            upper_clamped = true;
        }
        arg.clamp(-1.0, 1.0).asin()
    });
    Ok(RgsBounds { exact_at_n_eq_d, lower, upper, upper_clamped })
}

/// Necessary condition for `N` caps of radius `big_r` to cover `S^{d-1}`:
/// the Euclidean cap radii must sum past the dimension, `d < N sin big_r`.
pub fn glazyrin_check(n_caps: usize, big_r: f64, d: usize) -> bool {
    (d as f64) < n_caps as f64 * big_r.sin()
}

/// Radius of a cap guaranteed to cover any spherical set of diameter
/// `diameter` on `S^{d-1}`: `arcsin(sqrt((2d-2)/d) sin(diameter/2))`.
pub fn jung_radius(diameter: f64, d: usize) -> Result<f64, HighDimError> {
    if !(3..=5).contains(&d) || !(0.0..=core::f64::consts::PI).contains(&diameter) {
        return Err(HighDimError::OutOfDomain);
    }
    let arg = ((2.0 * d as f64 - 2.0) / d as f64).sqrt() * (diameter / 2.0).sin();
    if arg > 1.0 + 1e-12 {
        return Err(HighDimError::OutOfDomain);
    }
    Ok(arg.clamp(-1.0, 1.0).asin())
}

/// Uniform point on `S^{d-1}` by rejection from the cube into the ball.
fn uniform_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0f64..1.0)).collect();
        let n2 = dotn(&v, &v);
        if n2 <= 1.0 && n2 >= 1e-4 {
            return normalized(&v).expect("norm checked");
        }
    }
}

/// Candidate stream length for the greedy net; every streamed point ends
/// up within `delta` of the returned net, so the net is grid-certified at
/// this resolution.
const NET_STREAM: usize = 12_000;

/// Greedy `delta`-net on `S^{d-1}`: streams deterministic uniform samples
/// and keeps those at angle `delta` or more from every kept point.  The
/// result is a `delta`-packing covering the whole sample stream within
/// `delta`.
pub fn delta_net(d: usize, delta: f64, seed: u64) -> Vec<Vec<f64>> {
    assert!((3..=5).contains(&d), "dimension must be 3, 4, or 5");
    assert!(
        delta > 0.0 && delta <= FRAC_PI_2,
        "net spacing must lie in (0, pi/2]"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cos_delta = delta.cos();
    let mut net: Vec<Vec<f64>> = Vec::new();
    for _ in 0..NET_STREAM {
        let p = uniform_unit(&mut rng, d);
        if net.iter().all(|q| dotn(q, &p) < cos_delta + 1e-12) {
            net.push(p);
        }
    }
    net
}

/// Area of the triangle on `S^2` (by angular excess), zero for degenerate
/// vertex triples.
fn triangle_area_or_zero(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    use crate::geom::{triangle_metrics, UnitVector};
    let uv = |p: &[f64]| UnitVector::new(p[0], p[1], p[2]);
    match (uv(a), uv(b), uv(c)) {
        (Ok(a), Ok(b), Ok(c)) => triangle_metrics(a, b, c, &Tolerances::default())
            .map(|m| m.area)
            .unwrap_or(0.0),
        _ => 0.0,
    }
}

/// Monte-Carlo volume of the spherical simplex on `S^3` spanned by four
/// unit vectors: the fraction of uniform sphere samples inside the linear
/// cone, scaled by the sphere volume `2 pi^2`.  Returns `(volume, standard
/// error)`; degenerate spans give `(0, 0)`.
fn simplex_volume_mc_s3(
    verts: &[Vec<f64>],
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, f64) {
    let m: Vec<Vec<f64>> = (0..4)
        .map(|r| (0..4).map(|c| verts[c][r]).collect())
        .collect();
    // Columns of the inverse, so membership is sixteen multiplies per point.
    let mut inv_cols = Vec::with_capacity(4);
    for r in 0..4 {
        let mut e = vec![0.0; 4];
        e[r] = 1.0;
        match solve(m.clone(), e) {
            Some(col) => inv_cols.push(col),
            None => return (0.0, 0.0),
        }
    }
    let sphere_volume = 2.0 * core::f64::consts::PI * core::f64::consts::PI;
    let mut hits = 0usize;
    for _ in 0..samples {
        let x = uniform_unit(rng, 4);
        let inside = (0..4).all(|i| {
            let lambda: f64 = (0..4).map(|r| inv_cols[r][i] * x[r]).sum();
            lambda >= -1e-12
        });
        if inside {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let sigma = sphere_volume * (p * (1.0 - p) / samples as f64).sqrt();
    (sphere_volume * p, sigma)
}

/// Samples a point of the cap of radius `r` about the last coordinate axis
/// on `S^{d-1}`, uniformly with respect to surface measure.
fn uniform_in_cap(rng: &mut ChaCha8Rng, d: usize, r: f64) -> Vec<f64> {
    match d {
        3 => {
            let z = 1.0 - rng.gen_range(0.0f64..1.0) * (1.0 - r.cos());
            let phi = rng.gen_range(0.0f64..core::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            vec![s * phi.cos(), s * phi.sin(), z]
        }
        4 => {
            // Colatitude density is sin^2 on [0, r]; rejection from the
            // uniform envelope (r below a half turn keeps sin monotone).
            let env = r.sin() * r.sin();
            let theta = loop {
                let t = rng.gen_range(0.0f64..r);
                if rng.gen_range(0.0f64..1.0) * env <= t.sin() * t.sin() {
                    break t;
                }
            };
            let u = uniform_unit(rng, 3);
            let s = theta.sin();
            vec![s * u[0], s * u[1], s * u[2], theta.cos()]
        }
        _ => unreachable!("cap sampling is defined for d = 3 and 4"),
    }
}

const MC_REGULAR_SAMPLES: usize = 1_000_000;
const MC_TRIAL_SAMPLES: usize = 20_000;

/// Tests, by random trials, that no simplex with vertices in a cap of
/// radius `cap_radius` beats the volume of the inscribed regular simplex.
///
/// On `S^2` triangle areas are exact by angular excess and the comparison
/// is direct; on `S^3` volumes come from rejection sampling and a trial
/// only counts as a violation beyond three combined standard errors.
pub fn boroczky_mc_check(d: usize, cap_radius: f64, trials: usize, seed: u64) -> bool {
    assert!(d == 3 || d == 4, "the check is implemented for d = 3 and 4");
    assert!(
        cap_radius > 0.0 && cap_radius < FRAC_PI_2,
        "cap radius must lie in (0, pi/2)"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match d {
        3 => {
            let third = core::f64::consts::TAU / 3.0;
            let reg: Vec<Vec<f64>> = (0..3)
                .map(|t| {
                    let phi = t as f64 * third;
                    let s = cap_radius.sin();
                    vec![s * phi.cos(), s * phi.sin(), cap_radius.cos()]
                })
                .collect();
            let regular = triangle_area_or_zero(&reg[0], &reg[1], &reg[2]);
            (0..trials).all(|_| {
                let a = uniform_in_cap(&mut rng, 3, cap_radius);
                let b = uniform_in_cap(&mut rng, 3, cap_radius);
                let c = uniform_in_cap(&mut rng, 3, cap_radius);
                triangle_area_or_zero(&a, &b, &c) <= regular + 1e-9
            })
        }
        _ => {
            let s = cap_radius.sin();
            let c = cap_radius.cos();
            let k = 1.0 / 3f64.sqrt();
            let reg: Vec<Vec<f64>> = [
                [k, k, k],
                [k, -k, -k],
                [-k, k, -k],
                [-k, -k, k],
            ]
            .iter()
            .map(|u| vec![s * u[0], s * u[1], s * u[2], c])
            .collect();
            let (v_reg, sig_reg) =
                simplex_volume_mc_s3(&reg, MC_REGULAR_SAMPLES, &mut rng);
            (0..trials).all(|_| {
                let verts: Vec<Vec<f64>> =
                    (0..4).map(|_| uniform_in_cap(&mut rng, 4, cap_radius)).collect();
                let (v, sig) = simplex_volume_mc_s3(&verts, MC_TRIAL_SAMPLES, &mut rng);
                v <= v_reg + 3.0 * (sig * sig + sig_reg * sig_reg).sqrt()
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{build_tiling, cell_metrics, named_arrangement};
    use crate::geom::{deepest_point, UnitVector};
    use crate::nd::normn;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_poles(seed: u64, d: usize, n: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| uniform_unit(&mut rng, d)).collect()
    }

    #[test]
    fn orthogonal_cells_across_dimensions() {
        for d in 3..=5 {
            let a = GreatSphereArrangement::orthogonal(d).unwrap();
            let cells = enumerate_cells(&a, &tol()).unwrap();
            assert_eq!(cells.len(), 1 << d, "d = {d}");
            assert_eq!(cells.len() as u64, cell_count_bound(d, d));
            let expected = (1.0 / (d as f64).sqrt()).acos();
            for cell in &cells {
                assert_eq!(cell.vertices.len(), d);
                // Regular simplex of edge pi/2: all vertex pairs orthogonal.
                for i in 0..d {
                    for j in (i + 1)..d {
                        assert!(dotn(&cell.vertices[i], &cell.vertices[j]).abs() < 1e-12);
                    }
                }
                let r = cell_circumradius(cell).unwrap();
                assert!((r - expected).abs() < 1e-9, "d = {d}: {r} vs {expected}");
                // The witness sits strictly inside.
                for (s, p) in cell.signs.iter().zip(a.poles()) {
                    assert!(*s as f64 * dotn(&cell.witness, p) > 1e-3);
                }
            }
            // Sign negation is a cell bijection onto the antipodal cell.
            for cell in &cells {
                let neg: Vec<i8> = cell.signs.iter().map(|s| -s).collect();
                let partner = cells.iter().find(|c| c.signs == neg).unwrap();
                for v in &cell.vertices {
                    let anti: Vec<f64> = v.iter().map(|x| -x).collect();
                    assert!(partner
                        .vertices
                        .iter()
                        .any(|w| w.iter().zip(&anti).all(|(a, b)| (a - b).abs() < 1e-12)));
                }
            }
        }
    }

    #[test]
    fn octant_cells_match_the_surface_tiling() {
        let a = GreatSphereArrangement::orthogonal(3).unwrap();
        let cells = enumerate_cells(&a, &tol()).unwrap();
        let circles = named_arrangement("orthogonal3", None).unwrap();
        let t = build_tiling(&circles, &tol()).unwrap();
        assert_eq!(cells.len(), t.cells.len());
        let m = cell_metrics(&t, &tol()).unwrap();
        let expected = (1.0f64 / 3f64.sqrt()).acos();
        assert!((m.max_circumradius - expected).abs() < 1e-9);
        for cell in &cells {
            assert!((cell_circumradius(cell).unwrap() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn simple_three_dim_counts_match_the_binomial_bound() {
        for n in 5..=10 {
            let a =
                GreatSphereArrangement::new(3, random_poles(1000 + n as u64, 3, n), &tol())
                    .unwrap();
            let cells = enumerate_cells(&a, &tol()).unwrap();
            assert_eq!(cells.len(), n * n - n + 2, "n = {n}");
            assert_eq!(cells.len() as u64, cell_count_bound(n, 3), "n = {n}");
        }
    }

    #[test]
    fn circumradius_agrees_with_the_surface_solver() {
        for n in [4, 5, 6] {
            let a = GreatSphereArrangement::new(3, random_poles(77 + n as u64, 3, n), &tol())
                .unwrap();
            for cell in enumerate_cells(&a, &tol()).unwrap() {
                let uv: Vec<UnitVector> = cell
                    .vertices
                    .iter()
                    .map(|v| UnitVector::new(v[0], v[1], v[2]).unwrap())
                    .collect();
                let (_, depth) = deepest_point(&uv).unwrap();
                let expected = depth.clamp(-1.0, 1.0).acos();
                let got = cell_circumradius(&cell).unwrap();
                assert!((got - expected).abs() < 1e-9, "{got} vs {expected}");
            }
        }
    }

    #[test]
    fn perturbing_an_orthogonal_pole_increases_the_worst_circumradius() {
        for d in [3, 4] {
            let base = (1.0 / (d as f64).sqrt()).acos();
            for k in 0..d {
                let mut poles: Vec<Vec<f64>> = (0..d)
                    .map(|i| {
                        let mut v = vec![0.0; d];
                        v[i] = 1.0;
                        v
                    })
                    .collect();
                // Rotate pole k by 1e-3 toward the next coordinate axis.
                let other = (k + 1) % d;
                poles[k][k] = (1e-3f64).cos();
                poles[k][other] = (1e-3f64).sin();
                let a = GreatSphereArrangement::new(d, poles, &tol()).unwrap();
                let worst = enumerate_cells(&a, &tol())
                    .unwrap()
                    .iter()
                    .map(|c| cell_circumradius(c).unwrap())
                    .fold(0.0f64, f64::max);
                assert!(worst > base + 1e-6, "d = {d}, pole {k}: {worst}");
            }
        }
    }

    #[test]
    fn degenerate_and_out_of_range_arrangements() {
        // Parallel poles are rejected at construction.
        let err = GreatSphereArrangement::new(
            3,
            vec![vec![1.0, 0.0, 0.0], vec![-1.0, -1e-12, 0.0]],
            &tol(),
        )
        .unwrap_err();
        assert!(matches!(err, HighDimError::DegenerateArrangement(_)));
        // Three poles in a plane: all three circles share an axis.
        let a = GreatSphereArrangement::new(
            3,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![1.0, 1.0, 0.0],
            ],
            &tol(),
        )
        .unwrap();
        match enumerate_cells(&a, &tol()).unwrap_err() {
            HighDimError::DegenerateArrangement(sets) => assert!(!sets.is_empty()),
            other => panic!("expected degeneracy, got {other:?}"),
        }
        assert_eq!(
            GreatSphereArrangement::new(3, random_poles(5, 3, 17), &tol()).unwrap_err(),
            HighDimError::TooLarge
        );
        assert_eq!(
            GreatSphereArrangement::new(6, random_poles(6, 6, 7), &tol()).unwrap_err(),
            HighDimError::OutOfDomain
        );
        assert_eq!(
            GreatSphereArrangement::new(3, vec![vec![0.0; 3]; 3], &tol()).unwrap_err(),
            HighDimError::OutOfDomain
        );
        assert_eq!(
            GreatSphereArrangement::new(4, random_poles(7, 3, 4), &tol()).unwrap_err(),
            HighDimError::OutOfDomain
        );
        // Fewer spheres than the dimension: no vertices to enumerate.
        let a = GreatSphereArrangement::new(4, random_poles(8, 4, 3), &tol()).unwrap();
        assert_eq!(
            enumerate_cells(&a, &tol()).unwrap_err(),
            HighDimError::OutOfDomain
        );
    }

    #[test]
    fn rgs_bounds_values() {
        let b = rgs_bounds(4, 4).unwrap();
        assert!((b.exact_at_n_eq_d.unwrap() - (0.5f64).acos()).abs() < 1e-12);
        assert!((b.exact_at_n_eq_d.unwrap().to_degrees() - 60.0).abs() < 1e-9);
        assert!(b.upper.is_none());
        assert!(!b.upper_clamped);

        let b = rgs_bounds(20, 4).unwrap();
        let lower = b.lower.unwrap();
        assert!((lower - (4.0f64 / 2320.0).asin()).abs() < 1e-15);
        assert!(lower < b.upper.unwrap());
        assert!(b.exact_at_n_eq_d.is_none());

        let b = rgs_bounds(1000, 3).unwrap();
        assert!(b.lower.is_none(), "the cell-count route needs d above three");
        assert!((b.upper.unwrap().sin() - 0.461880).abs() < 1e-5);
        assert!(!b.upper_clamped);

        // Small n: the upper-bound argument exceeds one and is flagged.
        let b = rgs_bounds(4, 3).unwrap();
        assert!(b.upper_clamped);
        assert!((b.upper.unwrap() - FRAC_PI_2).abs() < 1e-15);

        assert_eq!(rgs_bounds(3, 4).unwrap_err(), HighDimError::OutOfDomain);
        assert_eq!(rgs_bounds(7, 6).unwrap_err(), HighDimError::OutOfDomain);
        assert_eq!(rgs_bounds(7, 2).unwrap_err(), HighDimError::OutOfDomain);
    }

    #[test]
    fn glazyrin_examples() {
        assert!(glazyrin_check(8, (1.0f64 / 3f64.sqrt()).acos(), 3));
        assert!(!glazyrin_check(3, core::f64::consts::PI / 6.0, 3));
        assert!(glazyrin_check(16, core::f64::consts::PI / 3.0, 4));
    }

    #[test]
    fn jung_values_and_octant_tightness() {
        assert_eq!(jung_radius(0.0, 3).unwrap(), 0.0);
        let octant = jung_radius(FRAC_PI_2, 3).unwrap();
        assert!((octant - (1.0f64 / 3f64.sqrt()).acos()).abs() < 1e-12);
        // Tightness: the octant cell has diameter pi/2 and circumradius
        // exactly the Jung value.
        let a = GreatSphereArrangement::orthogonal(3).unwrap();
        let cells = enumerate_cells(&a, &tol()).unwrap();
        assert!((cell_circumradius(&cells[0]).unwrap() - octant).abs() < 1e-9);

        // Net pipeline identity at d = 4: the covering upper bound is the
        // Jung radius of twice the net spacing.
        let n = 625.0f64;
        let delta = (4.0 / n.powf(0.25)).asin();
        let via_jung = jung_radius(2.0 * delta, 4).unwrap();
        let via_bound = rgs_bounds(625, 4).unwrap().upper.unwrap();
        assert!((via_jung - via_bound).abs() < 1e-12);

        assert_eq!(
            jung_radius(core::f64::consts::PI, 3).unwrap_err(),
            HighDimError::OutOfDomain
        );
        assert_eq!(jung_radius(0.3, 2).unwrap_err(), HighDimError::OutOfDomain);
        assert_eq!(jung_radius(-0.1, 3).unwrap_err(), HighDimError::OutOfDomain);
    }

    #[test]
    fn delta_net_packs_and_covers() {
        // At spacing pi/2 no seven points fit pairwise that far apart.
        let net = delta_net(3, FRAC_PI_2, 11);
        assert!(net.len() <= 6, "got {}", net.len());
        for (i, p) in net.iter().enumerate() {
            assert!((normn(p) - 1.0).abs() < 1e-12);
            for q in &net[(i + 1)..] {
                assert!(dotn(p, q) <= FRAC_PI_2.cos() + 1e-12);
            }
        }
        assert_eq!(net, delta_net(3, FRAC_PI_2, 11), "deterministic per seed");

        // Fresh audit: the stream certificate keeps the true covering
        // radius within a small margin of the nominal spacing.
        for (d, delta, slack) in [(3, 0.7, 0.1), (4, 1.2, 0.3), (5, 1.4, 0.5)] {
            let net = delta_net(d, delta, 17);
            let mut rng = ChaCha8Rng::seed_from_u64(999);
            for _ in 0..1000 {
                let x = uniform_unit(&mut rng, d);
                let best = net
                    .iter()
                    .map(|p| dotn(p, &x).clamp(-1.0, 1.0).acos())
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= delta + slack, "d = {d}: hole of radius {best}");
            }
        }
    }

    #[test]
    fn net_pole_cells_have_bounded_diameter_and_circumradius() {
        // Build at spacing 0.9 so the realized net is a 1.0-net with
        // margin, then check the cells of the induced arrangement against
        // the diameter and Jung bounds for 1.0.
        let delta = 1.0;
        let net = delta_net(3, delta - 0.1, 4242);
        let mut poles: Vec<Vec<f64>> = Vec::new();
        for p in net {
            // Near-antipodal poles carry the same great circle; keep one.
            if poles.iter().all(|q: &Vec<f64>| dotn(q, &p).abs() < 0.9999) {
                poles.push(p);
            }
        }
        assert!(poles.len() >= 3 && poles.len() <= MAX_SPHERES);
        let a = GreatSphereArrangement::new(3, poles, &tol()).unwrap();
        let cells = enumerate_cells(&a, &tol()).unwrap();
        let r_cap = jung_radius(2.0 * delta, 3).unwrap();
        for cell in &cells {
            let mut diameter = 0.0f64;
            for i in 0..cell.vertices.len() {
                for j in (i + 1)..cell.vertices.len() {
                    let d = dotn(&cell.vertices[i], &cell.vertices[j])
                        .clamp(-1.0, 1.0)
                        .acos();
                    diameter = diameter.max(d);
                }
            }
            assert!(diameter <= 2.0 * delta + 1e-9, "diameter {diameter}");
            assert!(cell_circumradius(cell).unwrap() <= r_cap + 1e-9);
        }
    }

    #[test]
    fn triangle_area_handles_degenerate_input() {
        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0];
        assert_eq!(triangle_area_or_zero(&a, &a, &b), 0.0);
        let c = [0.0, 0.0, 1.0];
        assert!((triangle_area_or_zero(&a, &b, &c) - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_four_dim_simplex_has_zero_volume() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = uniform_unit(&mut rng, 4);
        let verts = vec![v.clone(), v.clone(), uniform_unit(&mut rng, 4), v];
        assert_eq!(simplex_volume_mc_s3(&verts, 1000, &mut rng), (0.0, 0.0));
    }

    #[test]
    fn regular_octant_triangle_maximizes_cap_triangles() {
        let rho = (1.0f64 / 3f64.sqrt()).acos();
        // The inscribed regular triangle of the octant circumcap is the
        // octant itself, of area pi/2.
        let third = core::f64::consts::TAU / 3.0;
        let verts: Vec<Vec<f64>> = (0..3)
            .map(|t| {
                let phi = t as f64 * third;
                vec![rho.sin() * phi.cos(), rho.sin() * phi.sin(), rho.cos()]
            })
            .collect();
        let area = triangle_area_or_zero(&verts[0], &verts[1], &verts[2]);
        assert!((area - FRAC_PI_2).abs() < 1e-9);
        assert!(boroczky_mc_check(3, rho, 10_000, 2024));
    }

    #[test]
    fn four_dim_simplex_check_passes() {
        assert!(boroczky_mc_check(4, 1.0, 200, 55));
    }

    #[test]
    fn four_dim_regular_simplex_volume_is_stable() {
        // Two independent sample streams agree within combined error bars,
        // guarding the estimator the check leans on.
        let s = 1.0f64.sin();
        let c = 1.0f64.cos();
        let k = 1.0 / 3f64.sqrt();
        let reg: Vec<Vec<f64>> = [[k, k, k], [k, -k, -k], [-k, k, -k], [-k, -k, k]]
            .iter()
            .map(|u| vec![s * u[0], s * u[1], s * u[2], c])
            .collect();
        let mut r1 = ChaCha8Rng::seed_from_u64(1);
        let mut r2 = ChaCha8Rng::seed_from_u64(2);
        let (v1, s1) = simplex_volume_mc_s3(&reg, 400_000, &mut r1);
        let (v2, s2) = simplex_volume_mc_s3(&reg, 400_000, &mut r2);
        assert!(v1 > 0.0 && v2 > 0.0);
        assert!((v1 - v2).abs() < 4.0 * (s1 * s1 + s2 * s2).sqrt());
    }
}
