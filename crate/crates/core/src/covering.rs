//! Totally separable coverings: congruent caps covering, cell by cell, a
//! tiling generated by great circles, with each two-dimensional cell
//! assigned its own cap.  Verification checks a supplied assignment or
//! finds one by bipartite matching; the thinnest such covering has density
//! at least the closed-form bound of [`Delta_bound`].

use crate::arrangement::{ArrangementError, Cell, Tiling};
use crate::geom::{GeomError, SphericalCap};
use crate::tol::Tolerances;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

#[derive(Debug, Clone, PartialEq)]
pub enum CoveringError {
    /// Caps that must be congruent have different radii.
    MixedRadii,
    /// Scalar argument, cap radius, or assignment shape outside the
    /// operation's domain.
    OutOfDomain,
    Geom(GeomError),
    Arrangement(ArrangementError),
}

impl fmt::Display for CoveringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoveringError::MixedRadii => write!(f, "caps are not congruent"),
            CoveringError::OutOfDomain => {
                write!(f, "argument outside the operation's domain")
            }
            CoveringError::Geom(e) => write!(f, "{e}"),
            CoveringError::Arrangement(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CoveringError {}

impl From<GeomError> for CoveringError {
    fn from(e: GeomError) -> Self {
        CoveringError::Geom(e)
    }
}

impl From<ArrangementError> for CoveringError {
    fn from(e: ArrangementError) -> Self {
        CoveringError::Arrangement(e)
    }
}

/// A candidate totally separable covering: congruent caps of radius below
/// a half turn, the tiling whose cells they must cover, and optionally a
/// fixed cell-to-cap assignment.  Construction validates shape only;
/// covering itself is decided by [`verify_ts_covering`].
#[derive(Debug, Clone, PartialEq)]
pub struct TSCovering {
    pub caps: Vec<SphericalCap>,
    pub tiling: Tiling,
    pub assignment: Option<Vec<usize>>,
}

impl TSCovering {
    pub fn new(
        caps: Vec<SphericalCap>,
        tiling: Tiling,
        assignment: Option<Vec<usize>>,
        tol: &Tolerances,
    ) -> Result<Self, CoveringError> {
        let Some(first) = caps.first() else {
            return Err(CoveringError::OutOfDomain);
        };
        let radius = first.radius();
        if radius >= FRAC_PI_2 {
            return Err(CoveringError::OutOfDomain);
        }
        if caps.iter().any(|c| (c.radius() - radius).abs() > tol.eps_angle) {
            return Err(CoveringError::MixedRadii);
        }
        if let Some(a) = &assignment {
            if a.len() != tiling.cells.len() || a.iter().any(|&q| q >= caps.len()) {
                return Err(CoveringError::OutOfDomain);
            }
        }
        Ok(TSCovering { caps, tiling, assignment })
    }

    pub fn radius(&self) -> f64 {
        self.caps[0].radius()
    }

    pub fn verify(&self, tol: &Tolerances) -> Result<CoveringReport, CoveringError> {
        verify_ts_covering(&self.caps, &self.tiling, self.assignment.as_deref(), tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringReport {
    pub is_ts_covering: bool,
    /// `m (1 - cos rho) / 2`, total cap area over sphere area.
    pub density: f64,
    /// Cells with no valid distinct cap: containment failures, duplicate
    /// cap uses, and matching shortfalls.
    pub uncovered_cells: Vec<usize>,
    /// The verified or matched cell-to-cap map when the covering stands.
    pub assignment: Option<Vec<usize>>,
}

/// Whole-cell containment: every vertex and every side midpoint of the
/// cell inside the cap.  Vertices alone suffice for cells that are hulls
/// of their vertices (caps this size are convex); the midpoints extend the
/// test soundly to lune cells, whose antipodal vertex pairs no such cap
/// admits anyway.
fn cell_in_cap(t: &Tiling, cell: &Cell, cap: &SphericalCap, tol: &Tolerances) -> bool {
    cell.vertex_indices.iter().all(|&v| cap.contains(t.vertices[v], tol.eps_angle))
        && cell.sides.iter().all(|s| cap.contains(t.edges[s.edge].midpoint, tol.eps_angle))
}

fn augment(
    cell: usize,
    covers: &[Vec<bool>],
    cap_owner: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for cap in 0..cap_owner.len() {
        if !covers[cell][cap] || visited[cap] {
            continue;
        }
        visited[cap] = true;
        let free = match cap_owner[cap] {
            None => true,
            Some(owner) => augment(owner, covers, cap_owner, visited),
        };
        if free {
            cap_owner[cap] = Some(cell);
            return true;
        }
    }
    false
}

/// Verifies that the caps cover the tiling's cells injectively.
///
/// With an assignment, each cell's cap must contain it and no cap may
/// serve two cells; offenders are listed in `uncovered_cells`.  Without
/// one, a maximum bipartite matching is built by augmenting paths in
/// deterministic index order, and the covering stands exactly when every
/// cell is matched.
pub fn verify_ts_covering(
    caps: &[SphericalCap],
    tiling: &Tiling,
    assignment: Option<&[usize]>,
    tol: &Tolerances,
) -> Result<CoveringReport, CoveringError> {
    let Some(first) = caps.first() else {
        return Err(CoveringError::OutOfDomain);
    };
    let rho = first.radius();
    if caps.iter().any(|c| (c.radius() - rho).abs() > tol.eps_angle) {
        return Err(CoveringError::MixedRadii);
    }
    let m = caps.len();
    let ncells = tiling.cells.len();
    let density = m as f64 * (1.0 - rho.cos()) / 2.0;

    let report = |uncovered: Vec<usize>, found: Option<Vec<usize>>| CoveringReport {
        is_ts_covering: uncovered.is_empty(),
        density,
        uncovered_cells: uncovered,
        assignment: found,
    };

    match assignment {
        Some(a) => {
            if a.len() != ncells || a.iter().any(|&q| q >= m) {
                return Err(CoveringError::OutOfDomain);
            }
            let mut used = vec![false; m];
            let mut uncovered = Vec::new();
            for (i, cell) in tiling.cells.iter().enumerate() {
                let ok = !used[a[i]] && cell_in_cap(tiling, cell, &caps[a[i]], tol);
                used[a[i]] = true;
                if !ok {
                    uncovered.push(i);
                }
            }
            let good = uncovered.is_empty();
            Ok(report(uncovered, good.then(|| a.to_vec())))
        }
        None => {
            let covers: Vec<Vec<bool>> = tiling
                .cells
                .iter()
                .map(|cell| {
                    (0..m).map(|q| cell_in_cap(tiling, cell, &caps[q], tol)).collect()
                })
                .collect();
            let mut cap_owner = vec![None; m];
            let mut uncovered = Vec::new();
            for cell in 0..ncells {
                let mut visited = vec![false; m];
                if !augment(cell, &covers, &mut cap_owner, &mut visited) {
                    uncovered.push(cell);
                }
            }
            let found = uncovered.is_empty().then(|| {
                let mut a = vec![usize::MAX; ncells];
                for (cap, owner) in cap_owner.iter().enumerate() {
                    if let Some(cell) = owner {
                        a[*cell] = cap;
                    }
                }
                a
            });
            Ok(report(uncovered, found))
        }
    }
}

/// Lower bound for the density of any totally separable covering by caps
/// of radius `rho`: `pi (1 - cos rho) / (4 arctan(1/cos rho) - pi)`.
///
/// Equals the cap area divided by the area of its inscribed regular
/// quadrangle; strictly decreasing on `(0, pi/2)` with limits `pi/2` at
/// `0+` and `1` at `pi/2-`.
#[allow(non_snake_case)]
pub fn Delta_bound(rho: f64) -> Result<f64, CoveringError> {
    if !rho.is_finite() || rho <= 0.0 || rho >= FRAC_PI_2 {
        return Err(CoveringError::OutOfDomain);
    }
    Ok(PI * (1.0 - rho.cos()) / (4.0 * (1.0 / rho.cos()).atan() - PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{
        build_tiling, cell_metrics, covering_cell_lower_bound, named_arrangement,
    };
    use crate::geom::UnitVector;
    use crate::metrics::{polygon_area, SphericalPolygon};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    /// Caps of radius `rho` at the circumcenters of the named tiling.
    fn circumcenter_caps(name: &str, rho: f64) -> (Vec<SphericalCap>, Tiling) {
        let circles = named_arrangement(name, None).unwrap();
        let tiling = build_tiling(&circles, &tol()).unwrap();
        let metrics = cell_metrics(&tiling, &tol()).unwrap();
        let caps = metrics
            .per_cell
            .iter()
            .map(|c| SphericalCap::new(c.circumcenter, rho).unwrap())
            .collect();
        (caps, tiling)
    }

    #[test]
    fn octant_covering_verifies_both_routes() {
        let rho = (1.0f64 / 3f64.sqrt()).acos();
        let (caps, tiling) = circumcenter_caps("orthogonal3", rho);
        assert_eq!(caps.len(), 8);

        let identity: Vec<usize> = (0..8).collect();
        let with = verify_ts_covering(&caps, &tiling, Some(&identity), &tol()).unwrap();
        assert!(with.is_ts_covering);
        assert!(with.uncovered_cells.is_empty());
        assert!((with.density - 4.0 * (1.0 - (1.0f64 / 3f64.sqrt()))).abs() < 1e-12);

        let without = verify_ts_covering(&caps, &tiling, None, &tol()).unwrap();
        assert!(without.is_ts_covering);
        assert_eq!(without.assignment, Some(identity));
    }

    #[test]
    fn cuboctahedral_covering_of_fourteen_cells() {
        let (caps, tiling) = circumcenter_caps("cube_poles4", core::f64::consts::FRAC_PI_4);
        assert_eq!(caps.len(), 14);
        let r = verify_ts_covering(&caps, &tiling, None, &tol()).unwrap();
        assert!(r.is_ts_covering);
        // The squares are inscribed exactly: their circumradius is pi/4.
        let metrics = cell_metrics(&tiling, &tol()).unwrap();
        assert!((metrics.max_circumradius - core::f64::consts::FRAC_PI_4).abs() < 1e-9);

        // Pigeonhole: thirteen caps cannot cover fourteen cells.
        let r = verify_ts_covering(&caps[..13], &tiling, None, &tol()).unwrap();
        assert!(!r.is_ts_covering);
        assert_eq!(r.uncovered_cells.len(), 1);
        assert!(r.assignment.is_none());
    }

    #[test]
    fn matching_resolves_permuted_caps() {
        let rho = (1.0f64 / 3f64.sqrt()).acos();
        let (mut caps, tiling) = circumcenter_caps("orthogonal3", rho);
        caps.reverse();
        // Octant circumcenters are distinct, so identity now misassigns
        // every cell; the matcher must recover the reversal.
        let identity: Vec<usize> = (0..8).collect();
        let with = verify_ts_covering(&caps, &tiling, Some(&identity), &tol()).unwrap();
        assert!(!with.is_ts_covering);
        assert_eq!(with.uncovered_cells.len(), 8);
        let without = verify_ts_covering(&caps, &tiling, None, &tol()).unwrap();
        assert!(without.is_ts_covering);
        let a = without.assignment.unwrap();
        for (cell, cap) in a.iter().enumerate() {
            assert_eq!(*cap, 7 - cell);
        }
    }

    #[test]
    fn duplicate_assignment_fails() {
        let rho = (1.0f64 / 3f64.sqrt()).acos();
        let (caps, tiling) = circumcenter_caps("orthogonal3", rho);
        // Enlarge so a single cap could geometrically cover two cells,
        // then assign one cap twice: injectivity must still reject it.
        let big: Vec<SphericalCap> = caps
            .iter()
            .map(|c| SphericalCap::new(c.center(), 1.5).unwrap())
            .collect();
        let mut a: Vec<usize> = (0..8).collect();
        a[3] = 0;
        let r = verify_ts_covering(&big, &tiling, Some(&a), &tol()).unwrap();
        assert!(!r.is_ts_covering);
        assert!(r.uncovered_cells.contains(&3));
    }

    #[test]
    fn circumcenter_caps_cover_whenever_radius_reaches_circumradius() {
        for name in ["orthogonal3", "cube_poles4", "tetrahedral6", "octahedral9"] {
            let circles = named_arrangement(name, None).unwrap();
            let tiling = build_tiling(&circles, &tol()).unwrap();
            let metrics = cell_metrics(&tiling, &tol()).unwrap();
            let rho = metrics.max_circumradius;
            assert!(rho < FRAC_PI_2, "{name}");
            let caps: Vec<SphericalCap> = metrics
                .per_cell
                .iter()
                .map(|c| SphericalCap::new(c.circumcenter, rho).unwrap())
                .collect();
            let r = verify_ts_covering(&caps, &tiling, None, &tol()).unwrap();
            assert!(r.is_ts_covering, "{name}");
            // Identity assignment agrees with the matcher's verdict.
            let identity: Vec<usize> = (0..caps.len()).collect();
            let with = verify_ts_covering(&caps, &tiling, Some(&identity), &tol()).unwrap();
            assert!(with.is_ts_covering, "{name}");
        }
    }

    #[test]
    fn error_and_shape_cases() {
        let rho = (1.0f64 / 3f64.sqrt()).acos();
        let (caps, tiling) = circumcenter_caps("orthogonal3", rho);
        let mut mixed = caps.clone();
        mixed[2] = SphericalCap::new(mixed[2].center(), rho - 0.1).unwrap();
        assert_eq!(
            verify_ts_covering(&mixed, &tiling, None, &tol()).unwrap_err(),
            CoveringError::MixedRadii
        );
        assert_eq!(
            verify_ts_covering(&[], &tiling, None, &tol()).unwrap_err(),
            CoveringError::OutOfDomain
        );
        // Assignment of the wrong length or with an out-of-range cap.
        let short = vec![0usize; 7];
        assert_eq!(
            verify_ts_covering(&caps, &tiling, Some(&short), &tol()).unwrap_err(),
            CoveringError::OutOfDomain
        );
        let mut wild: Vec<usize> = (0..8).collect();
        wild[0] = 8;
        assert_eq!(
            verify_ts_covering(&caps, &tiling, Some(&wild), &tol()).unwrap_err(),
            CoveringError::OutOfDomain
        );

        // The carrier type enforces the same shapes plus the radius bound.
        assert!(TSCovering::new(caps.clone(), tiling.clone(), None, &tol()).is_ok());
        let c = TSCovering::new(caps.clone(), tiling.clone(), Some((0..8).collect()), &tol())
            .unwrap();
        assert!((c.radius() - rho).abs() < 1e-15);
        assert!(c.verify(&tol()).unwrap().is_ts_covering);
        assert_eq!(
            TSCovering::new(mixed, tiling.clone(), None, &tol()).unwrap_err(),
            CoveringError::MixedRadii
        );
        let hemis: Vec<SphericalCap> = caps
            .iter()
            .map(|c| SphericalCap::new(c.center(), FRAC_PI_2).unwrap())
            .collect();
        assert_eq!(
            TSCovering::new(hemis, tiling.clone(), None, &tol()).unwrap_err(),
            CoveringError::OutOfDomain
        );
        assert_eq!(
            TSCovering::new(caps, tiling, Some(vec![0; 5]), &tol()).unwrap_err(),
            CoveringError::OutOfDomain
        );
    }

    #[test]
    fn lune_cells_are_never_covered() {
        // Two orthogonal circles make four lunes; their vertex pairs are
        // antipodal, out of reach of any cap of radius below a half turn.
        let circles = named_arrangement("orthogonal2", None).unwrap();
        let tiling = build_tiling(&circles, &tol()).unwrap();
        assert!(tiling.cells.iter().all(|c| c.is_lune()));
        let caps: Vec<SphericalCap> = tiling
            .cells
            .iter()
            .map(|cell| {
                let m = tiling.edges[cell.sides[0].edge].midpoint;
                SphericalCap::new(m, 1.57).unwrap()
            })
            .collect();
        let r = verify_ts_covering(&caps, &tiling, None, &tol()).unwrap();
        assert!(!r.is_ts_covering);
        assert_eq!(r.uncovered_cells, vec![0, 1, 2, 3]);
    }

    #[test]
    fn density_formula_matches_cap_areas() {
        let rho = 0.8;
        let (caps, tiling) = circumcenter_caps("cube_poles4", rho);
        let r = verify_ts_covering(&caps, &tiling, None, &tol()).unwrap();
        let total: f64 = caps.iter().map(|c| c.area()).sum();
        assert!((r.density - total / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn delta_bound_shape_and_limits() {
        assert!((Delta_bound(1e-4).unwrap() - FRAC_PI_2).abs() < 1e-3);
        assert!((Delta_bound(FRAC_PI_2 - 1e-4).unwrap() - 1.0).abs() < 1e-3);
        let mut prev = f64::INFINITY;
        for t in 1..200 {
            let rho = t as f64 * FRAC_PI_2 / 200.0;
            let d = Delta_bound(rho).unwrap();
            assert!(d < prev);
            assert!(d > 1.0);
            prev = d;
        }
        for bad in [0.0, -0.1, FRAC_PI_2, 2.0] {
            assert_eq!(Delta_bound(bad).unwrap_err(), CoveringError::OutOfDomain);
        }
    }

    #[test]
    fn delta_bound_equals_cap_over_inscribed_quadrangle() {
        // Independent route: build the regular quadrangle inscribed in a
        // cap of radius rho and compare cap area over polygon area with
        // the closed form; also cross-check through the cell-count bound,
        // which uses the same quadrangle area.
        for rho in [0.3, 0.7, 1.0, 1.4] {
            let verts: Vec<UnitVector> = (0..4)
                .map(|t| UnitVector::sph(rho, t as f64 * FRAC_PI_2))
                .collect();
            let square = SphericalPolygon::new(verts, &tol()).unwrap();
            let cap_area = 2.0 * PI * (1.0 - rho.cos());
            let direct = cap_area / polygon_area(&square);
            let closed = Delta_bound(rho).unwrap();
            assert!((direct - closed).abs() < 1e-9, "rho = {rho}");
            let via_cells =
                (1.0 - rho.cos()) / 2.0 * covering_cell_lower_bound(rho).unwrap();
            assert!((via_cells - closed).abs() < 1e-12, "rho = {rho}");
        }
    }

    #[test]
    fn verified_coverings_sit_above_the_bound() {
        let cases = [
            ("orthogonal3", (1.0f64 / 3f64.sqrt()).acos()),
            ("cube_poles4", core::f64::consts::FRAC_PI_4),
        ];
        for (name, rho) in cases {
            let (caps, tiling) = circumcenter_caps(name, rho);
            let r = verify_ts_covering(&caps, &tiling, None, &tol()).unwrap();
            assert!(r.is_ts_covering, "{name}");
            assert!(r.density >= Delta_bound(rho).unwrap() - 1e-9, "{name}");
        }
    }
}
