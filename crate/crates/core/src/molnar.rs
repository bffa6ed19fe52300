//! Delaunay cells of a spherical point system, the bridge modification that
//! re-homes separating sides, and the center-split refinement used in
//! density accounting.
//!
//! The Delaunay cells of a finite point system are the central projections
//! of the faces of its convex hull (the origin must be strictly interior).
//! Each cell carries a circumscribed cap of radius below `pi/2` whose
//! interior is free of system points.  A cell that does not contain its
//! circumcenter has exactly one *separating side*; that side is removed and
//! replaced by the two-arc *bridge* through the circumcenter, which lies in
//! the neighboring cell of strictly larger circumradius.  The bridged cells
//! tile the sphere again, and splitting each one from its circumcenter
//! produces isosceles pieces whose coverage by packing caps admits a
//! uniform density bound.

use crate::arrangement::EPS_MERGE;
use crate::geom::{cross3, norm3, sdist, GeomError, SphericalCap, UnitVector};
use crate::hull::hull_faces;
use crate::metrics::{walk_metrics, MetricsError};
use crate::tol::Tolerances;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, SQRT_2};
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Contacts closer than this to an arc endpoint do not count as crossings
/// when the bridge arcs are audited against each other and the kept sides.
const EPS_TOUCH: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub enum MolnarError {
    /// Fewer than four points, an affinely degenerate system, or a hull
    /// that does not strictly enclose the origin.
    DegeneratePointSystem,
    /// Two input points closer than the merge threshold.
    DuplicatePoints(usize, usize),
    /// The bridge construction violated one of its structural guarantees;
    /// the payload names the violated guarantee.
    BridgeCrossing(&'static str),
    /// The indexed cell fits neither refined shape within tolerance.
    ClassificationFailure { cell: usize },
    /// Scalar argument outside the domain of the construction.
    OutOfDomain,
    Metrics(MetricsError),
    Geom(GeomError),
}

impl fmt::Display for MolnarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MolnarError::DegeneratePointSystem => {
                write!(f, "point system is degenerate or does not span the sphere")
            }
            MolnarError::DuplicatePoints(i, j) => {
                write!(f, "points {i} and {j} coincide")
            }
            MolnarError::BridgeCrossing(why) => write!(f, "bridge construction failed: {why}"),
            MolnarError::ClassificationFailure { cell } => {
                write!(f, "cell {cell} fits neither refined shape")
            }
            MolnarError::OutOfDomain => write!(f, "argument outside the construction's domain"),
            MolnarError::Metrics(e) => write!(f, "{e}"),
            MolnarError::Geom(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MolnarError {}

impl From<MetricsError> for MolnarError {
    fn from(e: MetricsError) -> Self {
        MolnarError::Metrics(e)
    }
}

impl From<GeomError> for MolnarError {
    fn from(e: GeomError) -> Self {
        MolnarError::Geom(e)
    }
}

/// A finite system of pairwise distinct points on the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSystem {
    points: Vec<UnitVector>,
}

impl PointSystem {
    pub fn new(points: Vec<UnitVector>) -> Result<Self, MolnarError> {
        if points.len() < 4 {
            return Err(MolnarError::DegeneratePointSystem);
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if sdist(points[i], points[j]) <= EPS_MERGE {
                    return Err(MolnarError::DuplicatePoints(i, j));
                }
            }
        }
        Ok(PointSystem { points })
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A Delaunay cell: the central projection of one hull face.
#[derive(Debug, Clone, PartialEq)]
pub struct DCell {
    /// Point indices, counterclockwise as seen from outside.
    pub vertices: Vec<usize>,
    /// Circumscribed cap; its interior contains no system point.
    pub circumcap: SphericalCap,
    /// Index `k` of the side `(v_k, v_{k+1})` separating the cell from its
    /// circumcenter, when the cell does not contain the circumcenter.
    pub separating_side: Option<usize>,
}

/// Fate of one Delaunay side under the bridge modification.
#[derive(Debug, Clone, PartialEq)]
pub enum SideFate {
    /// The side survives into the modified complex.
    Kept,
    /// The side was this cell's separating side; the cell grows across it
    /// to its own circumcenter.
    BridgedOut,
    /// The neighbor's bridge through `apex` (the neighbor's circumcenter)
    /// replaces this side; the cell loses the triangle cut off by it.
    Invaded { apex: UnitVector },
}

/// A cell of the modified complex: a Delaunay cell with every separating
/// side replaced by its bridge.
#[derive(Debug, Clone, PartialEq)]
pub struct MCell {
    /// Vertices of the originating Delaunay cell.
    pub base: Vec<usize>,
    /// Circumcap of the originating Delaunay cell.
    pub circumcap: SphericalCap,
    /// Per-side fates, aligned with the sides of `base`.
    pub fates: Vec<SideFate>,
    /// Full counterclockwise boundary walk, bridge apexes included.
    pub boundary: Vec<UnitVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinedKind {
    /// An unsplit triangle cell containing its circumcenter.
    TypeA,
    /// An isosceles piece of a center-split cell (possibly minus the
    /// isosceles piece invading it).
    TypeB,
}

/// One piece of the refined decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinedCell {
    pub kind: RefinedKind,
    /// Counterclockwise boundary walk (type B difference pieces have a
    /// reflex vertex at the invading apex).
    pub boundary: Vec<UnitVector>,
    /// Which walk vertices are packing centers; aligned with `boundary`.
    pub center_vertex: Vec<bool>,
    /// Sum of the interior angles at packing-center vertices.
    pub phi: f64,
    /// Area of the piece.
    pub area: f64,
}

/// Circumradius threshold `arcsin(sqrt(2) sin rho)` below which every cell
/// of a saturated packing with caps of radius `rho` is an unsplit triangle.
pub fn saturation_radius(rho: f64) -> Result<f64, MolnarError> {
    if !rho.is_finite() || rho <= 0.0 || rho > FRAC_PI_4 {
        return Err(MolnarError::OutOfDomain);
    }
    Ok((SQRT_2 * rho.sin()).asin())
}

/// Inward pole of the directed side `(a, b)` of a counterclockwise cell.
fn side_pole(a: UnitVector, b: UnitVector) -> Result<UnitVector, MolnarError> {
    UnitVector::from_array(a.cross_raw(b)).map_err(MolnarError::Geom)
}

/// Delaunay cells of the point system.
///
/// Fails with [`MolnarError::DegeneratePointSystem`] when the hull is flat
/// or the origin is not strictly interior (the system must not fit in a
/// closed hemisphere).  Cocircular point sets produce merged polygonal
/// cells.  Output order and vertex rotations are canonical, so equal
/// inputs give identical output.
pub fn delaunay(x: &PointSystem, tol: &Tolerances) -> Result<Vec<DCell>, MolnarError> {
    let pts = x.points();
    let faces = hull_faces(pts).ok_or(MolnarError::DegeneratePointSystem)?;
    let mut cells = Vec::with_capacity(faces.len());
    for f in &faces {
        let center = UnitVector::from_array(f.normal)?;
        let radius = f.offset.clamp(-1.0, 1.0).acos();
        let s = f.vertices.len();
        let pivot = (0..s)
            .min_by_key(|&k| f.vertices[k])
            .expect("faces have at least three vertices");
        let vertices: Vec<usize> = (0..s).map(|k| f.vertices[(pivot + k) % s]).collect();
        cells.push(DCell {
            vertices,
            circumcap: SphericalCap::new(center, radius)?,
            separating_side: None,
        });
    }
    cells.sort_by(|a, b| a.vertices.cmp(&b.vertices));

    for cell in &mut cells {
        let o = cell.circumcap.center();
        let s = cell.vertices.len();
        let mut separating = None;
        for k in 0..s {
            let w = side_pole(pts[cell.vertices[k]], pts[cell.vertices[(k + 1) % s]])?;
            if w.dot(o) < -tol.eps_angle {
                if separating.is_some() {
                    // A convex cell inscribed in a cap of radius below
                    // pi/2 can be separated from its circumcenter by at
                    // most one side.
                    return Err(MolnarError::DegeneratePointSystem);
                }
                separating = Some(k);
            }
        }
        cell.separating_side = separating;
    }
    Ok(cells)
}

/// True when the open interiors of the geodesic arcs `(a1, a2)` and
/// `(b1, b2)` (each shorter than `pi`) intersect; contacts at or near
/// endpoints do not count.
fn arcs_cross_interior(a1: UnitVector, a2: UnitVector, b1: UnitVector, b2: UnitVector) -> bool {
    fn interior(x: UnitVector, p: UnitVector, q: UnitVector) -> bool {
        sdist(p, x) + sdist(x, q) <= sdist(p, q) + 1e-9
            && sdist(p, x) > EPS_TOUCH
            && sdist(x, q) > EPS_TOUCH
    }
    let cross = cross3(a1.cross_raw(a2), b1.cross_raw(b2));
    if norm3(cross) < 1e-12 {
        // Same great circle: overlap shows up as an endpoint of one arc
        // interior to the other.
        return interior(b1, a1, a2)
            || interior(b2, a1, a2)
            || interior(a1, b1, b2)
            || interior(a2, b1, b2);
    }
    let c = UnitVector::from_array(cross).expect("crossing candidate is nonzero");
    for cand in [c, c.antipode()] {
        if interior(cand, a1, a2) && interior(cand, b1, b2) {
            return true;
        }
    }
    false
}

/// The modified complex: every separating side is removed and its two
/// cells re-bounded by the bridge through the separated circumcenter.
///
/// Audits the structural guarantees of the construction — the invaded
/// neighbor has strictly larger circumradius and its circumdisk swallows
/// the bridge apex, separating sides never face each other, and bridge
/// arcs meet each other and the kept sides only at endpoints — and reports
/// the violated guarantee as [`MolnarError::BridgeCrossing`].
pub fn molnar(
    x: &PointSystem,
    cells: &[DCell],
    tol: &Tolerances,
) -> Result<Vec<MCell>, MolnarError> {
    let pts = x.points();
    let mut owner: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    for (ci, cell) in cells.iter().enumerate() {
        let s = cell.vertices.len();
        for k in 0..s {
            let e = (cell.vertices[k], cell.vertices[(k + 1) % s]);
            if owner.insert(e, (ci, k)).is_some() {
                return Err(MolnarError::DegeneratePointSystem);
            }
        }
    }

    let mut fates: Vec<Vec<SideFate>> = cells
        .iter()
        .map(|c| vec![SideFate::Kept; c.vertices.len()])
        .collect();
    let mut bridges: Vec<[UnitVector; 3]> = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let Some(k) = cell.separating_side else {
            continue;
        };
        let s = cell.vertices.len();
        let (a, b) = (cell.vertices[k], cell.vertices[(k + 1) % s]);
        let &(cj, kj) = owner
            .get(&(b, a))
            .ok_or(MolnarError::DegeneratePointSystem)?;
        if cells[cj].separating_side == Some(kj) {
            return Err(MolnarError::BridgeCrossing("separating sides face each other"));
        }
        if cells[cj].circumcap.radius() <= cells[ci].circumcap.radius() - tol.eps_angle {
            return Err(MolnarError::BridgeCrossing(
                "invaded cell lacks a larger circumradius",
            ));
        }
        let apex = cell.circumcap.center();
        // Both circumcenters sit on the bisector of the shared side, the
        // apex between the side's midpoint and the neighbor's center, so
        // the apex always falls inside the neighbor's circumdisk — even
        // when a cascade of separating sides puts it outside the neighbor
        // cell itself.
        if sdist(apex, cells[cj].circumcap.center())
            > cells[cj].circumcap.radius() + tol.eps_angle
        {
            return Err(MolnarError::BridgeCrossing(
                "bridge apex outside the neighbor's circumdisk",
            ));
        }
        fates[ci][k] = SideFate::BridgedOut;
        fates[cj][kj] = SideFate::Invaded { apex };
        bridges.push([pts[a], apex, pts[b]]);
    }

    let arcs = |br: &[UnitVector; 3]| [(br[0], br[1]), (br[1], br[2])];
    for i in 0..bridges.len() {
        for j in (i + 1)..bridges.len() {
            for (a1, a2) in arcs(&bridges[i]) {
                for (b1, b2) in arcs(&bridges[j]) {
                    if arcs_cross_interior(a1, a2, b1, b2) {
                        return Err(MolnarError::BridgeCrossing("bridge arcs cross"));
                    }
                }
            }
        }
    }
    for (&(a, b), &(ci, k)) in &owner {
        if a < b && fates[ci][k] == SideFate::Kept {
            for br in &bridges {
                for (b1, b2) in arcs(br) {
                    if arcs_cross_interior(pts[a], pts[b], b1, b2) {
                        return Err(MolnarError::BridgeCrossing("bridge crosses a kept side"));
                    }
                }
            }
        }
    }

    let mut out = Vec::with_capacity(cells.len());
    for (ci, cell) in cells.iter().enumerate() {
        let s = cell.vertices.len();
        let mut boundary = Vec::with_capacity(s + 1);
        for k in 0..s {
            boundary.push(pts[cell.vertices[k]]);
            match &fates[ci][k] {
                SideFate::Kept => {}
                SideFate::BridgedOut => boundary.push(cell.circumcap.center()),
                SideFate::Invaded { apex } => boundary.push(*apex),
            }
        }
        out.push(MCell {
            base: cell.vertices.clone(),
            circumcap: cell.circumcap,
            fates: fates[ci].clone(),
            boundary,
        });
    }
    Ok(out)
}

/// Center-split refinement of the modified complex for cap radius `rho`.
///
/// Cells with circumradius below [`saturation_radius`] pass through whole:
/// they must be triangles with all sides kept, sides at least `2 rho`, and
/// circumcenter inside (type A).  Every other cell is split from its
/// circumcenter into one piece per non-bridged side: an isosceles triangle
/// over a kept side, or that triangle minus the invading isosceles triangle
/// over an invaded side (type B).  A cell fitting neither shape is reported
/// as [`MolnarError::ClassificationFailure`], never guessed.
pub fn refine(
    x: &PointSystem,
    cells: &[MCell],
    rho: f64,
    tol: &Tolerances,
) -> Result<Vec<RefinedCell>, MolnarError> {
    if !rho.is_finite() || rho <= 0.0 || rho >= FRAC_PI_4 {
        return Err(MolnarError::OutOfDomain);
    }
    let rr = saturation_radius(rho)?;
    let pts = x.points();
    let mut out = Vec::new();
    for (ci, m) in cells.iter().enumerate() {
        let s = m.base.len();
        let r = m.circumcap.radius();
        let o = m.circumcap.center();
        if r < rr {
            let all_kept = m.fates.iter().all(|f| *f == SideFate::Kept);
            if s != 3 || !all_kept {
                return Err(MolnarError::ClassificationFailure { cell: ci });
            }
            let verts = [pts[m.base[0]], pts[m.base[1]], pts[m.base[2]]];
            for k in 0..3 {
                if sdist(verts[k], verts[(k + 1) % 3]) < 2.0 * rho - tol.eps_angle {
                    return Err(MolnarError::ClassificationFailure { cell: ci });
                }
                if side_pole(verts[k], verts[(k + 1) % 3])?.dot(o) < -tol.eps_angle {
                    return Err(MolnarError::ClassificationFailure { cell: ci });
                }
            }
            let (angles, area) = walk_metrics(&verts, tol)?;
            out.push(RefinedCell {
                kind: RefinedKind::TypeA,
                boundary: verts.to_vec(),
                center_vertex: vec![true; 3],
                phi: angles.iter().sum(),
                area,
            });
            continue;
        }
        for k in 0..s {
            let a = pts[m.base[k]];
            let b = pts[m.base[(k + 1) % s]];
            match &m.fates[k] {
                SideFate::BridgedOut => {}
                SideFate::Kept => {
                    if sdist(a, b) < 2.0 * rho - tol.eps_angle {
                        return Err(MolnarError::ClassificationFailure { cell: ci });
                    }
                    let boundary = vec![a, b, o];
                    let (angles, area) = walk_metrics(&boundary, tol)?;
                    out.push(RefinedCell {
                        kind: RefinedKind::TypeB,
                        boundary,
                        center_vertex: vec![true, true, false],
                        phi: angles[0] + angles[1],
                        area,
                    });
                }
                SideFate::Invaded { apex } => {
                    // The invading cell has a separating side, which forces
                    // its circumradius (the inner legs here) to the
                    // saturation threshold or beyond.
                    let inner = sdist(*apex, a).min(sdist(*apex, b));
                    if inner < rr - tol.eps_angle {
                        return Err(MolnarError::ClassificationFailure { cell: ci });
                    }
                    let boundary = vec![a, *apex, b, o];
                    let (angles, area) = walk_metrics(&boundary, tol)?;
                    out.push(RefinedCell {
                        kind: RefinedKind::TypeB,
                        boundary,
                        center_vertex: vec![true, false, true, false],
                        phi: angles[0] + angles[2],
                        area,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Fraction of the piece covered by caps of radius `rho` centered at its
/// packing-center vertices: each such vertex contributes a sector, so the
/// covered area is `phi (1 - cos rho)`.
pub fn cell_density(cell: &RefinedCell, rho: f64) -> f64 {
    cell.phi * (1.0 - rho.cos()) / cell.area
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::triangle_metrics;
    use core::f64::consts::{FRAC_PI_2, PI};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn uv(x: f64, y: f64, z: f64) -> UnitVector {
        UnitVector::normalized(x, y, z).unwrap()
    }

    fn octahedron() -> PointSystem {
        PointSystem::new(vec![
            uv(1.0, 0.0, 0.0),
            uv(-1.0, 0.0, 0.0),
            uv(0.0, 1.0, 0.0),
            uv(0.0, -1.0, 0.0),
            uv(0.0, 0.0, 1.0),
            uv(0.0, 0.0, -1.0),
        ])
        .unwrap()
    }

    fn cube() -> PointSystem {
        let mut pts = Vec::new();
        for sx in [1.0, -1.0] {
            for sy in [1.0, -1.0] {
                for sz in [1.0, -1.0] {
                    pts.push(uv(sx, sy, sz));
                }
            }
        }
        PointSystem::new(pts).unwrap()
    }

    /// Octahedron plus one extra point pulled toward (1, 1, 1.2): the three
    /// hull faces around the extra point get circumcenters beyond their far
    /// sides, so the system has exactly three separating sides.
    fn seven_points() -> PointSystem {
        let mut pts = octahedron().points().to_vec();
        pts.push(uv(1.0, 1.0, 1.2));
        PointSystem::new(pts).unwrap()
    }

    /// Total area of the modified complex, via the boundary walks.
    fn total_area(cells: &[MCell]) -> f64 {
        cells
            .iter()
            .map(|m| walk_metrics(&m.boundary, &tol()).unwrap().1)
            .sum()
    }

    #[test]
    fn octahedron_delaunay() {
        let x = octahedron();
        let cells = delaunay(&x, &tol()).unwrap();
        assert_eq!(cells.len(), 8);
        let rc = (1.0 / 3f64.sqrt()).acos();
        for c in &cells {
            assert_eq!(c.vertices.len(), 3);
            assert!((c.circumcap.radius() - rc).abs() < 1e-12);
            assert_eq!(c.separating_side, None);
        }
        // Empty circumdisk, brute force.
        for c in &cells {
            for (i, &p) in x.points().iter().enumerate() {
                if !c.vertices.contains(&i) {
                    assert!(sdist(c.circumcap.center(), p) >= c.circumcap.radius() - 1e-9);
                }
            }
        }
        // With no separating sides the modified complex is the Delaunay
        // complex itself.
        let m = molnar(&x, &cells, &tol()).unwrap();
        assert_eq!(m.len(), 8);
        for (mc, dc) in m.iter().zip(&cells) {
            assert_eq!(mc.base, dc.vertices);
            assert!(mc.fates.iter().all(|f| *f == SideFate::Kept));
            assert_eq!(mc.boundary.len(), 3);
        }
        assert!((total_area(&m) - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn cube_delaunay_merges_cocircular_faces() {
        let x = cube();
        let cells = delaunay(&x, &tol()).unwrap();
        assert_eq!(cells.len(), 6, "cocircular quadruples merge into squares");
        let rc = (1.0 / 3f64.sqrt()).acos();
        for c in &cells {
            assert_eq!(c.vertices.len(), 4);
            assert!((c.circumcap.radius() - rc).abs() < 1e-12);
            assert_eq!(c.separating_side, None);
            // All four vertices really are on the circumcircle.
            for &v in &c.vertices {
                assert!((sdist(c.circumcap.center(), x.points()[v]) - rc).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn octahedron_refine_switches_type_at_the_threshold() {
        let x = octahedron();
        let cells = delaunay(&x, &tol()).unwrap();
        let m = molnar(&x, &cells, &tol()).unwrap();
        let rc = (1.0 / 3f64.sqrt()).acos();

        // rho = 0.63: threshold above the circumradius, cells pass through.
        assert!(saturation_radius(0.63).unwrap() > rc);
        let fine = refine(&x, &m, 0.63, &tol()).unwrap();
        assert_eq!(fine.len(), 8);
        for p in &fine {
            assert_eq!(p.kind, RefinedKind::TypeA);
            assert!((p.phi - 1.5 * PI).abs() < 1e-12, "octant angles are right");
            assert!((p.area - FRAC_PI_2).abs() < 1e-12);
            let d = cell_density(p, 0.63);
            assert!((d - 3.0 * (1.0 - 0.63f64.cos())).abs() < 1e-12);
        }
        let total: f64 = fine.iter().map(|p| p.area).sum();
        assert!((total - 4.0 * PI).abs() < 1e-9);

        // rho = 0.60: threshold below the circumradius, cells split into
        // three isosceles pieces each.
        assert!(saturation_radius(0.60).unwrap() < rc);
        let fine = refine(&x, &m, 0.60, &tol()).unwrap();
        assert_eq!(fine.len(), 24);
        for p in &fine {
            assert_eq!(p.kind, RefinedKind::TypeB);
            assert!((p.area - PI / 6.0).abs() < 1e-12, "a third of an octant");
            assert!((p.phi - FRAC_PI_2).abs() < 1e-12, "two pi/4 base angles");
        }
        let total: f64 = fine.iter().map(|p| p.area).sum();
        assert!((total - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn cube_refine_splits_squares() {
        let x = cube();
        let cells = delaunay(&x, &tol()).unwrap();
        let m = molnar(&x, &cells, &tol()).unwrap();
        let fine = refine(&x, &m, 0.56, &tol()).unwrap();
        assert_eq!(fine.len(), 24);
        let side = (1.0f64 / 3.0).acos();
        let rc = (1.0 / 3f64.sqrt()).acos();
        for p in &fine {
            assert_eq!(p.kind, RefinedKind::TypeB);
            assert_eq!(p.boundary.len(), 3);
            // Isosceles: base is a cube edge, legs are circumradii.
            assert!((sdist(p.boundary[0], p.boundary[1]) - side).abs() < 1e-12);
            assert!((sdist(p.boundary[2], p.boundary[0]) - rc).abs() < 1e-12);
            assert!((sdist(p.boundary[1], p.boundary[2]) - rc).abs() < 1e-12);
        }
        let total: f64 = fine.iter().map(|p| p.area).sum();
        assert!((total - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn seven_point_system_builds_three_bridges() {
        let x = seven_points();
        let cells = delaunay(&x, &tol()).unwrap();
        assert_eq!(cells.len(), 10);

        let separating: Vec<usize> = (0..cells.len())
            .filter(|&i| cells[i].separating_side.is_some())
            .collect();
        assert_eq!(separating.len(), 3);
        for &i in &separating {
            // Each separated cell touches the extra point (index 6).
            assert!(cells[i].vertices.contains(&6));
            // The separating side is the one not touching the extra point.
            let k = cells[i].separating_side.unwrap();
            let s = cells[i].vertices.len();
            assert_ne!(cells[i].vertices[k], 6);
            assert_ne!(cells[i].vertices[(k + 1) % s], 6);
        }

        // Empty circumdisk, brute force.
        for c in &cells {
            for (i, &p) in x.points().iter().enumerate() {
                if !c.vertices.contains(&i) {
                    assert!(sdist(c.circumcap.center(), p) >= c.circumcap.radius() - 1e-9);
                }
            }
        }

        let m = molnar(&x, &cells, &tol()).unwrap();
        let mut bridged = 0;
        let mut invaded = 0;
        for mc in &m {
            for f in &mc.fates {
                match f {
                    SideFate::BridgedOut => bridged += 1,
                    SideFate::Invaded { apex } => {
                        invaded += 1;
                        // The apex sits between the shared side's midpoint
                        // and this cell's circumcenter, strictly inside
                        // this cell's circumdisk.
                        assert!(
                            sdist(*apex, mc.circumcap.center()) < mc.circumcap.radius() - 1e-6
                        );
                    }
                    SideFate::Kept => {}
                }
            }
        }
        assert_eq!(bridged, 3);
        assert_eq!(invaded, 3);
        assert!((total_area(&m) - 4.0 * PI).abs() < 1e-9);

        // Bridged cells walk through their own circumcenter; invaded cells
        // pick up a reflex vertex at the invading apex.
        for mc in &m {
            if mc.fates.iter().any(|f| matches!(f, SideFate::Invaded { .. })) {
                let (angles, _) = walk_metrics(&mc.boundary, &tol()).unwrap();
                assert!(angles.iter().any(|&a| a > PI));
            }
        }
    }

    #[test]
    fn seven_point_refine_counts_and_conservation() {
        let x = seven_points();
        let cells = delaunay(&x, &tol()).unwrap();
        let m = molnar(&x, &cells, &tol()).unwrap();
        let fine = refine(&x, &m, 0.2, &tol()).unwrap();
        // 10 cells, 30 directed sides: 3 bridged away, 3 invaded
        // (4-vertex difference pieces), 24 kept (triangles).
        assert_eq!(fine.len(), 27);
        let quads = fine.iter().filter(|p| p.boundary.len() == 4).count();
        assert_eq!(quads, 3);
        assert!(fine.iter().all(|p| p.kind == RefinedKind::TypeB));
        let total: f64 = fine.iter().map(|p| p.area).sum();
        assert!((total - 4.0 * PI).abs() < 1e-9);
        // phi only counts packing centers: quads mask out apex and
        // circumcenter.
        for p in &fine {
            if p.boundary.len() == 4 {
                assert_eq!(p.center_vertex, vec![true, false, true, false]);
                let (angles, _) = walk_metrics(&p.boundary, &tol()).unwrap();
                assert!(angles[1] > PI, "invading apex is reflex");
                assert!((p.phi - angles[0] - angles[2]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_antipodal_system_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd1ce);
        let mut pts = Vec::new();
        for _ in 0..25 {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            let p = uv(s * phi.cos(), s * phi.sin(), z);
            pts.push(p);
            pts.push(p.antipode());
        }
        let x = PointSystem::new(pts).unwrap();
        let cells = delaunay(&x, &tol()).unwrap();
        assert!(cells.len() >= 4);
        for c in &cells {
            assert!(c.circumcap.radius() < FRAC_PI_2);
            for (i, &p) in x.points().iter().enumerate() {
                if !c.vertices.contains(&i) {
                    assert!(sdist(c.circumcap.center(), p) >= c.circumcap.radius() - 1e-9);
                }
            }
        }
        let area: f64 = cells
            .iter()
            .map(|c| {
                let vs: Vec<UnitVector> =
                    c.vertices.iter().map(|&v| x.points()[v]).collect();
                walk_metrics(&vs, &tol()).unwrap().1
            })
            .sum();
        assert!((area - 4.0 * PI).abs() < 1e-9);

        let m = molnar(&x, &cells, &tol()).unwrap();
        assert!((total_area(&m) - 4.0 * PI).abs() < 1e-9);

        // Determinism: the full pipeline reproduces itself.
        let cells2 = delaunay(&x, &tol()).unwrap();
        assert_eq!(cells, cells2);
        assert_eq!(m, molnar(&x, &cells2, &tol()).unwrap());
    }

    #[test]
    fn degenerate_systems_are_rejected()  {
        let e = PointSystem::new(vec![uv(1.0, 0.0, 0.0)]);
        assert_eq!(e.unwrap_err(), MolnarError::DegeneratePointSystem);

        let e = PointSystem::new(vec![
            uv(1.0, 0.0, 0.0),
            uv(0.0, 1.0, 0.0),
            uv(0.0, 0.0, 1.0),
            uv(1.0, 1e-12, 0.0),
        ]);
        assert_eq!(e.unwrap_err(), MolnarError::DuplicatePoints(0, 3));

        // Four points on one great circle: flat hull.
        let x = PointSystem::new(vec![
            uv(1.0, 0.0, 0.0),
            uv(0.0, 1.0, 0.0),
            uv(-1.0, 0.0, 0.0),
            uv(0.0, -1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(
            delaunay(&x, &tol()).unwrap_err(),
            MolnarError::DegeneratePointSystem
        );

        // A cluster near the north pole: hull misses the origin.
        let x = PointSystem::new(vec![
            uv(0.1, 0.0, 1.0),
            uv(-0.1, 0.0, 1.0),
            uv(0.0, 0.1, 1.0),
            uv(0.0, -0.1, 1.0),
        ])
        .unwrap();
        assert_eq!(
            delaunay(&x, &tol()).unwrap_err(),
            MolnarError::DegeneratePointSystem
        );
    }

    #[test]
    fn refine_domain_and_classification_failure() {
        let x = octahedron();
        let cells = delaunay(&x, &tol()).unwrap();
        let m = molnar(&x, &cells, &tol()).unwrap();
        assert_eq!(
            refine(&x, &m, FRAC_PI_4, &tol()).unwrap_err(),
            MolnarError::OutOfDomain
        );
        assert_eq!(refine(&x, &m, 0.0, &tol()).unwrap_err(), MolnarError::OutOfDomain);
        assert_eq!(refine(&x, &m, -0.3, &tol()).unwrap_err(), MolnarError::OutOfDomain);

        // Cube cells are squares; at rho = 0.7 the threshold exceeds their
        // circumradius, so they would have to pass through as triangles —
        // reported, not guessed.
        let x = cube();
        let cells = delaunay(&x, &tol()).unwrap();
        let m = molnar(&x, &cells, &tol()).unwrap();
        let rc = (1.0 / 3f64.sqrt()).acos();
        assert!(saturation_radius(0.7).unwrap() > rc);
        assert!(matches!(
            refine(&x, &m, 0.7, &tol()),
            Err(MolnarError::ClassificationFailure { .. })
        ));
    }

    #[test]
    fn saturation_radius_values_and_domain() {
        // sin(pi/6) = 1/2 gives exactly pi/4.
        assert!((saturation_radius(PI / 6.0).unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert!((saturation_radius(FRAC_PI_4).unwrap() - FRAC_PI_2).abs() < 1e-12);
        assert!(saturation_radius(0.0).is_err());
        assert!(saturation_radius(FRAC_PI_4 + 0.01).is_err());
        // Strictly increasing on the domain.
        let mut prev = 0.0;
        for k in 1..=70 {
            let rho = k as f64 * 0.011;
            let rr = saturation_radius(rho).unwrap();
            assert!(rr > prev);
            prev = rr;
        }
    }

    #[test]
    fn arc_crossing_detector() {
        let ex = uv(1.0, 0.0, 0.0);
        let ey = uv(0.0, 1.0, 0.0);
        let ez = uv(0.0, 0.0, 1.0);
        let mid = uv(1.0, 1.0, 0.0);
        // Equator arc vs meridian arc through its midpoint: crossing.
        assert!(arcs_cross_interior(ex, ey, uv(1.0, 1.0, 1.0), uv(1.0, 1.0, -1.0)));
        // Sharing an endpoint is not a crossing.
        assert!(!arcs_cross_interior(ex, ey, ey, ez));
        // Disjoint arcs.
        assert!(!arcs_cross_interior(ex, mid, ez, uv(0.0, 1.0, 1.0)));
        // Collinear overlap is a crossing.
        assert!(arcs_cross_interior(ex, ey, mid, uv(-1.0, 1.0, 0.0)));
    }

    #[test]
    fn seven_point_circumcaps_match_triangle_circumcircles() {
        // Independent route: the circumcap of each triangular cell must
        // agree with the circumcircle computed from vertex equidistance.
        let x = seven_points();
        let cells = delaunay(&x, &tol()).unwrap();
        for c in &cells {
            if c.vertices.len() != 3 {
                continue;
            }
            let (a, b, cc) = (
                x.points()[c.vertices[0]],
                x.points()[c.vertices[1]],
                x.points()[c.vertices[2]],
            );
            let m = triangle_metrics(a, b, cc, &tol()).unwrap();
            assert!(m.area > 0.0);
            let o = c.circumcap.center();
            let r = c.circumcap.radius();
            for v in [a, b, cc] {
                assert!((sdist(o, v) - r).abs() < 1e-9);
            }
        }
    }
}
