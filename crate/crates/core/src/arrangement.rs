//! Tilings of the sphere induced by great circles.
//!
//! `build_tiling` computes the full incidence structure (vertices, arcs,
//! cells) of an arrangement of `n >= 2` great circles, including degenerate
//! pencils where three or more circles pass through a common point.  Cells
//! are traced through an explicit rotation system — outgoing arcs sorted
//! counterclockwise around every vertex — so 2-gon (lune) cells fall out of
//! the same walk as ordinary polygons.

use crate::geom::{
    cross3, deepest_point, intersect_circles, sdist, GeomError, GreatCircle, UnitVector,
};
use crate::metrics::{self, MetricsError, SphericalPolygon};
use crate::tol::Tolerances;
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

/// Intersection points closer than this merge into a single arrangement
/// vertex.  Deliberately much coarser than `eps_angle`: the combinatorics
/// must not flip under last-digit noise, and concurrences of three or more
/// circles are detected at this scale.
pub const EPS_MERGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum ArrangementError {
    FewerThanTwoCircles,
    /// Circles at the given input indices coincide.
    CoincidentCircles(usize, usize),
    /// Vertex merging produced an inconsistent incidence structure; the
    /// circles are too close to a degenerate position for the merge
    /// tolerance.  Payload: (vertices, edges, faces).
    BrokenTopology(usize, usize, usize),
    UnknownName(String),
    BadParams(&'static str),
    OutOfDomain,
    Metrics(MetricsError),
    Geom(GeomError),
}

impl fmt::Display for ArrangementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrangementError::FewerThanTwoCircles => {
                write!(f, "an arrangement needs at least two great circles")
            }
            ArrangementError::CoincidentCircles(i, j) => {
                write!(f, "circles {i} and {j} coincide")
            }
            ArrangementError::BrokenTopology(v, e, c) => write!(
                f,
                "near-degenerate circles broke the tiling topology: V={v} E={e} F={c}"
            ),
            ArrangementError::UnknownName(name) => write!(f, "unknown arrangement name `{name}`"),
            ArrangementError::BadParams(why) => write!(f, "bad arrangement parameters: {why}"),
            ArrangementError::OutOfDomain => write!(f, "argument outside the formula's domain"),
            ArrangementError::Metrics(e) => write!(f, "{e}"),
            ArrangementError::Geom(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ArrangementError {}

impl From<MetricsError> for ArrangementError {
    fn from(e: MetricsError) -> Self {
        ArrangementError::Metrics(e)
    }
}

impl From<GeomError> for ArrangementError {
    fn from(e: GeomError) -> Self {
        ArrangementError::Geom(e)
    }
}

/// Arc of a great circle between two consecutive arrangement vertices,
/// oriented counterclockwise around the circle's pole.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// `(tail, head)` vertex indices in counterclockwise circle order.
    pub vertices: (usize, usize),
    pub circle: usize,
    pub midpoint: UnitVector,
}

/// One side of a cell: an edge together with the side of its circle the
/// cell lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSide {
    pub edge: usize,
    /// True when the cell interior is on the positive side of the circle's
    /// pole (equivalently, the boundary walk follows the edge forward).
    pub positive_pole_side: bool,
}

/// Closed 2-dimensional cell of the tiling; `sides[k]` joins
/// `vertex_indices[k]` to `vertex_indices[k+1]` (cyclically), with the
/// interior on the left of the walk.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub vertex_indices: Vec<usize>,
    pub sides: Vec<CellSide>,
}

impl Cell {
    pub fn len(&self) -> usize {
        self.vertex_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 2-gon cells between antipodal vertices.
    pub fn is_lune(&self) -> bool {
        self.vertex_indices.len() == 2
    }
}

/// Three or more circles passing through one merged vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concurrence {
    pub vertex: usize,
    pub circles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tiling {
    pub circles: Vec<GreatCircle>,
    pub vertices: Vec<UnitVector>,
    pub edges: Vec<Edge>,
    pub cells: Vec<Cell>,
    pub degeneracy_report: Vec<Concurrence>,
}

impl Tiling {
    pub fn cell_vertices(&self, cell: &Cell) -> Vec<UnitVector> {
        cell.vertex_indices.iter().map(|&i| self.vertices[i]).collect()
    }

    /// Inward-pointing poles of the side circles of a cell.
    pub fn cell_inward_poles(&self, cell: &Cell) -> Vec<UnitVector> {
        cell.sides
            .iter()
            .map(|s| {
                let p = self.circles[self.edges[s.edge].circle].pole();
                if s.positive_pole_side {
                    p
                } else {
                    p.antipode()
                }
            })
            .collect()
    }

    /// The cell as a validated convex polygon; fails for lune cells, whose
    /// antipodal vertices no polygon admits.
    pub fn cell_polygon(&self, cell: &Cell, tol: &Tolerances) -> Result<SphericalPolygon, MetricsError> {
        SphericalPolygon::new(self.cell_vertices(cell), tol)
    }

    /// Spherical area of a cell (lunes handled analytically).
    pub fn cell_area(&self, cell: &Cell, tol: &Tolerances) -> Result<f64, MetricsError> {
        if cell.is_lune() {
            let poles = self.cell_inward_poles(cell);
            let angle = PI - poles[0].dot(poles[1]).clamp(-1.0, 1.0).acos();
            Ok(2.0 * angle)
        } else {
            Ok(metrics::polygon_area(&self.cell_polygon(cell, tol)?))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMetric {
    pub inradius: f64,
    pub incenter: UnitVector,
    pub circumradius: f64,
    pub circumcenter: UnitVector,
}

/// Per-cell extremal caps plus the two arrangement-level aggregates: the
/// worst inscribed cap and the worst covering cap.
#[derive(Debug, Clone, PartialEq)]
pub struct CellMetrics {
    pub per_cell: Vec<CellMetric>,
    pub min_inradius: f64,
    pub max_circumradius: f64,
}

/// Local tangent frame `(e1, e2)` with `e1 x e2 = v`; angles measured in it
/// increase counterclockwise as seen from outside the sphere at `v`.
fn vertex_frame(v: UnitVector) -> (UnitVector, UnitVector) {
    let pick = if v.x.abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = UnitVector::from_array(cross3(v.as_array(), pick)).expect("pick is not parallel");
    let e2 = UnitVector::from_array(cross3(v.as_array(), e1.as_array())).expect("frame closes");
    (e1, e2)
}

/// Builds the tiling induced by the circles.
///
/// Vertices are all pairwise intersections merged within [`EPS_MERGE`];
/// each circle is split into arcs by its incident vertices in angular
/// order; cells are traced by walking the rotation system (the next arc of
/// a face is the clockwise neighbor of the reversed arc around its head).
/// Output ordering is canonical: vertices lexicographic by coordinates,
/// edges by (circle, angle), cells sorted by their vertex cycles.
pub fn build_tiling(circles: &[GreatCircle], tol: &Tolerances) -> Result<Tiling, ArrangementError> {
    let n = circles.len();
    if n < 2 {
        return Err(ArrangementError::FewerThanTwoCircles);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if circles[i].coincident_with(&circles[j], tol) {
                return Err(ArrangementError::CoincidentCircles(i, j));
            }
        }
    }

    // Pairwise intersections, merged into vertices.
    let mut verts: Vec<UnitVector> = Vec::new();
    let mut vert_circles: Vec<BTreeSet<usize>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (p, q) = intersect_circles(&circles[i], &circles[j], tol)?;
            for v in [p, q] {
                match verts.iter().position(|u| sdist(*u, v) <= EPS_MERGE) {
                    Some(k) => {
                        vert_circles[k].insert(i);
                        vert_circles[k].insert(j);
                    }
                    None => {
                        verts.push(v);
                        vert_circles.push(BTreeSet::from([i, j]));
                    }
                }
            }
        }
    }

    // Canonical vertex order.
    let mut order: Vec<usize> = (0..verts.len()).collect();
    order.sort_by(|&a, &b| {
        let (u, w) = (verts[a], verts[b]);
        u.x.total_cmp(&w.x).then(u.y.total_cmp(&w.y)).then(u.z.total_cmp(&w.z))
    });
    let verts: Vec<UnitVector> = order.iter().map(|&i| verts[i]).collect();
    let vert_circles: Vec<BTreeSet<usize>> = order.iter().map(|&i| vert_circles[i].clone()).collect();

    // Arcs: split every circle at its incident vertices.
    let mut edges: Vec<Edge> = Vec::new();
    for c in 0..n {
        let mut on: Vec<(f64, usize)> = (0..verts.len())
            .filter(|&k| vert_circles[k].contains(&c))
            .map(|k| (circles[c].angle_of(verts[k]), k))
            .collect();
        on.sort_by(|a, b| a.0.total_cmp(&b.0));
        let m = on.len();
        debug_assert!(m >= 2, "every circle meets every other circle");
        for s in 0..m {
            let (t0, va) = on[s];
            let (t1, vb) = on[(s + 1) % m];
            let t1 = if s + 1 == m { t1 + TAU } else { t1 };
            edges.push(Edge {
                vertices: (va, vb),
                circle: c,
                midpoint: circles[c].point_at((t0 + t1) / 2.0),
            });
        }
    }

    // Half-edge `2e` walks edge `e` forward (counterclockwise around its
    // circle's pole), `2e + 1` walks it backward.
    let h_count = 2 * edges.len();
    let tail = |h: usize| -> usize {
        let e = &edges[h / 2];
        if h % 2 == 0 {
            e.vertices.0
        } else {
            e.vertices.1
        }
    };
    let tangent = |h: usize| -> UnitVector {
        let e = &edges[h / 2];
        let at = verts[tail(h)];
        let t = cross3(circles[e.circle].pole().as_array(), at.as_array());
        let t = UnitVector::from_array(t).expect("vertex is not at the circle pole");
        if h % 2 == 0 {
            t
        } else {
            t.antipode()
        }
    };

    // Rotation system: outgoing half-edges sorted counterclockwise around
    // each vertex; `rot_prev` maps a half-edge to its clockwise neighbor.
    let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); verts.len()];
    for h in 0..h_count {
        let v = tail(h);
        let (e1, e2) = vertex_frame(verts[v]);
        let t = tangent(h);
        outgoing[v].push((t.dot(e2).atan2(t.dot(e1)), h));
    }
    let mut rot_prev = vec![0usize; h_count];
    for ring in &mut outgoing {
        ring.sort_by(|a, b| a.0.total_cmp(&b.0));
        for k in 0..ring.len() {
            let prev = ring[(k + ring.len() - 1) % ring.len()].1;
            rot_prev[ring[k].1] = prev;
        }
    }

    // Face tracing; every half-edge lies on exactly one counterclockwise
    // face boundary.
    let mut face_of = vec![usize::MAX; h_count];
    let mut cells: Vec<Cell> = Vec::new();
    for h0 in 0..h_count {
        if face_of[h0] != usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let mut h = h0;
        loop {
            face_of[h] = cells.len();
            cycle.push(h);
            h = rot_prev[h ^ 1];
            if h == h0 {
                break;
            }
            if cycle.len() > h_count {
                // A non-closing trace means the merged incidence structure
                // is inconsistent; report rather than loop.
                return Err(ArrangementError::BrokenTopology(verts.len(), edges.len(), 0));
            }
        }
        let mut cell = Cell {
            vertex_indices: cycle.iter().map(|&h| tail(h)).collect(),
            sides: cycle
                .iter()
                .map(|&h| CellSide { edge: h / 2, positive_pole_side: h % 2 == 0 })
                .collect(),
        };
        // Canonical starting vertex.
        let start = cell
            .vertex_indices
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| *v)
            .map(|(i, _)| i)
            .unwrap_or(0);
        cell.vertex_indices.rotate_left(start);
        cell.sides.rotate_left(start);
        cells.push(cell);
    }
    cells.sort_by(|a, b| {
        a.vertex_indices
            .cmp(&b.vertex_indices)
            .then_with(|| {
                let ea: Vec<usize> = a.sides.iter().map(|s| s.edge).collect();
                let eb: Vec<usize> = b.sides.iter().map(|s| s.edge).collect();
                ea.cmp(&eb)
            })
    });

    let (v_count, e_count, f_count) = (verts.len(), edges.len(), cells.len());
    // The Euler relation is the tiling's global consistency check; merge
    // artifacts near degenerate positions surface here.
    if v_count as i64 - e_count as i64 + f_count as i64 != 2 {
        return Err(ArrangementError::BrokenTopology(v_count, e_count, f_count));
    }

    let degeneracy_report = (0..verts.len())
        .filter(|&k| vert_circles[k].len() >= 3)
        .map(|k| Concurrence { vertex: k, circles: vert_circles[k].iter().copied().collect() })
        .collect();

    Ok(Tiling { circles: circles.to_vec(), vertices: verts, edges, cells, degeneracy_report })
}

/// Extremal caps of every cell.
///
/// Inradius: exact max-min optimization over the inward side poles (the
/// same program for lunes and polygons).  Circumradius: smallest enclosing
/// cap of the vertices; cells with antipodal vertices are lunes with
/// circumradius exactly `pi/2`.
pub fn cell_metrics(t: &Tiling, tol: &Tolerances) -> Result<CellMetrics, ArrangementError> {
    let mut per_cell = Vec::with_capacity(t.cells.len());
    for cell in &t.cells {
        let poles = t.cell_inward_poles(cell);
        let (incenter, depth) = deepest_point(&poles).expect("cell has sides");
        let inradius = depth.clamp(-1.0, 1.0).asin();

        let vs = t.cell_vertices(cell);
        let antipodal = vs
            .iter()
            .enumerate()
            .any(|(i, a)| vs[i + 1..].iter().any(|b| a.dot(*b) <= -1.0 + 1e-9));
        let (circumradius, circumcenter) = if antipodal {
            (FRAC_PI_2, incenter)
        } else {
            let cap = metrics::min_enclosing_cap(&vs, tol)?;
            (cap.radius(), cap.center())
        };
        per_cell.push(CellMetric { inradius, incenter, circumradius, circumcenter });
    }
    let min_inradius = per_cell.iter().map(|m| m.inradius).fold(f64::INFINITY, f64::min);
    let max_circumradius = per_cell.iter().map(|m| m.circumradius).fold(0.0f64, f64::max);
    Ok(CellMetrics { per_cell, min_inradius, max_circumradius })
}

fn poles_to_circles(poles: Vec<UnitVector>) -> Vec<GreatCircle> {
    poles.into_iter().map(GreatCircle::new).collect()
}

/// Reference arrangements by name.
///
/// `prism` and `pencil` take the total circle count as parameter; the
/// other names are fixed configurations:
/// `orthogonal2`/`orthogonal3` (coordinate circles), `optimal4` (three
/// circles through an antipodal pair at mutual angles `pi/3` plus the polar
/// circle), `cube_poles4` (poles at the vertices of a cube),
/// `tetrahedral6`, `octahedral9`, `icosahedral15` (the reflection circles
/// of the respective solids).
pub fn named_arrangement(
    name: &str,
    param: Option<usize>,
) -> Result<Vec<GreatCircle>, ArrangementError> {
    let fixed = |poles: Vec<[f64; 3]>| -> Result<Vec<GreatCircle>, ArrangementError> {
        if param.is_some() {
            return Err(ArrangementError::BadParams("this arrangement takes no parameter"));
        }
        Ok(poles_to_circles(
            poles
                .into_iter()
                .map(|p| UnitVector::normalized(p[0], p[1], p[2]).expect("pole is nonzero"))
                .collect(),
        ))
    };
    let diagonal6 = vec![
        [1.0, 1.0, 0.0],
        [1.0, -1.0, 0.0],
        [1.0, 0.0, 1.0],
        [1.0, 0.0, -1.0],
        [0.0, 1.0, 1.0],
        [0.0, 1.0, -1.0],
    ];
    match name {
        "orthogonal2" => fixed(vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]),
        "orthogonal3" => fixed(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
        "optimal4" => {
            // Three meridian circles through the poles at mutual angles
            // pi/3, plus the equator.
            let mut poles: Vec<[f64; 3]> = (0..3)
                .map(|k| {
                    let a = k as f64 * PI / 3.0;
                    [a.cos(), a.sin(), 0.0]
                })
                .collect();
            poles.push([0.0, 0.0, 1.0]);
            fixed(poles)
        }
        "cube_poles4" => fixed(vec![
            [1.0, 1.0, 1.0],
            [1.0, 1.0, -1.0],
            [1.0, -1.0, 1.0],
            [1.0, -1.0, -1.0],
        ]),
        "tetrahedral6" => fixed(diagonal6),
        "octahedral9" => {
            let mut poles =
                vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            poles.extend(diagonal6);
            fixed(poles)
        }
        "icosahedral15" => {
            let tau = (1.0 + 5f64.sqrt()) / 2.0;
            let mut poles =
                vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            for s1 in [1.0, -1.0] {
                for s2 in [1.0, -1.0] {
                    let base = [s1 / 2.0, s2 * tau / 2.0, 1.0 / (2.0 * tau)];
                    poles.push(base);
                    poles.push([base[2], base[0], base[1]]);
                    poles.push([base[1], base[2], base[0]]);
                }
            }
            fixed(poles)
        }
        "prism" => {
            let n = param.ok_or(ArrangementError::BadParams("prism requires a circle count"))?;
            if n < 3 {
                return Err(ArrangementError::BadParams("prism needs at least three circles"));
            }
            let m = n - 1;
            let mut poles = vec![UnitVector::new(0.0, 0.0, 1.0).expect("unit")];
            for k in 0..m {
                let a = k as f64 * PI / m as f64;
                poles.push(UnitVector::normalized(a.cos(), a.sin(), 0.0).expect("unit"));
            }
            Ok(poles_to_circles(poles))
        }
        "pencil" => {
            let n = param.ok_or(ArrangementError::BadParams("pencil requires a circle count"))?;
            if n < 2 {
                return Err(ArrangementError::BadParams("pencil needs at least two circles"));
            }
            let poles = (0..n)
                .map(|k| {
                    let a = k as f64 * PI / n as f64;
                    UnitVector::normalized(a.cos(), a.sin(), 0.0).expect("unit")
                })
                .collect();
            Ok(poles_to_circles(poles))
        }
        other => Err(ArrangementError::UnknownName(String::from(other))),
    }
}

/// Upper bound on the largest radius so that some `n`-circle tiling has a
/// cap of that radius in every cell: `arccos(1/(sqrt2 sin(n pi / (4(n-1)))))`,
/// valid for `n > 4`.
pub fn rgc_upper_bound(n: usize) -> Result<f64, ArrangementError> {
    if n <= 4 {
        return Err(ArrangementError::OutOfDomain);
    }
    let arg = 1.0 / (2f64.sqrt() * (n as f64 * PI / (4.0 * (n as f64 - 1.0))).sin());
    Ok(arg.clamp(-1.0, 1.0).acos())
}

/// Inradius guaranteed by the `n`-circle prism arrangement:
/// `arctan(sin(pi/(2(n-1))))`.
pub fn rgc_prism_lower_bound(n: usize) -> Result<f64, ArrangementError> {
    if n < 2 {
        return Err(ArrangementError::OutOfDomain);
    }
    Ok((PI / (2.0 * (n as f64 - 1.0))).sin().atan())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgcBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Bounds on the smallest radius `R` so that every cell of some `n`-circle
/// tiling fits in a cap of radius `R`:
/// `arccos(1/tan((1 + 2/(n^2-n+2)) pi/4))` from below and
/// `arcsin(8/(sqrt3 cbrt(n)))` from above (clamped to `pi/2`), for `n > 3`.
pub fn rgc_covering_bounds(n: usize) -> Result<RgcBounds, ArrangementError> {
    if n <= 3 {
        return Err(ArrangementError::OutOfDomain);
    }
    let cells = (n * n - n + 2) as f64;
    let lower = (1.0 / ((1.0 + 2.0 / cells) * PI / 4.0).tan()).clamp(-1.0, 1.0).acos();
    let arg = 8.0 / (3f64.sqrt() * (n as f64).powf(1.0 / 3.0));
    let upper = if arg >= 1.0 { FRAC_PI_2 } else { arg.asin() };
    Ok(RgcBounds { lower, upper })
}

/// Lower bound on the cell count of any tiling whose every cell fits in a
/// cap of radius `R`: `4 pi / (8 arctan(1/cos R) - 2 pi)`.
pub fn covering_cell_lower_bound(big_r: f64) -> Result<f64, ArrangementError> {
    if !big_r.is_finite() || big_r <= 0.0 || big_r >= FRAC_PI_2 {
        return Err(ArrangementError::OutOfDomain);
    }
    Ok(4.0 * PI / (8.0 * (1.0 / big_r.cos()).atan() - 2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn named(name: &str, param: Option<usize>) -> Tiling {
        build_tiling(&named_arrangement(name, param).unwrap(), &tol()).unwrap()
    }

    fn counts(t: &Tiling) -> (usize, usize, usize) {
        (t.vertices.len(), t.edges.len(), t.cells.len())
    }

    fn total_area(t: &Tiling) -> f64 {
        t.cells.iter().map(|c| t.cell_area(c, &tol()).unwrap()).sum()
    }

    fn assert_structure(t: &Tiling) {
        let (v, e, f) = counts(t);
        assert_eq!(v as i64 - e as i64 + f as i64, 2, "Euler relation");

        // Every edge bounds exactly two cells, once per side.
        let mut uses = vec![0usize; t.edges.len()];
        for cell in &t.cells {
            assert_eq!(cell.vertex_indices.len(), cell.sides.len());
            for (k, side) in cell.sides.iter().enumerate() {
                uses[side.edge] += 1;
                let edge = &t.edges[side.edge];
                let (a, b) = (
                    cell.vertex_indices[k],
                    cell.vertex_indices[(k + 1) % cell.len()],
                );
                if side.positive_pole_side {
                    assert_eq!((a, b), edge.vertices);
                } else {
                    assert_eq!((b, a), edge.vertices);
                }
            }
        }
        assert!(uses.iter().all(|&u| u == 2), "edge not shared by two cells");

        // Average side count stays within [2, 4].
        let avg = 2.0 * e as f64 / f as f64;
        assert!((2.0..=4.0).contains(&avg), "average sides {avg}");

        // Cell count bound.
        let n = t.circles.len();
        assert!(f <= n * n - n + 2);

        let area = total_area(t);
        assert!(
            (area - 4.0 * PI).abs() < n as f64 * 1e-9,
            "cell areas sum to {area}"
        );
    }

    #[test]
    fn two_orthogonal_circles_make_four_lunes() {
        let t = named("orthogonal2", None);
        assert_eq!(counts(&t), (2, 4, 4));
        assert_structure(&t);
        assert!(t.cells.iter().all(|c| c.is_lune()));
        assert!(t.degeneracy_report.is_empty());

        let m = cell_metrics(&t, &tol()).unwrap();
        // Quarter lunes: inradius pi/4, circumradius pi/2.
        for cm in &m.per_cell {
            assert!((cm.inradius - PI / 4.0).abs() < 1e-12);
            assert!((cm.circumradius - FRAC_PI_2).abs() < 1e-12);
        }
        assert!((m.min_inradius - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn three_orthogonal_circles_make_eight_octants() {
        let t = named("orthogonal3", None);
        assert_eq!(counts(&t), (6, 12, 8));
        assert_structure(&t);
        assert!(t.cells.iter().all(|c| c.len() == 3));
        for c in &t.cells {
            assert!((t.cell_area(c, &tol()).unwrap() - FRAC_PI_2).abs() < 1e-12);
        }

        let m = cell_metrics(&t, &tol()).unwrap();
        assert!((m.min_inradius - (1.0 / 3f64.sqrt()).asin()).abs() < 1e-12);
        assert!((m.max_circumradius - (1.0 / 3f64.sqrt()).acos()).abs() < 1e-9);
    }

    #[test]
    fn cube_pole_circles_make_cuboctahedral_tiling() {
        let t = named("cube_poles4", None);
        assert_eq!(counts(&t), (12, 24, 14));
        assert_structure(&t);
        assert!(t.degeneracy_report.is_empty());

        let mut triangles = 0;
        let mut squares = 0;
        for c in &t.cells {
            match c.len() {
                3 => triangles += 1,
                4 => squares += 1,
                other => panic!("unexpected {other}-gon"),
            }
        }
        assert_eq!((triangles, squares), (8, 6));

        // Every circle carries six sides.
        for c in 0..4 {
            assert_eq!(t.edges.iter().filter(|e| e.circle == c).count(), 6);
        }

        let m = cell_metrics(&t, &tol()).unwrap();
        assert!((m.max_circumradius - PI / 4.0).abs() < 1e-9);
        assert!((m.min_inradius - (1.0f64 / 3.0).asin()).abs() < 1e-9);
    }

    #[test]
    fn optimal_four_circle_arrangement() {
        let t = named("optimal4", None);
        assert_structure(&t);
        // Three circles concur at the two poles.
        assert_eq!(t.degeneracy_report.len(), 2);
        for con in &t.degeneracy_report {
            assert_eq!(con.circles.len(), 3);
        }
        assert_eq!(counts(&t), (8, 18, 12));

        let m = cell_metrics(&t, &tol()).unwrap();
        assert!((m.min_inradius - (1.0 / 5f64.sqrt()).asin()).abs() < 1e-9);
        assert!((m.min_inradius.to_degrees() - 26.57).abs() < 1e-2);
    }

    #[test]
    fn prism_arrangement_matches_its_formula() {
        for n in [3usize, 5, 7] {
            let t = named("prism", Some(n));
            assert_structure(&t);
            let m = cell_metrics(&t, &tol()).unwrap();
            let expected = rgc_prism_lower_bound(n).unwrap();
            assert!(
                (m.min_inradius - expected).abs() < 1e-9,
                "prism({n}): {} vs {}",
                m.min_inradius,
                expected
            );
        }
    }

    #[test]
    fn reflection_arrangements_reach_the_coxeter_inradii() {
        let t6 = named("tetrahedral6", None);
        assert_structure(&t6);
        assert_eq!(t6.cells.len(), 24);
        let m6 = cell_metrics(&t6, &tol()).unwrap();
        assert!((m6.min_inradius - (1.0f64 / 3.0).atan()).abs() < 1e-9);
        assert!((m6.min_inradius.to_degrees() - 18.44).abs() < 1e-2);

        let t9 = named("octahedral9", None);
        assert_structure(&t9);
        assert_eq!(t9.cells.len(), 48);
        let m9 = cell_metrics(&t9, &tol()).unwrap();
        let rho9 = ((2.0 - 2f64.sqrt()) / 12.0).sqrt().atan();
        assert!((m9.min_inradius - rho9).abs() < 1e-9);
        assert!((m9.min_inradius.to_degrees() - 12.46).abs() < 1e-2);

        let t15 = named("icosahedral15", None);
        assert_structure(&t15);
        assert_eq!(t15.cells.len(), 120);
        let m15 = cell_metrics(&t15, &tol()).unwrap();
        let rho15 = ((210.0 + 12.0 * 5f64.sqrt()) / 241.0).sqrt().acos();
        assert!((m15.min_inradius - rho15).abs() < 1e-9);
        assert!((m15.min_inradius.to_degrees() - 7.56).abs() < 1e-2);
    }

    #[test]
    fn pencil_degenerates_to_lunes() {
        let t = named("pencil", Some(6));
        assert_eq!(counts(&t), (2, 12, 12));
        assert_structure(&t);
        assert!(t.cells.iter().all(|c| c.is_lune()));
        assert_eq!(t.degeneracy_report.len(), 2);
        for con in &t.degeneracy_report {
            assert_eq!(con.circles, vec![0, 1, 2, 3, 4, 5]);
        }

        let m = cell_metrics(&t, &tol()).unwrap();
        for cm in &m.per_cell {
            assert!((cm.inradius - PI / 12.0).abs() < 1e-9);
            assert!((cm.circumradius - FRAC_PI_2).abs() < 1e-12);
        }
    }

    #[test]
    fn tilings_are_deterministic() {
        let circles = named_arrangement("icosahedral15", None).unwrap();
        let a = build_tiling(&circles, &tol()).unwrap();
        let b = build_tiling(&circles, &tol()).unwrap();
        assert_eq!(a, b);
    }

    fn random_circles(rng: &mut ChaCha8Rng, n: usize) -> Vec<GreatCircle> {
        (0..n)
            .map(|_| {
                loop {
                    let v = [
                        rng.gen_range(-1.0f64..1.0),
                        rng.gen_range(-1.0f64..1.0),
                        rng.gen_range(-1.0f64..1.0),
                    ];
                    if let Ok(u) = UnitVector::from_array(v) {
                        return GreatCircle::new(u);
                    }
                }
            })
            .collect()
    }

    #[test]
    fn random_simple_arrangements_have_full_cell_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xa55a_1234);
        for n in 4..=8 {
            let circles = random_circles(&mut rng, n);
            let t = build_tiling(&circles, &tol()).unwrap();
            assert!(t.degeneracy_report.is_empty(), "random circles concurred");
            assert_eq!(t.cells.len(), n * n - n + 2);
            assert_eq!(t.vertices.len(), n * (n - 1));
            assert_structure(&t);
        }
    }

    #[test]
    fn random_four_circle_tiling_has_eight_triangles_and_six_sides_per_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let circles = random_circles(&mut rng, 4);
        let t = build_tiling(&circles, &tol()).unwrap();
        assert_eq!(t.cells.len(), 14);
        let triangles = t.cells.iter().filter(|c| c.len() == 3).count();
        assert!(triangles >= 8, "only {triangles} triangles");
        for c in 0..4 {
            assert_eq!(t.edges.iter().filter(|e| e.circle == c).count(), 6);
        }
    }

    #[test]
    fn cells_come_in_antipodal_pairs_with_equal_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
        let circles = random_circles(&mut rng, 5);
        let t = build_tiling(&circles, &tol()).unwrap();
        let m = cell_metrics(&t, &tol()).unwrap();
        for (i, cell) in t.cells.iter().enumerate() {
            let anti: Vec<UnitVector> =
                t.cell_vertices(cell).iter().map(|v| v.antipode()).collect();
            let partner = t
                .cells
                .iter()
                .position(|other| {
                    let ov = t.cell_vertices(other);
                    ov.len() == anti.len()
                        && anti
                            .iter()
                            .all(|a| ov.iter().any(|o| a.approx_eq(*o, 1e-9)))
                })
                .expect("antipodal cell exists");
            assert!((m.per_cell[i].inradius - m.per_cell[partner].inradius).abs() < 1e-9);
            assert!(
                (m.per_cell[i].circumradius - m.per_cell[partner].circumradius).abs() < 1e-9
            );
        }
    }

    #[test]
    fn min_inradius_never_exceeds_max_circumradius() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2usize, 3, 5, 6] {
            let circles = random_circles(&mut rng, n);
            let t = build_tiling(&circles, &tol()).unwrap();
            let m = cell_metrics(&t, &tol()).unwrap();
            assert!(m.min_inradius <= m.max_circumradius + 1e-12);
        }
    }

    #[test]
    fn arrangement_input_validation() {
        let one = named_arrangement("orthogonal2", None).unwrap()[..1].to_vec();
        assert_eq!(
            build_tiling(&one, &tol()),
            Err(ArrangementError::FewerThanTwoCircles)
        );

        let pole = UnitVector::new(0.0, 0.0, 1.0).unwrap();
        let dup = vec![
            GreatCircle::new(pole),
            GreatCircle::new(pole.antipode()),
        ];
        assert_eq!(
            build_tiling(&dup, &tol()),
            Err(ArrangementError::CoincidentCircles(0, 1))
        );
    }

    #[test]
    fn named_arrangement_errors() {
        assert!(matches!(
            named_arrangement("dodecahedral", None),
            Err(ArrangementError::UnknownName(_))
        ));
        assert!(matches!(
            named_arrangement("prism", None),
            Err(ArrangementError::BadParams(_))
        ));
        assert!(matches!(
            named_arrangement("prism", Some(2)),
            Err(ArrangementError::BadParams(_))
        ));
        assert!(matches!(
            named_arrangement("pencil", Some(1)),
            Err(ArrangementError::BadParams(_))
        ));
        assert!(matches!(
            named_arrangement("orthogonal3", Some(3)),
            Err(ArrangementError::BadParams(_))
        ));
    }

    #[test]
    fn inradius_upper_bound_formula() {
        let five = rgc_upper_bound(5).unwrap();
        let direct = (1.0 / (2f64.sqrt() * (5.0 * PI / 16.0).sin())).acos();
        assert!((five - direct).abs() < 1e-12);

        // Monotone decreasing toward zero.
        let mut prev = f64::INFINITY;
        for n in 5..60 {
            let b = rgc_upper_bound(n).unwrap();
            assert!(b < prev);
            prev = b;
        }
        // Decays like sqrt(pi/(2n)): about 1.25e-3 at n = 1e6.
        assert!(rgc_upper_bound(1_000_000).unwrap() < 1.3e-3);
        assert_eq!(rgc_upper_bound(4), Err(ArrangementError::OutOfDomain));

        // The prism construction stays below the upper bound.
        for n in 5..=50 {
            assert!(rgc_prism_lower_bound(n).unwrap() <= rgc_upper_bound(n).unwrap());
        }
    }

    #[test]
    fn covering_radius_bounds() {
        let b4 = rgc_covering_bounds(4).unwrap();
        let lower4 = (1.0 / ((1.0 + 2.0 / 14.0) * PI / 4.0).tan()).acos();
        assert!((b4.lower - lower4).abs() < 1e-12);
        // The known four-circle optimum lies inside the bracket.
        assert!(b4.lower <= PI / 4.0 + 1e-12);
        assert!(PI / 4.0 <= b4.upper);
        assert_eq!(b4.upper, FRAC_PI_2);

        // arcsin argument crosses 1 near n = (8/sqrt3)^3 = 98.5.
        assert_eq!(rgc_covering_bounds(98).unwrap().upper, FRAC_PI_2);
        assert!(rgc_covering_bounds(99).unwrap().upper < FRAC_PI_2);
        let big = rgc_covering_bounds(1_000_000).unwrap();
        assert!((big.upper - 0.0462).abs() < 1e-3);

        for n in 4..=200 {
            let b = rgc_covering_bounds(n).unwrap();
            assert!(b.lower <= b.upper + 1e-12, "n = {n}");
        }
        assert_eq!(rgc_covering_bounds(3), Err(ArrangementError::OutOfDomain));
    }

    #[test]
    fn covering_cell_count_bound() {
        // At the octant circumradius the bound is 6, consistent with the
        // 8-cell arrangement of three orthogonal circles.
        let r8 = (1.0 / 3f64.sqrt()).acos();
        let b = covering_cell_lower_bound(r8).unwrap();
        assert!((b - 6.0).abs() < 1e-9);
        assert!(b <= 8.0);

        let near_half = covering_cell_lower_bound(FRAC_PI_2 - 1e-9).unwrap();
        assert!((near_half - 2.0).abs() < 1e-6);

        let quarter = covering_cell_lower_bound(PI / 4.0).unwrap();
        assert!((quarter - 9.24).abs() < 1e-2);
        assert!(quarter <= 14.0);

        assert_eq!(covering_cell_lower_bound(0.0), Err(ArrangementError::OutOfDomain));
        assert_eq!(
            covering_cell_lower_bound(FRAC_PI_2),
            Err(ArrangementError::OutOfDomain)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn prop_random_tilings_are_consistent(seed in any::<u64>(), n in 3usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let circles = random_circles(&mut rng, n);
            let t = match build_tiling(&circles, &tol()) {
                Ok(t) => t,
                // Astronomically unlikely coincidence of random poles.
                Err(_) => return Ok(()),
            };
            let (v, e, f) = counts(&t);
            prop_assert_eq!(v as i64 - e as i64 + f as i64, 2);
            let area = total_area(&t);
            prop_assert!((area - 4.0 * PI).abs() < 1e-8);
            let m = cell_metrics(&t, &tol()).unwrap();
            prop_assert!(m.min_inradius > 0.0);
            prop_assert!(m.min_inradius <= m.max_circumradius + 1e-12);
        }
    }
}
