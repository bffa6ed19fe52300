//! OBJ rendering of stored artifacts: arcs sampled at 64 segments, faces
//! wound counterclockwise as seen from outside the sphere.

use crate::json::{fmt_f64, CoveringDto, DecompositionDto, PackingDto, TilingDto};

const SEGMENTS: usize = 64;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Right-handed tangent frame `(e1, e2)` with `e1 x e2 = axis`.
fn frame(axis: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(cross(axis, pick));
    let e2 = cross(axis, e1);
    (e1, e2)
}

/// Points of the geodesic from `a` to `b` (endpoints included); requires
/// the angle between them to be below pi.
fn arc(a: [f64; 3], b: [f64; 3], segments: usize) -> Vec<[f64; 3]> {
    let omega = dot(a, b).clamp(-1.0, 1.0).acos();
    if omega < 1e-12 {
        return vec![a, b];
    }
    let s = omega.sin();
    (0..=segments)
        .map(|i| {
            let t = i as f64 / segments as f64;
            let (wa, wb) = (((1.0 - t) * omega).sin() / s, (t * omega).sin() / s);
            [
                wa * a[0] + wb * b[0],
                wa * a[1] + wb * b[1],
                wa * a[2] + wb * b[2],
            ]
        })
        .collect()
}

/// Closed ring of a cap boundary (counterclockwise from outside); a great
/// circle is the special case `radius = pi/2`.
fn ring(center: [f64; 3], radius: f64) -> Vec<[f64; 3]> {
    let (e1, e2) = frame(center);
    let (cr, sr) = (radius.cos(), radius.sin());
    (0..SEGMENTS)
        .map(|i| {
            let th = core::f64::consts::TAU * i as f64 / SEGMENTS as f64;
            let (c, s) = (th.cos(), th.sin());
            [
                cr * center[0] + sr * (c * e1[0] + s * e2[0]),
                cr * center[1] + sr * (c * e1[1] + s * e2[1]),
                cr * center[2] + sr * (c * e1[2] + s * e2[2]),
            ]
        })
        .collect()
}

#[derive(Default)]
struct Builder {
    vertices: Vec<[f64; 3]>,
    lines: Vec<Vec<usize>>,
    faces: Vec<Vec<usize>>,
}

impl Builder {
    fn vertex(&mut self, p: [f64; 3]) -> usize {
        self.vertices.push(p);
        self.vertices.len()
    }

    fn polyline(&mut self, pts: &[[f64; 3]], closed: bool) {
        let mut ids: Vec<usize> = pts.iter().map(|&p| self.vertex(p)).collect();
        if closed {
            ids.push(ids[0]);
        }
        self.lines.push(ids);
    }

    fn face(&mut self, ids: Vec<usize>) {
        self.faces.push(ids);
    }

    fn finish(&self, what: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!("# sepcap {what}\n"));
        for v in &self.vertices {
            out.push_str(&format!(
                "v {} {} {}\n",
                fmt_f64(v[0]),
                fmt_f64(v[1]),
                fmt_f64(v[2])
            ));
        }
        for l in &self.lines {
            out.push('l');
            for id in l {
                out.push_str(&format!(" {id}"));
            }
            out.push('\n');
        }
        for f in &self.faces {
            out.push('f');
            for id in f {
                out.push_str(&format!(" {id}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Cap disks as counterclockwise ring faces plus witness circles as loops.
pub fn packing_obj(p: &PackingDto) -> String {
    let mut b = Builder::default();
    for &c in &p.centers {
        let ids: Vec<usize> = ring(c, p.radius).into_iter().map(|q| b.vertex(q)).collect();
        b.face(ids);
    }
    if let Some(w) = &p.witness {
        for &pole in &w.poles {
            let pts = ring(pole, core::f64::consts::FRAC_PI_2);
            b.polyline(&pts, true);
        }
    }
    b.finish("packing")
}

/// Cap disks plus the generating circles of the covered tiling.
pub fn covering_obj(c: &CoveringDto) -> String {
    let mut b = Builder::default();
    for &center in &c.centers {
        let ids: Vec<usize> = ring(center, c.radius).into_iter().map(|q| b.vertex(q)).collect();
        b.face(ids);
    }
    for circle in &c.tiling.circles {
        let pts = ring(circle.pole, core::f64::consts::FRAC_PI_2);
        b.polyline(&pts, true);
    }
    b.finish("covering")
}

/// Edge graph as arc polylines plus one counterclockwise triangle fan per
/// cell (when incenters are stored); the fan keeps every emitted face
/// convex and outward-oriented.
pub fn tiling_obj(t: &TilingDto) -> String {
    let mut b = Builder::default();
    for e in &t.edges {
        let tail = t.vertices[e.vertices[0]];
        let head = t.vertices[e.vertices[1]];
        // Route through the stored midpoint so arcs of half a turn keep
        // the correct branch; each half gets half the segment budget.
        let mut pts = arc(tail, e.midpoint, SEGMENTS / 2);
        pts.pop();
        pts.extend(arc(e.midpoint, head, SEGMENTS / 2));
        b.polyline(&pts, false);
    }
    if let Some(m) = &t.metrics {
        for (cell, metric) in t.cells.iter().zip(&m.per_cell) {
            let apex = b.vertex(metric.incenter);
            let k = cell.vertex_indices.len();
            for s in 0..k {
                let from = t.vertices[cell.vertex_indices[s]];
                let to = t.vertices[cell.vertex_indices[(s + 1) % k]];
                let pts = side_arc(t, cell.vertex_indices[s], cell.vertex_indices[(s + 1) % k], cell.circle_indices[s], from, to);
                let ids: Vec<usize> = pts.iter().map(|&p| b.vertex(p)).collect();
                for w in ids.windows(2) {
                    b.face(vec![apex, w[0], w[1]]);
                }
            }
        }
    }
    b.finish("tiling")
}

/// Samples the walk side from `from` to `to`, routing through the stored
/// edge midpoint when the side spans half a turn.
fn side_arc(
    t: &TilingDto,
    from_idx: usize,
    to_idx: usize,
    circle: usize,
    from: [f64; 3],
    to: [f64; 3],
) -> Vec<[f64; 3]> {
    let near_half_turn = dot(from, to) <= -1.0 + 1e-9;
    if near_half_turn {
        if let Some(e) = t.edges.iter().find(|e| {
            e.circle == circle
                && (e.vertices == [from_idx, to_idx] || e.vertices == [to_idx, from_idx])
        }) {
            let mut pts = arc(from, e.midpoint, SEGMENTS / 2);
            pts.pop();
            pts.extend(arc(e.midpoint, to, SEGMENTS / 2));
            return pts;
        }
    }
    arc(from, to, SEGMENTS)
}

/// Cell boundary loops of the finest stage present (refined, else bridge
/// cells, else Delaunay cells).
pub fn decomposition_obj(d: &DecompositionDto) -> String {
    let mut b = Builder::default();
    let walks: Vec<Vec<[f64; 3]>> = if let Some(refined) = &d.refined {
        refined.iter().map(|c| c.boundary.clone()).collect()
    } else if let Some(molnar) = &d.molnar {
        molnar.iter().map(|c| c.boundary.clone()).collect()
    } else {
        d.delaunay
            .iter()
            .map(|c| c.vertices.iter().map(|&i| d.points[i]).collect())
            .collect()
    };
    for walk in &walks {
        let mut pts = Vec::new();
        for (i, &p) in walk.iter().enumerate() {
            let q = walk[(i + 1) % walk.len()];
            let mut seg = arc(p, q, SEGMENTS);
            seg.pop();
            pts.extend(seg);
        }
        b.polyline(&pts, true);
    }
    b.finish("decomposition")
}
