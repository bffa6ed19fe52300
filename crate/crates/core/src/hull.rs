//! Incremental 3D convex hull of points on the unit sphere.
//!
//! Private helper for the Delaunay layer: faces come back merged (cocircular
//! vertex sets form one polygonal face) and oriented counterclockwise as
//! seen from outside, with outward unit normals and plane offsets.

use crate::geom::{cross3, dot3, norm3, sub3, UnitVector};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// Points closer to a face plane than this count as coplanar with it, so a
/// cocircular point still triggers the rebuild that makes it a vertex.
const EPS_VISIBLE: f64 = 1e-10;
/// Adjacent triangles whose unit normals agree this closely merge into one
/// polygonal face.
const EPS_COPLANAR: f64 = 1e-9;
/// Minimal plane offset from the origin; anything smaller means the origin
/// is not strictly interior to the hull.
const EPS_ORIGIN: f64 = 1e-9;

pub(crate) struct HullFace {
    /// Vertex indices, counterclockwise seen from outside.
    pub vertices: Vec<usize>,
    /// Outward unit normal.
    pub normal: [f64; 3],
    /// Plane offset `<normal, vertex>`, strictly positive.
    pub offset: f64,
}

#[derive(Clone, Copy)]
struct Tri {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
}

fn make_tri(points: &[[f64; 3]], a: usize, b: usize, c: usize) -> Option<Tri> {
    let n = cross3(sub3(points[b], points[a]), sub3(points[c], points[a]));
    let len = norm3(n);
    if len < 1e-14 {
        return None;
    }
    let normal = [n[0] / len, n[1] / len, n[2] / len];
    let offset =
        (dot3(normal, points[a]) + dot3(normal, points[b]) + dot3(normal, points[c])) / 3.0;
    Some(Tri { v: [a, b, c], normal, offset })
}

/// Convex hull faces of the point set, or `None` when the points are
/// degenerate (fewer than four, affinely dependent, or failing to enclose
/// the origin strictly).
pub(crate) fn hull_faces(points: &[UnitVector]) -> Option<Vec<HullFace>> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let p: Vec<[f64; 3]> = points.iter().map(|u| u.as_array()).collect();

    // Initial simplex: a point, the farthest point from it, the point
    // maximizing triangle area, the point maximizing tetrahedron volume.
    let i0 = 0;
    let i1 = (0..n).max_by(|&a, &b| {
        norm3(sub3(p[a], p[i0])).total_cmp(&norm3(sub3(p[b], p[i0])))
    })?;
    if norm3(sub3(p[i1], p[i0])) < 1e-12 {
        return None;
    }
    let d01 = sub3(p[i1], p[i0]);
    let i2 = (0..n).max_by(|&a, &b| {
        norm3(cross3(d01, sub3(p[a], p[i0]))).total_cmp(&norm3(cross3(d01, sub3(p[b], p[i0]))))
    })?;
    let nrm = cross3(d01, sub3(p[i2], p[i0]));
    if norm3(nrm) < 1e-12 {
        return None;
    }
    let i3 = (0..n).max_by(|&a, &b| {
        dot3(nrm, sub3(p[a], p[i0]))
            .abs()
            .total_cmp(&dot3(nrm, sub3(p[b], p[i0])).abs())
    })?;
    if dot3(nrm, sub3(p[i3], p[i0])).abs() < 1e-12 {
        return None;
    }

    let mut tris: Vec<Tri> = Vec::new();
    for (a, b, c, d) in [
        (i0, i1, i2, i3),
        (i0, i1, i3, i2),
        (i0, i2, i3, i1),
        (i1, i2, i3, i0),
    ] {
        let t = make_tri(&p, a, b, c)?;
        // Orient each face away from the opposite simplex vertex.
        if dot3(t.normal, p[d]) > t.offset {
            tris.push(make_tri(&p, a, c, b)?);
        } else {
            tris.push(t);
        }
    }

    let seed: BTreeSet<usize> = [i0, i1, i2, i3].into();
    for idx in 0..n {
        if seed.contains(&idx) {
            continue;
        }
        // Coplanar counts as visible so cocircular points get stitched in.
        let visible: Vec<usize> = (0..tris.len())
            .filter(|&t| dot3(tris[t].normal, p[idx]) - tris[t].offset > -EPS_VISIBLE)
            .collect();
        if visible.is_empty() {
            // A distinct unit vector strictly inside the hull of other unit
            // vectors cannot exist.
            return None;
        }
        let vis_set: BTreeSet<usize> = visible.iter().copied().collect();
        let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for &t in &visible {
            let [a, b, c] = tris[t].v;
            for e in [(a, b), (b, c), (c, a)] {
                edges.insert(e);
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| !edges.contains(&(b, a)))
            .collect();
        if horizon.is_empty() {
            return None;
        }
        let mut next: Vec<Tri> = (0..tris.len())
            .filter(|t| !vis_set.contains(t))
            .map(|t| tris[t])
            .collect();
        for (a, b) in horizon {
            next.push(make_tri(&p, a, b, idx)?);
        }
        tris = next;
    }

    if tris.iter().any(|t| t.offset <= EPS_ORIGIN) {
        return None;
    }

    // Merge coplanar neighbors into polygonal faces (union-find over
    // shared edges with parallel normals).
    let mut owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (t, tri) in tris.iter().enumerate() {
        let [a, b, c] = tri.v;
        for e in [(a, b), (b, c), (c, a)] {
            owner.insert(e, t);
        }
    }
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for (&(a, b), &t) in &owner {
        if let Some(&u) = owner.get(&(b, a)) {
            if dot3(tris[t].normal, tris[u].normal) > 1.0 - EPS_COPLANAR {
                let (rt, ru) = (find(&mut parent, t), find(&mut parent, u));
                parent[rt] = ru;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for t in 0..tris.len() {
        let r = find(&mut parent, t);
        groups.entry(r).or_default().push(t);
    }

    let mut faces = Vec::with_capacity(groups.len());
    for group in groups.values() {
        let members: BTreeSet<usize> = group.iter().copied().collect();
        // Boundary edges: those whose twin belongs to another group.
        let mut succ: BTreeMap<usize, usize> = BTreeMap::new();
        for &t in group {
            let [a, b, c] = tris[t].v;
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let twin = owner.get(&(v, u));
                if twin.map_or(true, |&w| !members.contains(&w)) {
                    succ.insert(u, v);
                }
            }
        }
        let start = *succ.keys().next()?;
        let mut cycle = vec![start];
        let mut at = *succ.get(&start)?;
        while at != start {
            cycle.push(at);
            at = *succ.get(&at)?;
            if cycle.len() > succ.len() {
                return None;
            }
        }
        if cycle.len() != succ.len() {
            return None;
        }

        let mut nsum = [0.0; 3];
        for &t in group {
            for k in 0..3 {
                nsum[k] += tris[t].normal[k];
            }
        }
        let len = norm3(nsum);
        if len < 1e-12 {
            return None;
        }
        let normal = [nsum[0] / len, nsum[1] / len, nsum[2] / len];
        let offset =
            cycle.iter().map(|&v| dot3(normal, p[v])).sum::<f64>() / cycle.len() as f64;
        faces.push(HullFace { vertices: cycle, normal, offset });
    }
    Some(faces)
}
