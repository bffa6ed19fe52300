//! Dimension-generic sphere helpers: small dense linear algebra, the
//! deepest-point program on `S^{d-1}`, and a Welzl-style minimal enclosing
//! cap.
//!
//! Vectors are plain `Vec<f64>` slices; everything here targets small `d`
//! (at most a handful) and small point counts, so the dense `O(d^3)` solves
//! are exact enough and fast enough.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(not(feature = "std"))]
use num_traits::Float as _;

#[inline]
pub fn dotn(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn normn(a: &[f64]) -> f64 {
    dotn(a, a).sqrt()
}

/// Normalizes into a unit vector; `None` for (nearly) zero input.
pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = normn(a);
    if n < 1e-13 {
        return None;
    }
    Some(a.iter().map(|x| x / n).collect())
}

/// Solves the square system `m x = rhs` by Gaussian elimination with
/// partial pivoting.  `None` when the matrix is singular within `1e-12`
/// relative to its largest pivot candidate.
pub fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = m.len();
    let mut scale = 0.0f64;
    for row in &m {
        for v in row {
            scale = scale.max(v.abs());
        }
    }
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut v = rhs[col];
        for c in (col + 1)..n {
            v -= m[col][c] * x[c];
        }
        x[col] = v / m[col][col];
    }
    Some(x)
}

/// Unit vector spanning the nullspace of a `(d-1) x d` full-rank matrix.
/// `None` when the rows are linearly dependent within tolerance.
pub fn nullspace_unit(rows: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = rows.len();
    let d = rows.first()?.len();
    debug_assert_eq!(k + 1, d);
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut scale = 0.0f64;
    for row in &m {
        for v in row {
            scale = scale.max(v.abs());
        }
    }
    if scale == 0.0 {
        return None;
    }
    let mut pivot_cols = Vec::with_capacity(k);
    let mut col_used = vec![false; d];
    for row in 0..k {
        // Largest remaining entry in this row family (full pivoting on
        // columns keeps near-axis poles stable).
        let mut best = (0usize, 0.0f64);
        for c in 0..d {
            if !col_used[c] && m[row][c].abs() > best.1 {
                best = (c, m[row][c].abs());
            }
        }
        if best.1 < 1e-10 * scale {
            return None;
        }
        let pc = best.0;
        col_used[pc] = true;
        pivot_cols.push(pc);
        for r in (row + 1)..k {
            let f = m[r][pc] / m[row][pc];
            if f != 0.0 {
                for c in 0..d {
                    m[r][c] -= f * m[row][c];
                }
            }
        }
    }
    let free = (0..d).find(|&c| !col_used[c])?;
    let mut x = vec![0.0; d];
    x[free] = 1.0;
    for row in (0..k).rev() {
        let pc = pivot_cols[row];
        let mut v = 0.0;
        for c in 0..d {
            if c != pc {
                v += m[row][c] * x[c];
            }
        }
        x[pc] = -v / m[row][pc];
    }
    normalized(&x)
}

/// Center of the smallest cap whose boundary passes through every point of
/// `support`, i.e. the unit `u` with all `<u, p_i>` equal and maximal.
///
/// Returns `(center, common dot)`.  `None` when the support is degenerate
/// (dependent differences) or the equalizing direction vanishes.
fn equalizing_center(support: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let s = support.len();
    let d = support[0].len();
    if s == 1 {
        return Some((support[0].to_vec(), 1.0));
    }
    // Basis of difference vectors and the subset mean.
    let base = support[0];
    let diffs: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut mean = vec![0.0; d];
    for p in support {
        for (m, v) in mean.iter_mut().zip(*p) {
            *m += v / s as f64;
        }
    }
    // Project the mean onto the orthogonal complement of span(diffs).
    let k = diffs.len();
    let gram: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| dotn(&diffs[i], &diffs[j])).collect())
        .collect();
    let rhs: Vec<f64> = (0..k).map(|i| dotn(&diffs[i], &mean)).collect();
    let lambda = solve(gram, rhs)?;
    let mut proj = mean;
    for (l, dvec) in lambda.iter().zip(&diffs) {
        for (p, v) in proj.iter_mut().zip(dvec) {
            *p -= l * v;
        }
    }
    let center = normalized(&proj)?;
    Some((center.clone(), dotn(&center, support[0])))
}

/// Maximizes `min_i <u, dirs[i]>` over unit vectors `u` in `R^d`.
///
/// Exact active-set enumeration: the optimum of this concave max-min
/// program is pinned by at most `d` active directions, and for each
/// candidate support the optimizer is the equalizing center.  `None` for an
/// empty input.
pub fn deepest_point_nd(dirs: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    let m = dirs.len();
    if m == 0 {
        return None;
    }
    let d = dirs[0].len();
    let eval = |u: &[f64]| dirs.iter().map(|a| dotn(u, a)).fold(f64::INFINITY, f64::min);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut consider = |u: Vec<f64>| {
        let v = eval(&u);
        if best.as_ref().map_or(true, |(_, bv)| v > *bv) {
            best = Some((u, v));
        }
    };
    // Enumerate supports of size 1..=d.
    let mut idx: Vec<usize> = Vec::new();
    fn rec(
        dirs: &[Vec<f64>],
        start: usize,
        max_size: usize,
        idx: &mut Vec<usize>,
        consider: &mut dyn FnMut(Vec<f64>),
    ) {
        if !idx.is_empty() {
            let support: Vec<&[f64]> = idx.iter().map(|&i| dirs[i].as_slice()).collect();
            if let Some((u, _)) = equalizing_center(&support) {
                // Both signs: the equalizing axis is determined up to sign
                // once the support has d-1 independent differences.
                let neg: Vec<f64> = u.iter().map(|v| -v).collect();
                consider(u);
                consider(neg);
            }
        }
        if idx.len() == max_size {
            return;
        }
        for i in start..dirs.len() {
            idx.push(i);
            rec(dirs, i + 1, max_size, idx, consider);
            idx.pop();
        }
    }
    rec(dirs, 0, d, &mut idx, &mut consider);
    best
}

/// Welzl-style minimal enclosing spherical cap of unit points in `R^d`.
///
/// Randomized incremental with a fixed internal seed, so the result is
/// deterministic.  Returns `(center, cos_radius)`; `None` for an empty
/// input.  When the points do not fit in an open hemisphere the reported
/// `cos_radius` is nonpositive and the caller decides how to proceed.
pub fn min_enclosing_cap_nd(points: &[Vec<f64>]) -> Option<(Vec<f64>, f64)> {
    if points.is_empty() {
        return None;
    }
    let d = points[0].len();
    let mut order: Vec<usize> = (0..points.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ca11);
    order.shuffle(&mut rng);
    let pts: Vec<&[f64]> = order.into_iter().map(|i| points[i].as_slice()).collect();
    let mut support: Vec<&[f64]> = Vec::new();
    Some(welzl(&pts, &mut support, d))
}

fn welzl<'a>(pts: &[&'a [f64]], support: &mut Vec<&'a [f64]>, d: usize) -> (Vec<f64>, f64) {
    if pts.is_empty() || support.len() == d {
        return cap_of_support(support, d);
    }
    let p = pts[pts.len() - 1];
    let rest = &pts[..pts.len() - 1];
    let (center, cos_r) = welzl(rest, support, d);
    if dotn(&center, p) >= cos_r - 1e-12 {
        return (center, cos_r);
    }
    support.push(p);
    let result = welzl(rest, support, d);
    support.pop();
    result
}

fn cap_of_support(support: &[&[f64]], d: usize) -> (Vec<f64>, f64) {
    match support.len() {
        0 => {
            // Degenerate empty cap; any center with cos radius 1 works
            // because every caller immediately grows the support.
            let mut c = vec![0.0; d];
            c[0] = 1.0;
            (c, 1.0)
        }
        _ => equalizing_center(support).unwrap_or_else(|| {
            // Dependent support (e.g. duplicated points); fall back to the
            // first point, which still bounds the recursion.
            (support[0].to_vec(), 1.0)
        }),
    }
}
