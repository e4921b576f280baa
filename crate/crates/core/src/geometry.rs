//! Low-level chart computations.
//!
//! Every simplex of a complex carries the metric of the standard simplex: the
//! span of unit basis vectors e_0..e_n in Euclidean space, so a point with
//! barycentric coordinates `c` sits at the vector `c` itself. All distance
//! computations therefore reduce to l2 geometry of coordinate vectors, and
//! points are represented sparsely as (sorted support, weights) pairs.

/// Squared l2 distance between two sparse coordinate vectors given as
/// (sorted vertex ids, weights). Entries missing from a support are zero.
pub fn sparse_dist2(av: &[u32], ac: &[f64], bv: &[u32], bc: &[f64]) -> f64 {
    let mut i = 0;
    let mut j = 0;
    let mut acc = 0.0;
    while i < av.len() && j < bv.len() {
        if av[i] == bv[j] {
            let d = ac[i] - bc[j];
            acc += d * d;
            i += 1;
            j += 1;
        } else if av[i] < bv[j] {
            acc += ac[i] * ac[i];
            i += 1;
        } else {
            acc += bc[j] * bc[j];
            j += 1;
        }
    }
    while i < av.len() {
        acc += ac[i] * ac[i];
        i += 1;
    }
    while j < bv.len() {
        acc += bc[j] * bc[j];
        j += 1;
    }
    acc
}

/// l2 distance between two sparse coordinate vectors.
pub fn sparse_dist(av: &[u32], ac: &[f64], bv: &[u32], bc: &[f64]) -> f64 {
    sparse_dist2(av, ac, bv, bc).sqrt()
}

/// Squared distance from `z` to its Euclidean projection onto the scaled
/// standard simplex `{ y : y >= 0, sum(y) = target }`.
///
/// Classic sort-and-threshold projection; exact up to floating point.
pub fn simplex_projection_dist2(z: &[f64], target: f64) -> f64 {
    debug_assert!(!z.is_empty());
    let mut sorted: Vec<f64> = z.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    let mut k = 0;
    for (i, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let candidate = (cumulative - target) / (i + 1) as f64;
        if v - candidate > 0.0 {
            theta = candidate;
            k = i + 1;
        }
    }
    debug_assert!(k > 0, "projection needs at least one active coordinate");
    let mut dist2 = 0.0;
    for &v in z {
        let y = (v - theta).max(0.0);
        let d = v - y;
        dist2 += d * d;
    }
    dist2
}

/// Distance from a point with dense chart coordinates `coords` (over a chart
/// of `coords.len()` vertices) to the coordinate face selected by `face_mask`:
/// the sub-simplex spanned by the chart vertices with a `true` entry.
///
/// The minimizer is the affine projection onto the face's span followed by the
/// projection onto the face simplex; off-face mass contributes directly.
pub fn dist_to_coordinate_face(coords: &[f64], face_mask: &[bool]) -> f64 {
    debug_assert_eq!(coords.len(), face_mask.len());
    let mut off2 = 0.0;
    let mut sub: Vec<f64> = Vec::with_capacity(coords.len());
    for (c, &keep) in coords.iter().zip(face_mask) {
        if keep {
            sub.push(*c);
        } else {
            off2 += c * c;
        }
    }
    debug_assert!(!sub.is_empty(), "face must be nonempty");
    (off2 + simplex_projection_dist2(&sub, 1.0)).sqrt()
}

/// Maximum number of hull points the active-set solver accepts per side.
const MAX_HULL_POINTS: usize = 8;

/// Exact minimum distance between the convex hulls of two point sets given in
/// a common chart (dense coordinates of equal length).
///
/// Enumerates support pairs and solves the equality-constrained least-squares
/// problem on each; for affinely independent inputs (vertex positions of
/// genuine geometric simplices, after deduplication) the optimum's support is
/// among them and the returned value is exact. Every candidate is re-evaluated
/// at a clamped feasible point, so the result is always achieved by actual
/// hull members and never undercuts the true distance.
pub fn hull_dist(ps: &[Vec<f64>], qs: &[Vec<f64>]) -> f64 {
    let ps = dedup_points(ps);
    let qs = dedup_points(qs);
    assert!(!ps.is_empty() && !qs.is_empty(), "hulls must be nonempty");
    assert!(
        ps.len() <= MAX_HULL_POINTS && qs.len() <= MAX_HULL_POINTS,
        "hull_dist supports at most {MAX_HULL_POINTS} points per side"
    );
    let dim = ps[0].len();
    debug_assert!(ps.iter().chain(qs.iter()).all(|p| p.len() == dim));

    let mut best = f64::INFINITY;
    for smask in 1u32..(1 << ps.len()) {
        for tmask in 1u32..(1 << qs.len()) {
            if let Some(d) = subset_pair_dist(&ps, &qs, smask, tmask) {
                best = best.min(d);
            }
        }
    }
    debug_assert!(best.is_finite());
    best
}

/// Distance from one point to the convex hull of `qs`, all in a common chart.
pub fn point_to_hull_dist(p: &[f64], qs: &[Vec<f64>]) -> f64 {
    hull_dist(std::slice::from_ref(&p.to_vec()), qs)
}

fn dedup_points(pts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| q == p) {
            out.push(p.clone());
        }
    }
    out
}

/// Solve the restricted problem min |sum l_i p_i - sum m_j q_j| over the
/// affine hulls of the selected subsets, and keep the value of a clamped
/// feasible representative. Returns None when the KKT system is singular.
fn subset_pair_dist(ps: &[Vec<f64>], qs: &[Vec<f64>], smask: u32, tmask: u32) -> Option<f64> {
    let sel_p: Vec<usize> = (0..ps.len()).filter(|i| smask >> i & 1 == 1).collect();
    let sel_q: Vec<usize> = (0..qs.len()).filter(|j| tmask >> j & 1 == 1).collect();
    let m = sel_p.len() + sel_q.len();
    let n = m + 2;
    let dim = ps[0].len();

    // Columns of B: selected p's, then negated selected q's.
    let col = |k: usize, d: usize| -> f64 {
        if k < sel_p.len() {
            ps[sel_p[k]][d]
        } else {
            -qs[sel_q[k - sel_p.len()]][d]
        }
    };

    // KKT system: [2B^T B, C^T; C, 0] [z; nu] = [0; 1; 1] where C stacks the
    // two block-sum constraints.
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for r in 0..m {
        for c in 0..m {
            let mut dot = 0.0;
            for d in 0..dim {
                dot += col(r, d) * col(c, d);
            }
            a[r][c] = 2.0 * dot;
        }
        let block = if r < sel_p.len() { m } else { m + 1 };
        a[r][block] = 1.0;
        a[block][r] = 1.0;
    }
    b[m] = 1.0;
    b[m + 1] = 1.0;

    let z = solve_linear(&mut a, &mut b)?;

    // Clamp tiny negatives, renormalise each block, and evaluate the achieved
    // distance so the candidate is always realised by feasible hull points.
    const FEAS_TOL: f64 = 1e-9;
    let lambda = &z[..sel_p.len()];
    let mu = &z[sel_p.len()..m];
    if lambda.iter().chain(mu.iter()).any(|&v| v < -FEAS_TOL) {
        return None;
    }
    let norm = |w: &[f64]| -> Option<Vec<f64>> {
        let clamped: Vec<f64> = w.iter().map(|&v| v.max(0.0)).collect();
        let s: f64 = clamped.iter().sum();
        if s <= 0.0 {
            return None;
        }
        Some(clamped.iter().map(|v| v / s).collect())
    };
    let lambda = norm(lambda)?;
    let mu = norm(mu)?;
    let mut dist2 = 0.0;
    for d in 0..dim {
        let mut x = 0.0;
        for (w, &i) in lambda.iter().zip(&sel_p) {
            x += w * ps[i][d];
        }
        for (w, &j) in mu.iter().zip(&sel_q) {
            x -= w * qs[j][d];
        }
        dist2 += x * x;
    }
    Some(dist2.sqrt())
}

/// Gaussian elimination with partial pivoting. Returns None on a (near-)
/// singular system, which the subset enumeration treats as "skip".
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for colu in 0..n {
        let mut pivot = colu;
        for r in colu + 1..n {
            if a[r][colu].abs() > a[pivot][colu].abs() {
                pivot = r;
            }
        }
        if a[pivot][colu].abs() < 1e-12 {
            return None;
        }
        a.swap(colu, pivot);
        b.swap(colu, pivot);
        for r in colu + 1..n {
            let factor = a[r][colu] / a[colu][colu];
            if factor == 0.0 {
                continue;
            }
            for c in colu..n {
                a[r][c] -= factor * a[colu][c];
            }
            b[r] -= factor * b[colu];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= a[r][c] * x[c];
        }
        x[r] = acc / a[r][r];
    }
    Some(x)
}
