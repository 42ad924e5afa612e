//! Small dense kernels: SVD-based rank and null space, and the two linear
//! programs the polyhedral family needs. Everything runs in `f64`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative threshold below which a singular value counts as zero.
pub const SINGULAR_THRESHOLD: f64 = 1e-10;

fn square_padded(rows: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    let size = rows.len().max(n);
    DMatrix::from_fn(size, n, |i, j| rows.get(i).map_or(0.0, |r| r[j]))
}

/// Singular values of the stacked `rows` (each of length `n`).
pub fn singular_values(rows: &[Vec<f64>], n: usize) -> Vec<f64> {
    let m = square_padded(rows, n);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv.truncate(rows.len().min(n));
    sv
}

pub fn rank(rows: &[Vec<f64>], n: usize) -> usize {
    let sv = singular_values(rows, n);
    let cut = SINGULAR_THRESHOLD * sv.first().copied().unwrap_or(0.0).max(1.0);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal (Euclidean) basis of `{z : row · z = 0 for every row}`.
pub fn null_space(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    let m = square_padded(rows, n);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = SINGULAR_THRESHOLD * smax.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut)
        .map(|(k, _)| v_t.row(k).iter().copied().collect())
        .collect()
}

/// Largest residual `|row · z|` over the rows; used to certify a null vector.
pub fn residual(rows: &[Vec<f64>], z: &[f64]) -> f64 {
    rows.iter()
        .map(|r| r.iter().zip(z).map(|(a, b)| a * b).sum::<f64>().abs())
        .fold(0.0, f64::max)
}

fn lp_err(e: minilp::Error) -> Error {
    Error::LinearProgram(e.to_string())
}

/// `max { f · x : |g_i · x| ≤ 1 }`, the dual norm of `f` for the polyhedral
/// norm `max_i |g_i · x|`. Returns the value and a maximizer.
pub fn polyhedral_dual_norm(gens: &[Vec<f64>], f: &[f64]) -> Result<(f64, Vec<f64>)> {
    let n = f.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = f
        .iter()
        .map(|&c| lp.add_var(c, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for g in gens {
        let expr: Vec<_> = vars.iter().copied().zip(g.iter().copied()).collect();
        lp.add_constraint(&expr[..], ComparisonOp::Le, 1.0);
        lp.add_constraint(&expr[..], ComparisonOp::Ge, -1.0);
    }
    let sol = lp.solve().map_err(lp_err)?;
    let x = (0..n).map(|j| sol[vars[j]]).collect();
    Ok((sol.objective(), x))
}

/// Maximizes the slack `s ≤ 1` such that `anchor · x = 1` and `|g · x| ≤ 1 − s`
/// for every `g` in `others`. A positive optimum means the face of the
/// polyhedral ball exposed by `anchor` has a relative-interior point where no
/// other generator is active.
pub fn facet_interior_point(anchor: &[f64], others: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = anchor.len();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..n)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let s = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    let anchor_expr: Vec<_> = vars.iter().copied().zip(anchor.iter().copied()).collect();
    lp.add_constraint(&anchor_expr[..], ComparisonOp::Eq, 1.0);
    for g in others {
        let mut up: Vec<_> = vars.iter().copied().zip(g.iter().copied()).collect();
        up.push((s, 1.0));
        lp.add_constraint(&up[..], ComparisonOp::Le, 1.0);
        let mut down: Vec<_> = vars.iter().copied().zip(g.iter().map(|c| -c)).collect();
        down.push((s, 1.0));
        lp.add_constraint(&down[..], ComparisonOp::Le, 1.0);
    }
    let sol = lp.solve().map_err(lp_err)?;
    let x = (0..n).map(|j| sol[vars[j]]).collect();
    Ok((sol[s], x))
}

/// Whether `p` is a convex combination of `pts`.
pub fn in_convex_hull(p: &[f64], pts: &[Vec<f64>]) -> Result<bool> {
    if pts.is_empty() {
        return Ok(false);
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let mu: Vec<_> = pts.iter().map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let ones: Vec<_> = mu.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(&ones[..], ComparisonOp::Eq, 1.0);
    for (j, &pj) in p.iter().enumerate() {
        let expr: Vec<_> = mu.iter().zip(pts).map(|(&v, q)| (v, q[j])).collect();
        lp.add_constraint(&expr[..], ComparisonOp::Eq, pj);
    }
    match lp.solve() {
        Ok(_) => Ok(true),
        Err(minilp::Error::Infeasible) => Ok(false),
        Err(e) => Err(lp_err(e)),
    }
}
