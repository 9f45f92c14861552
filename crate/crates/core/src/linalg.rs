//! SVD-based rank, null space and least-squares helpers.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff used throughout unless overridden.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Singular values below `tol * 1e-3` or above `tol * 1e3` (relative to the
/// largest) are treated as clear-cut; anything in between marks the rank
/// decision as borderline.
const BORDERLINE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankDecision {
    pub rank: usize,
    pub borderline: bool,
}

/// Singular values in descending order.
pub fn singular_values(mat: &DMatrix<f64>) -> Vec<f64> {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values exceeding `tol` times the largest one.
pub fn numeric_rank(mat: &DMatrix<f64>, tol: f64) -> usize {
    rank_decision(mat, tol).rank
}

pub fn rank_decision(mat: &DMatrix<f64>, tol: f64) -> RankDecision {
    assert!(tol > 0.0, "rank tolerance must be positive");
    let sv = singular_values(mat);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return RankDecision {
            rank: 0,
            borderline: false,
        };
    }
    let rel = sv.iter().map(|s| s / top);
    let rank = rel.clone().filter(|&r| r > tol).count();
    let borderline = rel
        .into_iter()
        .any(|r| r > tol / BORDERLINE_FACTOR && r < tol * BORDERLINE_FACTOR);
    RankDecision { rank, borderline }
}

/// Full SVD of `mat` padded with zero rows to at least square shape, so the
/// right factor spans all of R^ncols. Returns (singular values, V) with the
/// columns of V matched to the values, sorted descending.
fn full_right_svd(mat: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let (r, c) = mat.shape();
    let padded = if r >= c {
        mat.clone()
    } else {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(mat);
        p
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = DMatrix::from_fn(c, c, |row, col| v_t[(order[col], row)]);
    (values, v)
}

/// Orthonormal basis (as columns) of the numerical null space of `mat`.
pub fn null_space(mat: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let c = mat.ncols();
    if mat.nrows() == 0 || c == 0 {
        return DMatrix::identity(c, c);
    }
    let (values, v) = full_right_svd(mat);
    let top = values[0];
    let rank = if top == 0.0 {
        0
    } else {
        values.iter().filter(|&&s| s / top > tol).count()
    };
    v.columns(rank, c - rank).into_owned()
}

/// Minimum-norm least-squares solution of `mat · x = rhs`.
pub fn least_squares(mat: &DMatrix<f64>, rhs: &DVector<f64>, tol: f64) -> DVector<f64> {
    if mat.nrows() == 0 {
        return DVector::zeros(mat.ncols());
    }
    let svd = mat.clone().svd(true, true);
    let top = svd.singular_values.max();
    let eps = if top == 0.0 { 0.0 } else { tol * top };
    svd.solve(rhs, eps).expect("both factors computed")
}
