use nalgebra::Matrix2;

use super::dense::{ensure_finite, ensure_square, Matrix};
use crate::error::{Error, Result};

/// Conditional covariance of variables `j`, `k` given all others.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalStats {
    pub j: usize,
    pub k: usize,
    /// `Σ_{j|c}`
    pub sigma_j: f64,
    /// `Σ_{k|c}`
    pub sigma_k: f64,
    /// `Σ_{j,k|c}`
    pub sigma_jk: f64,
}

impl ConditionalStats {
    pub fn as_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.sigma_j, self.sigma_jk, self.sigma_jk, self.sigma_k)
    }
}

/// Indices of the complement of `{j, k}` in `0..p`, ascending.
pub(crate) fn complement(p: usize, j: usize, k: usize) -> Vec<usize> {
    (0..p).filter(|&i| i != j && i != k).collect()
}

/// Schur complement `S_aa - S_ac S_cc⁻¹ S_ca` for `a = {j, k}` and `c` the
/// remaining variables. With `p = 2` the conditioning set is empty and the
/// unconditional entries are returned.
pub fn conditional_stats(s: &Matrix, j: usize, k: usize) -> Result<ConditionalStats> {
    let p = ensure_square(s, "covariance")?;
    ensure_finite(s)?;
    if j == k || j >= p || k >= p {
        return Err(Error::InvalidArgument(format!(
            "conditional pair ({j}, {k}) invalid for p = {p}"
        )));
    }
    let a = [j, k];
    let c = complement(p, j, k);
    let mut block = Matrix2::from_fn(|r, q| s[(a[r], a[q])]);
    if !c.is_empty() {
        let s_cc = s.select_rows(&c).select_columns(&c);
        let s_ca = s.select_rows(&c).select_columns(&a);
        let chol = s_cc
            .cholesky()
            .ok_or_else(|| Error::Singular(format!("conditioning block for pair ({j}, {k})")))?;
        let solved = chol.solve(&s_ca);
        let corr = s_ca.transpose() * solved;
        block -= Matrix2::from_fn(|r, q| corr[(r, q)]);
    }
    let stats = ConditionalStats {
        j,
        k,
        sigma_j: block[(0, 0)],
        sigma_k: block[(1, 1)],
        sigma_jk: 0.5 * (block[(0, 1)] + block[(1, 0)]),
    };
    if !(stats.sigma_j > 0.0 && stats.sigma_k > 0.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "conditional variances for pair ({j}, {k}) are not positive"
        )));
    }
    Ok(stats)
}
