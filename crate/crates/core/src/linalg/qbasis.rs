use super::dense::Matrix;
use crate::error::{Error, Result};

/// Helmert basis: `(p-1) x p` with orthonormal rows spanning the complement
/// of the all-ones vector. Row `k` (0-based) is
/// `(1, .., 1, -(k+1), 0, .., 0) / sqrt((k+1)(k+2))`.
pub fn build_q_basis(p: usize) -> Result<Matrix> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("Q basis needs p >= 2, got {p}")));
    }
    let mut q = Matrix::zeros(p - 1, p);
    for k in 0..p - 1 {
        let m = (k + 1) as f64;
        let scale = 1.0 / (m * (m + 1.0)).sqrt();
        for j in 0..=k {
            q[(k, j)] = scale;
        }
        q[(k, k + 1)] = -m * scale;
    }
    Ok(q)
}

/// `P_p = I - (1/p) 1 1ᵀ`.
pub fn centering_projector(p: usize) -> Matrix {
    Matrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.0 } - 1.0 / p as f64)
}
