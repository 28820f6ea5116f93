use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

pub fn ensure_finite(m: &Matrix) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &Matrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Kronecker product `A ⊗ B`, of size `(r_A r_B) x (c_A c_B)`.
pub fn kronecker(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Column-major vectorization.
pub fn vectorize(m: &Matrix) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &Vector, rows: usize, cols: usize) -> Result<Matrix> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "cannot reshape a vector of length {} into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(Matrix::from_column_slice(rows, cols, v.as_slice()))
}

/// Off-diagonal `(row, col)` positions of a `p x p` matrix in column-major
/// order. This is the coordinate order of every off-diagonal unknown vector.
pub fn offdiag_positions(p: usize) -> Vec<(usize, usize)> {
    (0..p)
        .flat_map(|col| (0..p).filter(move |&row| row != col).map(move |row| (row, col)))
        .collect()
}

/// Sum of absolute values of all entries.
pub fn norm_l1_elementwise(m: &Matrix) -> f64 {
    m.iter().map(|v| v.abs()).sum()
}

/// Largest absolute entry.
pub fn norm_linf_elementwise(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Minimum strict-dominance margin `min_i |a_ii| - sum_{j != i} |a_ij|`.
///
/// Fails when the margin is not positive.
pub fn diag_dominance_alpha(a: &Matrix) -> Result<f64> {
    let n = ensure_square(a, "dominance input")?;
    let mut alpha = f64::INFINITY;
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        alpha = alpha.min(a[(i, i)].abs() - off);
    }
    if alpha > 0.0 {
        Ok(alpha)
    } else {
        Err(Error::NotDiagonallyDominant { margin: alpha })
    }
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub fn spd_inverse(m: &Matrix) -> Result<Matrix> {
    ensure_square(m, "covariance")?;
    ensure_finite(m)?;
    m.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::NotPositiveDefinite("Cholesky factorization failed".into()))
}

/// A skew-symmetric matrix stored by its strict upper triangle, so
/// `K^T = -K` and `diag(K) = 0` hold by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewSymmetric {
    dim: usize,
    // (0,1), (0,2), .., (0,p-1), (1,2), ..
    upper: Vec<f64>,
}

impl SkewSymmetric {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, upper: vec![0.0; dim * dim.saturating_sub(1) / 2] }
    }

    pub fn from_upper(dim: usize, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != dim * dim.saturating_sub(1) / 2 {
            return Err(Error::Dimension(format!(
                "skew-symmetric {dim}x{dim} needs {} upper entries, got {}",
                dim * dim.saturating_sub(1) / 2,
                upper.len()
            )));
        }
        if upper.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, upper })
    }

    /// Skew part `(M - M^T) / 2` of a square matrix, together with the
    /// largest absolute entry of the discarded symmetric part.
    pub fn from_matrix(m: &Matrix) -> Result<(Self, f64)> {
        let dim = ensure_square(m, "skew source")?;
        let mut upper = Vec::with_capacity(dim * dim.saturating_sub(1) / 2);
        for i in 0..dim {
            for j in (i + 1)..dim {
                upper.push(0.5 * (m[(i, j)] - m[(j, i)]));
            }
        }
        let defect = norm_linf_elementwise(&((m + m.transpose()) * 0.5));
        Ok((Self::from_upper(dim, upper)?, defect))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.dim);
        i * self.dim - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0.0,
            Less => self.upper[self.index(i, j)],
            Greater => -self.upper[self.index(j, i)],
        }
    }

    /// Sets `K_ij = value` (and therefore `K_ji = -value`). Ignores `i == j`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => {}
            Less => {
                let k = self.index(i, j);
                self.upper[k] = value;
            }
            Greater => {
                let k = self.index(j, i);
                self.upper[k] = -value;
            }
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}
