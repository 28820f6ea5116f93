use nalgebra::linalg::Schur;

use super::dense::{ensure_finite, ensure_square, kronecker, unvectorize, vectorize, Matrix};
use crate::error::{Error, Result};

/// Eigenvalues of `L` must have real parts above this to count as stable.
pub const STABILITY_TOLERANCE: f64 = 1e-10;

/// Smallest real part over the spectrum of `m`.
pub fn min_real_eigenvalue(m: &Matrix) -> Result<f64> {
    ensure_square(m, "matrix")?;
    ensure_finite(m)?;
    if m.nrows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::Indeterminate)?;
    let eig = schur.complex_eigenvalues();
    Ok(eig.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
}

/// Whether `dx = -L x dt + sigma dW` has a stationary distribution, i.e. every
/// eigenvalue of `L` has real part above [`STABILITY_TOLERANCE`].
pub fn validate_stability(l: &Matrix) -> Result<bool> {
    Ok(min_real_eigenvalue(l)? > STABILITY_TOLERANCE)
}

/// The operator `X -> L X + X L^T` on column-major `vec(X)`: `I ⊗ L + L ⊗ I`.
pub fn lyapunov_operator(l: &Matrix) -> Matrix {
    let eye = Matrix::identity(l.nrows(), l.nrows());
    kronecker(&eye, l) + kronecker(l, &eye)
}

/// `‖L Σ + Σ Lᵀ − 2I‖∞` (elementwise).
pub fn lyapunov_residual(l: &Matrix, sigma: &Matrix) -> f64 {
    let p = l.nrows();
    let r = l * sigma + sigma * l.transpose() - Matrix::identity(p, p) * 2.0;
    r.amax()
}

/// Steady-state covariance of `dx = -L x dt + sqrt(2) dW`: the unique
/// symmetric solution of `L Σ + Σ Lᵀ = 2I`.
///
/// Solved directly as the `p² x p²` Kronecker system, which is fine for the
/// desk-scale problems here (p up to a few dozen).
pub fn solve_lyapunov(l: &Matrix) -> Result<Matrix> {
    let p = ensure_square(l, "Laplacian")?;
    ensure_finite(l)?;
    let min_re = min_real_eigenvalue(l)?;
    if min_re <= STABILITY_TOLERANCE {
        return Err(Error::Unstable { min_real_part: min_re });
    }
    let rhs = vectorize(&(Matrix::identity(p, p) * 2.0));
    let x = lyapunov_operator(l)
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Lyapunov operator".into()))?;
    let sigma = unvectorize(&x, p, p)?;
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    ensure_finite(&sigma)?;
    Ok(sigma)
}
