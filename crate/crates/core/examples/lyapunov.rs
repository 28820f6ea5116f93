//! Stationary covariance of a stable drift matrix, and the family of drift
//! matrices that share it.

use directed_ggm::ggim::family_member;
use directed_ggm::linalg::{lyapunov_residual, min_real_eigenvalue, solve_lyapunov};
use directed_ggm::{Matrix, Result, SkewSymmetric};

fn main() -> Result<()> {
    // three-node chain with a feedback edge
    let l = Matrix::from_row_slice(3, 3, &[1.0, -0.6, 0.0, 0.0, 1.0, -0.6, -0.3, 0.0, 1.0]);
    println!("min Re(eig L) = {:.4}", min_real_eigenvalue(&l)?);

    let sigma = solve_lyapunov(&l)?;
    println!("Sigma = {sigma:.5}");
    println!("Lyapunov residual = {:.2e}", lyapunov_residual(&l, &sigma));

    // Any skew-symmetric kappa gives another drift with the same covariance.
    let kappa = SkewSymmetric::from_upper(3, vec![0.4, -0.2, 0.7])?;
    let other = family_member(&sigma, &kappa)?;
    println!("(I + kappa) Sigma^-1 = {other:.5}");
    println!("its residual against Sigma = {:.2e}", lyapunov_residual(&other, &sigma));
    Ok(())
}
