//! Laplacian recovery when the covariance is singular along the all-ones
//! direction (consensus-type dynamics).

use directed_ggm::semidef::{learn_ggim_semidef, stationary_covariance_semidef, SemidefOptions};
use directed_ggm::{Matrix, Result};

fn main() -> Result<()> {
    // directed 4-cycle with unit weights
    let l = Matrix::from_row_slice(
        4,
        4,
        &[1.0, -1.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0, 0.0, 1.0, -1.0, -1.0, 0.0, 0.0, 1.0],
    );
    let s = stationary_covariance_semidef(&l)?;
    println!("S = {s:.4}");

    let est = learn_ggim_semidef(&s, 1e-6, &SemidefOptions::default())?;
    println!("L_hat = {:.4}", est.l_hat);
    println!("reduced residual {:.2e}, |L_hat 1|max {:.2e}", est.reduced_residual, est.row_sum_residual);
    if let Some(psi) = &est.psi_hat {
        println!("Psi = {psi:.4}");
    }
    Ok(())
}
