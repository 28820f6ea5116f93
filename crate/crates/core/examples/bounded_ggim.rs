//! Bounded variant: the learned diagonal makes the Lyapunov operator
//! diagonally dominant, so the implied covariance is certified to lie within
//! xi / alpha of the sample covariance.

use directed_ggm::ggim::{compute_bound, corollary_bound, learn_ggim_bounded};
use directed_ggm::lasso::LassoOptions;
use directed_ggm::linalg::{simulate_diffusion, DiffusionConfig};
use directed_ggm::{Matrix, Result};

fn main() -> Result<()> {
    let l = Matrix::from_row_slice(3, 3, &[1.0, -0.5, 0.0, 0.0, 1.0, -0.5, -0.5, 0.0, 1.0]);
    let cfg = DiffusionConfig { sample_steps: 1_000_000, sample_stride: 20, seed: 5, ..DiffusionConfig::default() };
    let s = simulate_diffusion(&l, &cfg)?;

    for rho in [0.1, 0.01, 0.001] {
        let est = learn_ggim_bounded(&s, rho, None, &LassoOptions::default())?;
        let check = compute_bound(&est, &s)?;
        println!(
            "rho {rho:<6} |Sigma_hat - S|max {:.4} <= xi/alpha {:.4} ({:.4}/{:.4}): {}",
            check.lhs, check.bound, check.xi, check.alpha, check.holds
        );
        let cor = corollary_bound(&check, 0.05, None)?;
        println!("           distance to a lambda=0.05 penalized estimate <= {:.4}", cor.value);
    }
    Ok(())
}
