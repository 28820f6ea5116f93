//! Euler-Maruyama sampling of the stationary diffusion, compared with the
//! exact Lyapunov covariance.

use directed_ggm::linalg::{simulate_diffusion, solve_lyapunov, DiffusionConfig};
use directed_ggm::{Matrix, Result};

fn main() -> Result<()> {
    let l = Matrix::from_row_slice(3, 3, &[1.5, -0.5, 0.0, 0.0, 1.0, -0.7, -0.4, 0.0, 1.2]);
    let exact = solve_lyapunov(&l)?;
    for steps in [100_000, 1_000_000, 10_000_000] {
        let cfg = DiffusionConfig { sample_steps: steps, seed: 7, ..DiffusionConfig::default() };
        let emp = simulate_diffusion(&l, &cfg)?;
        let rel = (&emp - &exact).norm() / exact.norm();
        println!("{steps:>9} steps: relative Frobenius error {rel:.4}");
    }
    Ok(())
}
