//! Conditional-expectation adjacency, basic and extended systems.

use directed_ggm::ggcem::{learn_ggcem, learn_ggcem_extended, verify_balance};
use directed_ggm::lasso::LassoOptions;
use directed_ggm::linalg::solve_lyapunov;
use directed_ggm::{Matrix, Result};

fn main() -> Result<()> {
    let l = Matrix::from_row_slice(3, 3, &[1.2, -0.6, 0.0, 0.0, 1.0, -0.4, 0.0, 0.0, 0.8]);
    let sigma = solve_lyapunov(&l)?;
    println!("balance violation of the true pair (Sigma, L): {:.2e}", verify_balance(&sigma, &l)?);

    let opts = LassoOptions::default();
    for rho in [0.1, 0.001] {
        let basic = learn_ggcem(&sigma, rho, &opts)?;
        let ext = learn_ggcem_extended(&sigma, rho, &opts)?;
        println!("rho {rho}\n  basic    P = {:.4}  extended P = {:.4}", basic.p_hat, ext.p_hat);
    }
    Ok(())
}
