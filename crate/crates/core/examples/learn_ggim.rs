//! Sparse Laplacian from a sample covariance along a penalty path.

use directed_ggm::ggim::learn_ggim;
use directed_ggm::graph::{Orientation, DEFAULT_EDGE_TOLERANCE};
use directed_ggm::lasso::LassoOptions;
use directed_ggm::linalg::{simulate_diffusion, DiffusionConfig};
use directed_ggm::{Matrix, Result};

fn main() -> Result<()> {
    let l = Matrix::from_row_slice(
        4,
        4,
        &[
            1.0, -0.8, 0.0, 0.0, //
            0.0, 1.0, -0.8, 0.0, //
            0.0, 0.0, 1.0, -0.8, //
            0.0, 0.0, 0.0, 1.0,
        ],
    );
    let cfg = DiffusionConfig { sample_steps: 2_000_000, sample_stride: 20, seed: 1, ..DiffusionConfig::default() };
    let s = simulate_diffusion(&l, &cfg)?;

    let opts = LassoOptions::default();
    for rho in [1.0, 0.1, 0.01, 0.001] {
        let est = learn_ggim(&s, rho, &opts)?;
        let edges = est.edges(Orientation::Sending, 0.05);
        let list: Vec<String> = edges.iter().map(|e| format!("{}->{}", e.from, e.to)).collect();
        println!(
            "rho {rho:<6} xi {:.4}  edges(|w|>0.05) [{}]  nonzeros {}",
            est.xi,
            list.join(" "),
            est.edges(Orientation::Sending, DEFAULT_EDGE_TOLERANCE).len()
        );
    }
    Ok(())
}
