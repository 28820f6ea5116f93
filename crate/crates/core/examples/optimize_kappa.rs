//! Sparsest member of the drift family for a given covariance, by exact LP.

use directed_ggm::ggim::optimize_kappa;
use directed_ggm::graph::{laplacian_edges, Orientation, DEFAULT_EDGE_TOLERANCE};
use directed_ggm::{Matrix, Result};

fn main() -> Result<()> {
    let sigma = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
    let opt = optimize_kappa(&sigma)?;
    println!("kappa_12 = {}", opt.kappa.get(0, 1));
    println!("L* = {:.6}", opt.laplacian);
    println!("sum |L*_ij| = {}", opt.objective);
    for e in laplacian_edges(&opt.laplacian, Orientation::Sending, DEFAULT_EDGE_TOLERANCE) {
        println!("edge {} -> {} weight {}", e.from + 1, e.to + 1, e.weight);
    }

    let sigma = Matrix::from_row_slice(
        3,
        3,
        &[1.0, 0.4, 0.1, 0.4, 1.2, 0.3, 0.1, 0.3, 0.9],
    );
    let opt = optimize_kappa(&sigma)?;
    println!("\n3x3 objective {:.6}, L* = {:.5}", opt.objective, opt.laplacian);
    Ok(())
}
