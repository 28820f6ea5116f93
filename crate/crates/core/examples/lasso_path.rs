//! Coordinate-descent LASSO along a warm-started penalty path.

use directed_ggm::lasso::{rho_path, LassoOptions, LassoProblem};
use directed_ggm::{Matrix, Result, Vector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (m, d) = (40, 12);
    let a = Matrix::from_fn(m, d, |_, _| StandardNormal.sample(&mut rng));
    let truth = Vector::from_fn(d, |j, _| if j % 4 == 0 { 1.0 + j as f64 / 4.0 } else { 0.0 });
    let noise = Vector::from_fn(m, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        0.05 * z
    });
    let b = &a * &truth + noise;

    let problem = LassoProblem::new(a, b, 1.0)?;
    let top = problem.rho_max();
    let rhos: Vec<f64> = (0..8).map(|k| top * 0.3f64.powi(k)).collect();
    let path = rho_path(&problem, &rhos, &LassoOptions::default())?;
    for (rho, sol) in rhos.iter().zip(&path) {
        let nnz = sol.x.iter().filter(|v| v.abs() > 1e-12).count();
        println!("rho {rho:>10.4}  nnz {nnz:>2}  sweeps {:>4}  objective {:.5}", sol.iterations, sol.objective);
    }
    println!("truth  {:.3}", truth.transpose());
    println!("last   {:.3}", path.last().unwrap().x.transpose());
    Ok(())
}
