//! Multi-condition pipeline: simulate three conditions over a shared
//! network, fit both models per condition, combine scores and evaluate ROC.

use directed_ggm::graph::Orientation;
use directed_ggm::linalg::{sample_diffusion, DiffusionConfig};
use directed_ggm::pipeline::{roc_auc, run_hybrid, FitOptions, ObservationSet};
use directed_ggm::{Matrix, Result};

fn main() -> Result<()> {
    let p = 6;
    // sending edges of the shared network
    let gold = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 3)];
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    // Self-decay rates differ across nodes and shift between conditions.
    // With equal rates everywhere the edge direction is close to
    // unidentifiable and the scores mostly recover the skeleton.
    let decay = [1.0, 1.4, 0.8, 1.2, 0.9, 1.5];
    for c in 0..3 {
        let mut l = Matrix::zeros(p, p);
        for i in 0..p {
            l[(i, i)] = decay[(i + 2 * c) % p];
        }
        for (k, &(from, to)) in gold.iter().enumerate() {
            l[(to, from)] = -(0.4 + 0.15 * ((k + c) % 4) as f64);
        }
        let cfg = DiffusionConfig {
            dt: 0.01,
            sample_steps: 5000 * 100,
            sample_stride: 100,
            seed: 100 + c as u64,
            ..DiffusionConfig::default()
        };
        let x = sample_diffusion(&l, &cfg)?;
        for r in x.row_iter() {
            rows.extend(r.iter().copied());
            labels.push(format!("c{c}"));
        }
    }
    let names = (0..p).map(|i| format!("g{i}")).collect();
    let data = Matrix::from_row_slice(labels.len(), p, &rows);
    let obs = ObservationSet::new(names, data, None, Some(labels))?;

    for rho in [0.1, 0.01, 0.001] {
        let result = run_hybrid(&obs, rho, &FitOptions::default(), Orientation::Sending)?;
        let roc = roc_auc(&result.scores, &gold)?;
        println!("rho {rho:<6} AUC {:.4} over {} thresholds", roc.auc, roc.thresholds);
    }
    Ok(())
}
