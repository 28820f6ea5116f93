mod common;

use common::*;
use directed_ggm::ggcem::{balance_violation, learn_ggcem_extended};
use directed_ggm::ggim::{family_member, recover_sigma_kappa};
use directed_ggm::graph::{laplacian_edges, Orientation};
use directed_ggm::lasso::{rho_path, solve_lasso, LassoOptions, LassoProblem};
use directed_ggm::linalg::{conditional_stats, lyapunov_residual, sample_diffusion, solve_lyapunov, DiffusionConfig};
use directed_ggm::pipeline::{
    fmt_sig, hybrid_edge_scores, read_csv, roc_auc, run_hybrid, sample_covariance, EdgeScoreMatrix, FitOptions,
    ObservationSet,
};
use directed_ggm::semidef::{recover_psi_kappa, stationary_covariance_semidef};
use directed_ggm::{Matrix, Vector};
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn lyapunov_solution_is_symmetric_and_solves(seed in any::<u64>(), p in 1usize..8) {
        let l = random_stable(&mut rng(seed), p);
        let sigma = solve_lyapunov(&l).unwrap();
        prop_assert!((&sigma - sigma.transpose()).amax() == 0.0);
        prop_assert!(lyapunov_residual_loop(&l, &sigma) < 1e-9);
        prop_assert!(sigma.clone().cholesky().is_some());
    }

    #[test]
    fn family_members_share_the_covariance(seed in any::<u64>(), p in 2usize..8, scale in 0.0f64..3.0) {
        let mut r = rng(seed);
        let sigma = random_spd(&mut r, p, 0.3);
        let kappa = random_skew(&mut r, p, scale);
        let l = family_member(&sigma, &kappa).unwrap();
        prop_assert!(lyapunov_residual(&l, &sigma) < 1e-9 * (1.0 + l.amax() * sigma.amax()));
    }

    #[test]
    fn recovery_round_trip(seed in any::<u64>(), p in 2usize..7) {
        let mut r = rng(seed);
        let sigma = random_spd(&mut r, p, 0.5);
        let kappa = random_skew(&mut r, p, 1.0);
        let l = family_member(&sigma, &kappa).unwrap();
        let rec = recover_sigma_kappa(&l).unwrap();
        prop_assert!((&rec.sigma - &sigma).amax() < 1e-8);
        prop_assert!((rec.kappa.to_matrix() - kappa.to_matrix()).amax() < 1e-8);
        prop_assert!(rec.skew_defect < 1e-8);
    }

    #[test]
    fn conditional_stats_match_precision_block(seed in any::<u64>(), p in 2usize..8) {
        let mut r = rng(seed);
        let s = random_spd(&mut r, p, 0.3);
        let j = r.random_range(0..p);
        let k = (j + 1 + r.random_range(0..p - 1)) % p;
        let st = conditional_stats(&s, j, k).unwrap();
        let prec = s.clone().try_inverse().unwrap();
        let block = Matrix::from_row_slice(2, 2, &[prec[(j, j)], prec[(j, k)], prec[(k, j)], prec[(k, k)]]);
        let cond = block.try_inverse().unwrap();
        prop_assert!((cond[(0, 0)] - st.sigma_j).abs() < 1e-9);
        prop_assert!((cond[(1, 1)] - st.sigma_k).abs() < 1e-9);
        prop_assert!((cond[(0, 1)] - st.sigma_jk).abs() < 1e-9);
    }

    #[test]
    fn family_members_satisfy_balance(seed in any::<u64>(), p in 2usize..6) {
        let mut r = rng(seed);
        let sigma = random_spd(&mut r, p, 0.5);
        let l = family_member(&sigma, &random_skew(&mut r, p, 1.0)).unwrap();
        prop_assert!(balance_violation(&sigma, &l).unwrap() < 1e-8);
    }

    #[test]
    fn lasso_solutions_satisfy_kkt(seed in any::<u64>(), m in 1usize..25, d in 1usize..15, frac in 0.001f64..1.2) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d);
        let b = Vector::from_fn(m, |_, _| gaussian(&mut r));
        let base = LassoProblem::new(a, b, 1.0).unwrap();
        let problem = base.with_rho(base.rho_max() * frac).unwrap();
        let opts = LassoOptions { trace: true, ..LassoOptions::default() };
        let sol = solve_lasso(&problem, &opts).unwrap();
        if sol.converged {
            prop_assert!(problem.kkt_violation(&sol.x) <= 1e-6);
        }
        for w in sol.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0]));
        }
        if frac >= 1.0 {
            prop_assert!(sol.x.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn warm_path_matches_cold_solves(seed in any::<u64>(), m in 3usize..20, d in 1usize..10) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d);
        let b = Vector::from_fn(m, |_, _| gaussian(&mut r));
        let base = LassoProblem::new(a, b, 1.0).unwrap();
        let rhos: Vec<f64> = [0.9, 0.3, 0.1, 0.01].iter().map(|f| f * base.rho_max()).collect();
        let opts = LassoOptions::default();
        let path = rho_path(&base, &rhos, &opts).unwrap();
        for (rho, warm) in rhos.iter().zip(&path) {
            let cold = solve_lasso(&base.with_rho(*rho).unwrap(), &opts).unwrap();
            prop_assert!((warm.objective - cold.objective).abs() < 1e-8 * (1.0 + cold.objective));
        }
    }

    #[test]
    fn small_lasso_matches_coordinate_search(seed in any::<u64>(), m in 1usize..6, d in 1usize..4, rho in 0.05f64..3.0) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, m, d);
        let b = Vector::from_fn(m, |_, _| gaussian(&mut r));
        let sol = solve_lasso(&LassoProblem::new(a.clone(), b.clone(), rho).unwrap(), &LassoOptions::default()).unwrap();
        let (_, f) = coordinate_search_lasso(&a, &b, rho);
        prop_assert!((sol.objective - f).abs() < 1e-6);
    }

    #[test]
    fn roc_equals_pairwise_estimator(seed in any::<u64>(), p in 2usize..10, levels in 1u32..8) {
        let mut r = rng(seed);
        let scores = Matrix::from_fn(p, p, |i, j| if i == j { 0.0 } else { r.random_range(0..levels) as f64 / 3.0 });
        let mut gold = vec![(0, 1)];
        for i in 0..p {
            for j in 0..p {
                if i != j && (i, j) != (0, 1) && (i, j) != (1, 0) && r.random::<f64>() < 0.4 {
                    gold.push((i, j));
                }
            }
        }
        let esm = EdgeScoreMatrix { scores: scores.clone(), orientation: Orientation::Sending };
        let roc = roc_auc(&esm, &gold).unwrap();
        prop_assert!((roc.auc - pairwise_auc(&scores, &gold)).abs() <= 1e-12);
        prop_assert_eq!(roc.points.first().copied(), Some((0.0, 0.0)));
        prop_assert_eq!(roc.points.last().copied(), Some((1.0, 1.0)));
        for w in roc.points.windows(2) {
            prop_assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn sample_covariance_matches_double_loop(seed in any::<u64>(), n in 2usize..30, p in 1usize..6) {
        let mut r = rng(seed);
        let data = random_matrix(&mut r, n, p);
        let names = (0..p).map(|i| format!("v{i}")).collect();
        let obs = ObservationSet::new(names, data.clone(), None, None).unwrap();
        let s = sample_covariance(&obs);
        for a in 0..p {
            for b in 0..p {
                let ma: f64 = (0..n).map(|i| data[(i, a)]).sum::<f64>() / n as f64;
                let mb: f64 = (0..n).map(|i| data[(i, b)]).sum::<f64>() / n as f64;
                let c: f64 = (0..n).map(|i| (data[(i, a)] - ma) * (data[(i, b)] - mb)).sum::<f64>() / n as f64;
                prop_assert!((s[(a, b)] - c).abs() < 1e-12 * (1.0 + c.abs()));
            }
        }
    }

    #[test]
    fn formatted_numbers_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs());
    }

    #[test]
    fn sending_edges_reverse_sensing_edges(seed in any::<u64>(), p in 2usize..7) {
        let l = random_connected_laplacian(&mut rng(seed), p);
        let sensing = laplacian_edges(&l, Orientation::Sensing, 1e-12);
        let sending = laplacian_edges(&l, Orientation::Sending, 1e-12);
        let mut flipped: Vec<_> = sensing.iter().map(|e| (e.to, e.from, e.weight)).collect();
        flipped.sort_by_key(|e| (e.0, e.1));
        let got: Vec<_> = sending.iter().map(|e| (e.from, e.to, e.weight)).collect();
        prop_assert_eq!(got, flipped);
        prop_assert!(sending.iter().all(|e| e.weight > 0.0 && !e.sign_violation));
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn recovered_projection_is_idempotent_and_kills_ones(seed in any::<u64>(), p in 3usize..7) {
        let l = random_connected_laplacian(&mut rng(seed), p);
        let s = stationary_covariance_semidef(&l).unwrap();
        let rec = recover_psi_kappa(&l, &s).unwrap();
        let ones = Vector::from_element(p, 1.0);
        prop_assert!((&rec.psi * &rec.psi - &rec.psi).amax() < 1e-9);
        prop_assert!((&rec.psi * ones).amax() < 1e-9);
        prop_assert!((&rec.psi * &l - &l).amax() < 1e-9);
    }

    #[test]
    fn extended_ggcem_fits_exact_covariance(seed in any::<u64>(), p in 2usize..5) {
        let mut r = rng(seed);
        let l = random_stable(&mut r, p);
        let sigma = solve_lyapunov(&l).unwrap();
        let est = learn_ggcem_extended(&sigma, 1e-9, &LassoOptions::default()).unwrap();
        prop_assert!(est.residual < 1e-5);
        prop_assert!(est.p_hat.diagonal().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hybrid_scores_add_over_conditions_and_ignore_order(seed in any::<u64>()) {
        let obs = three_conditions(seed, 200);
        let res = run_hybrid(&obs, 0.05, &FitOptions::default(), Orientation::Sending).unwrap();
        let fits: Vec<_> = res.conditions.iter().map(|(_, f)| f.clone()).collect();
        let mut sum = Matrix::zeros(4, 4);
        for f in &fits {
            sum += hybrid_edge_scores(std::slice::from_ref(f), Orientation::Sending).unwrap().scores;
        }
        prop_assert!((&sum - &res.scores.scores).amax() < 1e-12);
        let reversed: Vec<_> = fits.iter().rev().cloned().collect();
        let again = hybrid_edge_scores(&reversed, Orientation::Sending).unwrap();
        prop_assert!((&again.scores - &res.scores.scores).amax() < 1e-12);
        prop_assert!(res.scores.scores.iter().all(|&v| v >= 0.0));
        prop_assert!(res.scores.scores.diagonal().iter().all(|&v| v == 0.0));
    }
}

fn three_conditions(seed: u64, n: usize) -> ObservationSet {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3 {
        let l = random_stable(&mut r, 4);
        let cfg = DiffusionConfig {
            dt: 0.01,
            sample_steps: n * 50,
            sample_stride: 50,
            seed: seed.wrapping_add(c),
            ..DiffusionConfig::default()
        };
        let x = sample_diffusion(&l, &cfg).unwrap();
        for row in x.row_iter() {
            rows.extend(row.iter().copied());
            labels.push(format!("cond{c}"));
        }
    }
    let names = (0..4).map(|i| format!("x{i}")).collect();
    ObservationSet::new(names, Matrix::from_row_slice(labels.len(), 4, &rows), None, Some(labels)).unwrap()
}

#[test]
fn simulation_and_pipeline_are_deterministic() {
    let l = random_stable(&mut rng(3), 3);
    let cfg = DiffusionConfig { sample_steps: 20_000, sample_stride: 10, seed: 9, ..DiffusionConfig::default() };
    assert_eq!(sample_diffusion(&l, &cfg).unwrap(), sample_diffusion(&l, &cfg).unwrap());

    let obs = three_conditions(17, 300);
    let a = run_hybrid(&obs, 0.01, &FitOptions::default(), Orientation::Sending).unwrap();
    let b = run_hybrid(&obs, 0.01, &FitOptions::default(), Orientation::Sending).unwrap();
    assert_eq!(a.scores, b.scores);
}

#[test]
fn singular_covariance_routes_to_semidefinite_model() {
    // every row sums to zero, so S 1 = 0 and S has rank 2
    let csv = "a,b,c\n1,0,-1\n0,1,-1\n-1,-1,2\n2,1,-3\n";
    let obs = read_csv(csv.as_bytes()).unwrap();
    let fit = directed_ggm::pipeline::fit_condition(&obs, 0.01, &FitOptions::default()).unwrap();
    assert!(fit.ggcem.is_none());
    assert!(matches!(fit.ggim, directed_ggm::pipeline::GgimFit::Semidefinite(_)));
}
