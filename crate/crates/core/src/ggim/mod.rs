//! Interaction models: sparse Laplacians `L` whose stationary covariance
//! reproduces the observed one, `L S + S Lᵀ = 2I`.
//!
//! Every `L` with this property has the form `(I + κ) Σ⁻¹` for a
//! skew-symmetric `κ`. The exact sparsest member is found by
//! [`optimize_kappa`]; from data, [`learn_ggim`] fits `L` directly by LASSO
//! and [`learn_ggim_bounded`] eliminates the diagonal so that the implied
//! covariance carries a provable distance bound to `S`.

mod bounded;

pub use bounded::{
    build_reduced_system, complete_diagonal, compute_bound, corollary_bound, learn_ggim_bounded,
    BoundCheck, CorollaryBound, DiagonalCompletion, ReducedSystem,
};
pub(crate) use bounded::{lower_pairs, offdiag_index, offdiag_matrix};

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::graph::{laplacian_edges, Edge, Orientation};
use crate::lasso::{solve_lasso, LassoOptions, LassoProblem, LassoSolution};
use crate::linalg::{
    ensure_finite, ensure_square, norm_l1_elementwise, solve_lyapunov, spd_inverse, unvectorize,
    validate_stability, vectorize, Matrix, SkewSymmetric, Vector,
};

/// `L(κ) = (I + κ) Σ⁻¹`.
pub fn family_member(sigma: &Matrix, kappa: &SkewSymmetric) -> Result<Matrix> {
    let p = ensure_square(sigma, "covariance")?;
    if kappa.dim() != p {
        return Err(Error::Dimension(format!("kappa is {0}x{0}, covariance {p}x{p}", kappa.dim())));
    }
    let precision = spd_inverse(sigma)?;
    Ok((Matrix::identity(p, p) + kappa.to_matrix()) * precision)
}

#[derive(Debug, Clone)]
pub struct KappaOptimum {
    pub kappa: SkewSymmetric,
    pub laplacian: Matrix,
    /// `‖L‖₁` at the optimum.
    pub objective: f64,
}

/// The `ℓ₁`-sparsest member of the steady-state family of `Σ`.
///
/// `min_κ ‖(I + κ) Σ⁻¹‖₁` is piecewise linear in the `p(p-1)/2` free entries
/// of `κ`; it is solved exactly as an LP with one epigraph variable `t_ab ≥
/// |L_ab|` per entry.
pub fn optimize_kappa(sigma: &Matrix) -> Result<KappaOptimum> {
    let p = ensure_square(sigma, "covariance")?;
    let precision = spd_inverse(sigma)?;

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let mut kvars = Vec::with_capacity(p * (p - 1) / 2);
    for _ in 0..p * (p - 1) / 2 {
        kvars.push(lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)));
    }
    let kappa_var = |i: usize, j: usize| -> (usize, f64) {
        // K_ij in terms of the upper-triangle unknowns
        if i < j {
            (i * p - i * (i + 1) / 2 + (j - i - 1), 1.0)
        } else {
            (j * p - j * (j + 1) / 2 + (i - j - 1), -1.0)
        }
    };
    for a in 0..p {
        for b in 0..p {
            // L_ab = P_ab + sum_{m != a} K_am P_mb
            let t = lp.add_var(1.0, (0.0, f64::INFINITY));
            let terms: Vec<(usize, f64)> = (0..p)
                .filter(|&m| m != a)
                .map(|m| {
                    let (idx, sign) = kappa_var(a, m);
                    (idx, sign * precision[(m, b)])
                })
                .collect();
            let mut upper = vec![(t, 1.0)];
            let mut lower = vec![(t, 1.0)];
            for &(idx, c) in &terms {
                upper.push((kvars[idx], -c));
                lower.push((kvars[idx], c));
            }
            lp.add_constraint(&upper[..], ComparisonOp::Ge, precision[(a, b)]);
            lp.add_constraint(&lower[..], ComparisonOp::Ge, -precision[(a, b)]);
        }
    }
    let sol = lp.solve().map_err(|e| Error::LinearProgram(e.to_string()))?;
    let kappa = SkewSymmetric::from_upper(p, kvars.iter().map(|&v| sol[v]).collect())?;
    let laplacian = (Matrix::identity(p, p) + kappa.to_matrix()) * precision;
    Ok(KappaOptimum { objective: norm_l1_elementwise(&laplacian), kappa, laplacian })
}

/// `H vec(L) = f` encoding `L S + S Lᵀ = 2I`, one row per `(i, j)` with
/// `i ≤ j` in lexicographic order.
#[derive(Debug, Clone)]
pub struct FullSystem {
    pub h: Matrix,
    pub f: Vector,
    pub p: usize,
}

impl FullSystem {
    /// `‖f − H vec(L)‖₂`
    pub fn residual(&self, l: &Matrix) -> f64 {
        (&self.f - &self.h * vectorize(l)).norm()
    }
}

/// Row order used by [`FullSystem`]: `(i, j)` with `i ≤ j`, lexicographic.
pub fn upper_pairs(p: usize) -> Vec<(usize, usize)> {
    (0..p).flat_map(|i| (i..p).map(move |j| (i, j))).collect()
}

pub fn build_full_system(s: &Matrix) -> Result<FullSystem> {
    let p = ensure_square(s, "covariance")?;
    ensure_finite(s)?;
    let rows = upper_pairs(p);
    let mut h = Matrix::zeros(rows.len(), p * p);
    let mut f = Vector::zeros(rows.len());
    for (r, &(i, j)) in rows.iter().enumerate() {
        for m in 0..p {
            h[(r, i + m * p)] += s[(m, j)];
            h[(r, j + m * p)] += s[(m, i)];
        }
        if i == j {
            f[r] = 2.0;
        }
    }
    Ok(FullSystem { h, f, p })
}

#[derive(Debug, Clone)]
pub struct GgimEstimate {
    /// Learned Laplacian, sensing convention.
    pub l_hat: Matrix,
    pub rho: f64,
    /// Covariance implied by `l_hat`; absent when `l_hat` is not stable.
    pub sigma_hat: Option<Matrix>,
    pub kappa_hat: Option<SkewSymmetric>,
    /// Largest entry of the symmetric part discarded when extracting `κ̂`.
    pub kappa_defect: Option<f64>,
    /// `‖f − H vec(L̂)‖₂` against the full Lyapunov system.
    pub xi: f64,
    /// Dominance margin of the Lyapunov operator (bounded variant only).
    pub alpha: Option<f64>,
    /// Diagonal lift (bounded variant only).
    pub epsilon: Option<Vector>,
    pub converged: bool,
    pub iterations: usize,
}

impl GgimEstimate {
    pub fn edges(&self, orientation: Orientation, tol: f64) -> Vec<Edge> {
        laplacian_edges(&self.l_hat, orientation, tol)
    }

    pub(crate) fn from_laplacian(
        l_hat: Matrix,
        rho: f64,
        xi: f64,
        sol: &LassoSolution,
    ) -> Self {
        let mut est = GgimEstimate {
            l_hat,
            rho,
            sigma_hat: None,
            kappa_hat: None,
            kappa_defect: None,
            xi,
            alpha: None,
            epsilon: None,
            converged: sol.converged,
            iterations: sol.iterations,
        };
        match recover_sigma_kappa(&est.l_hat) {
            Ok(rec) => {
                est.sigma_hat = Some(rec.sigma);
                est.kappa_hat = Some(rec.kappa);
                est.kappa_defect = Some(rec.skew_defect);
            }
            Err(e) => log::warn!("covariance recovery skipped: {e}"),
        }
        est
    }
}

#[derive(Debug, Clone)]
pub struct Recovery {
    pub sigma: Matrix,
    pub kappa: SkewSymmetric,
    pub skew_defect: f64,
}

/// `Σ̂` from `L̂ Σ̂ + Σ̂ L̂ᵀ = 2I`, then `κ̂` as the skew part of `L̂ Σ̂ − I`.
pub fn recover_sigma_kappa(l_hat: &Matrix) -> Result<Recovery> {
    if !validate_stability(l_hat)? {
        let min_real_part = crate::linalg::min_real_eigenvalue(l_hat)?;
        return Err(Error::Unstable { min_real_part });
    }
    let p = l_hat.nrows();
    let sigma = solve_lyapunov(l_hat)?;
    let m = l_hat * &sigma - Matrix::identity(p, p);
    let (kappa, skew_defect) = SkewSymmetric::from_matrix(&m)?;
    Ok(Recovery { sigma, kappa, skew_defect })
}

/// LASSO fit of `vec(L)` to the full Lyapunov system of `S`.
pub fn learn_ggim(s: &Matrix, rho: f64, opts: &LassoOptions) -> Result<GgimEstimate> {
    let sys = build_full_system(s)?;
    let problem = LassoProblem::new(sys.h.clone(), sys.f.clone(), rho)?;
    let sol = solve_lasso(&problem, opts)?;
    let l_hat = unvectorize(&sol.x, sys.p, sys.p)?;
    let xi = sol.residual_l2;
    Ok(GgimEstimate::from_laplacian(l_hat, rho, xi, &sol))
}
