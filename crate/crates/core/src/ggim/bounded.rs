//! Interaction-model learning with the diagonal eliminated.
//!
//! The diagonal equations of `L S + S Lᵀ = 2I` fix `L_ii` given the
//! off-diagonals. Substituting them into the off-diagonal equations leaves a
//! LASSO over the `p² − p` off-diagonal entries only. The diagonal is then
//! lifted until the Lyapunov operator of `L̂` is strictly diagonally dominant,
//! which yields `‖Σ̂ − S‖∞ ≤ ξ / α`.

use super::{build_full_system, GgimEstimate};
use crate::error::{Error, Result};
use crate::lasso::{solve_lasso, LassoOptions, LassoProblem};
use crate::linalg::{
    diag_dominance_alpha, ensure_finite, ensure_square, lyapunov_operator, norm_linf_elementwise,
    offdiag_positions, Matrix, Vector,
};

/// `H̃ ζ = β` over the off-diagonal entries `ζ` (column-major order), one
/// row per pair `j < k` in lexicographic order.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub h_tilde: Matrix,
    pub beta: Vector,
    pub p: usize,
    /// Covariance the system was built from; the diagonal of `L` is
    /// reconstructed from it.
    pub s: Matrix,
}

/// Column of off-diagonal entry `(row, col)` in the column-major off-diagonal
/// ordering.
pub(crate) fn offdiag_index(p: usize, row: usize, col: usize) -> usize {
    debug_assert!(row != col);
    col * (p - 1) + if row < col { row } else { row - 1 }
}

pub(crate) fn lower_pairs(p: usize) -> Vec<(usize, usize)> {
    (0..p).flat_map(|j| (j + 1..p).map(move |k| (j, k))).collect()
}

pub(crate) fn offdiag_matrix(p: usize, zeta: &Vector) -> Matrix {
    let mut m = Matrix::zeros(p, p);
    for (t, (r, c)) in offdiag_positions(p).into_iter().enumerate() {
        m[(r, c)] = zeta[t];
    }
    m
}

pub fn build_reduced_system(s: &Matrix) -> Result<ReducedSystem> {
    let p = ensure_square(s, "covariance")?;
    ensure_finite(s)?;
    if let Some(i) = (0..p).find(|&i| s[(i, i)] <= 0.0) {
        return Err(Error::InvalidArgument(format!("covariance has non-positive diagonal entry {i}")));
    }
    let pairs = lower_pairs(p);
    let mut h = Matrix::zeros(pairs.len(), p * p - p);
    let mut beta = Vector::zeros(pairs.len());
    for (r, &(j, k)) in pairs.iter().enumerate() {
        let (sjj, skk, sjk) = (s[(j, j)], s[(k, k)], s[(j, k)]);
        for i in (0..p).filter(|&i| i != j) {
            h[(r, offdiag_index(p, j, i))] += sjk * s[(j, i)] / sjj - s[(k, i)];
        }
        for l in (0..p).filter(|&l| l != k) {
            h[(r, offdiag_index(p, k, l))] += sjk * s[(k, l)] / skk - s[(j, l)];
        }
        beta[r] = sjk / sjj + sjk / skk;
    }
    Ok(ReducedSystem { h_tilde: h, beta, p, s: s.clone() })
}

#[derive(Debug, Clone)]
pub struct DiagonalCompletion {
    /// Final diagonal `base + epsilon`.
    pub diag: Vector,
    pub epsilon: Vector,
    /// Diagonal forced by the unconstrained diagonal equations.
    pub base: Vector,
    /// Largest off-diagonal absolute row sum.
    pub nu_row: f64,
    /// Largest off-diagonal absolute column sum.
    pub nu_col: f64,
}

/// Diagonal for the off-diagonals `zeta`: `base_i = (1 − Σ_{l≠i} L_il S_il) / S_ii`,
/// lifted by `ε_i = max(0, ν_r + ν_c + δ − base_i)`.
///
/// `delta = None` uses `1e-6 (1 + ν_r + ν_c)`.
pub fn complete_diagonal(zeta: &Vector, s: &Matrix, delta: Option<f64>) -> Result<DiagonalCompletion> {
    let p = ensure_square(s, "covariance")?;
    if zeta.len() != p * p - p {
        return Err(Error::Dimension(format!(
            "expected {} off-diagonal entries, got {}",
            p * p - p,
            zeta.len()
        )));
    }
    if zeta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let off = offdiag_matrix(p, zeta);
    let base = Vector::from_fn(p, |i, _| {
        let coupling: f64 = (0..p).filter(|&l| l != i).map(|l| off[(i, l)] * s[(i, l)]).sum();
        (1.0 - coupling) / s[(i, i)]
    });
    let abs = off.abs();
    let nu_row = abs.row_iter().map(|r| r.sum()).fold(0.0, f64::max);
    let nu_col = abs.column_iter().map(|c| c.sum()).fold(0.0, f64::max);
    let delta = delta.unwrap_or(1e-6 * (1.0 + nu_row + nu_col));
    let floor = nu_row + nu_col + delta;
    let epsilon = base.map(|b| (floor - b).max(0.0));
    Ok(DiagonalCompletion { diag: &base + &epsilon, epsilon, base, nu_row, nu_col })
}

/// Off-diagonals from the reduced LASSO, diagonal from [`complete_diagonal`].
/// `xi` is measured against the full Lyapunov system and `alpha` is the
/// dominance margin of `I ⊗ L̂ + L̂ ⊗ I`.
pub fn learn_ggim_bounded(
    s: &Matrix,
    rho: f64,
    delta: Option<f64>,
    opts: &LassoOptions,
) -> Result<GgimEstimate> {
    let reduced = build_reduced_system(s)?;
    let problem = LassoProblem::new(reduced.h_tilde.clone(), reduced.beta.clone(), rho)?;
    let sol = solve_lasso(&problem, opts)?;
    let p = reduced.p;
    let completion = complete_diagonal(&sol.x, s, delta)?;
    let mut l_hat = offdiag_matrix(p, &sol.x);
    l_hat.set_diagonal(&completion.diag);

    let xi = build_full_system(s)?.residual(&l_hat);
    let alpha = diag_dominance_alpha(&lyapunov_operator(&l_hat))?;
    let mut est = GgimEstimate::from_laplacian(l_hat, rho, xi, &sol);
    est.alpha = Some(alpha);
    est.epsilon = Some(completion.epsilon);
    Ok(est)
}

#[derive(Debug, Clone)]
pub struct BoundCheck {
    pub xi: f64,
    pub alpha: f64,
    /// `ξ / α`
    pub bound: f64,
    /// `‖Σ̂ − S‖∞`
    pub lhs: f64,
    pub holds: bool,
    pub sigma_hat: Matrix,
}

/// Absolute slack for floating-point error in `Σ̂` when comparing against the bound.
const BOUND_SLACK: f64 = 1e-10;

/// Both sides of `‖Σ̂ − S‖∞ ≤ ξ / α` for a bounded estimate.
pub fn compute_bound(est: &GgimEstimate, s: &Matrix) -> Result<BoundCheck> {
    let alpha = est.alpha.ok_or(Error::Missing("alpha (bounded fit required)"))?;
    let sigma_hat = est.sigma_hat.clone().ok_or(Error::Missing("recovered covariance"))?;
    if sigma_hat.shape() != s.shape() {
        return Err(Error::Dimension("estimate and covariance differ in size".into()));
    }
    let bound = est.xi / alpha;
    let lhs = norm_linf_elementwise(&(&sigma_hat - s));
    Ok(BoundCheck { xi: est.xi, alpha, bound, lhs, holds: lhs <= bound + BOUND_SLACK, sigma_hat })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorollaryBound {
    /// `ξ / α + λ`
    pub value: f64,
    /// `‖Σ̃ − Σ̂‖∞` for a supplied penalized-likelihood estimate `Σ̃`.
    pub external_gap: Option<f64>,
    pub holds: Option<bool>,
}

/// Distance bound `ξ / α + λ` between `Σ̂` and an `ℓ₁`-penalized maximum
/// likelihood covariance at penalty `λ`, optionally checked against a
/// supplied `Σ̃`.
pub fn corollary_bound(
    check: &BoundCheck,
    lambda: f64,
    external: Option<&Matrix>,
) -> Result<CorollaryBound> {
    if !(lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    let value = check.bound + lambda;
    let external_gap = match external {
        Some(tilde) if tilde.shape() != check.sigma_hat.shape() => {
            return Err(Error::Dimension("external covariance differs in size".into()))
        }
        Some(tilde) => Some(norm_linf_elementwise(&(tilde - &check.sigma_hat))),
        None => None,
    };
    Ok(CorollaryBound {
        value,
        holds: external_gap.map(|g| g <= value + BOUND_SLACK),
        external_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ggim::family_member;
    use crate::linalg::{kronecker, SkewSymmetric};

    #[test]
    fn offdiag_index_matches_positions() {
        for p in 2..6 {
            for (t, (r, c)) in offdiag_positions(p).into_iter().enumerate() {
                assert_eq!(offdiag_index(p, r, c), t);
            }
        }
    }

    #[test]
    fn identity_reduces_to_zero_system() {
        let sys = build_reduced_system(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(sys.h_tilde.shape(), (3, 6));
        assert_eq!(sys.beta.amax(), 0.0);
        let d = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0, 4.0]));
        assert_eq!(build_reduced_system(&d).unwrap().beta.amax(), 0.0);
    }

    #[test]
    fn family_member_satisfies_reduced_system() {
        let s = Matrix::from_row_slice(3, 3, &[1.8, 0.4, -0.3, 0.4, 1.2, 0.25, -0.3, 0.25, 0.9]);
        let mut k = SkewSymmetric::zeros(3);
        k.set(0, 1, 0.6);
        k.set(1, 2, -0.35);
        k.set(0, 2, 0.2);
        let l = family_member(&s, &k).unwrap();
        let zeta = Vector::from_iterator(6, offdiag_positions(3).into_iter().map(|(r, c)| l[(r, c)]));
        let sys = build_reduced_system(&s).unwrap();
        assert!((&sys.h_tilde * &zeta - &sys.beta).amax() < 1e-10);
        let comp = complete_diagonal(&zeta, &s, Some(0.0)).unwrap();
        assert!((comp.base - l.diagonal()).amax() < 1e-10);
    }

    #[test]
    fn zero_diagonal_is_rejected() {
        let s = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 0.0]));
        assert!(build_reduced_system(&s).is_err());
    }

    #[test]
    fn completion_examples() {
        let c = complete_diagonal(&Vector::zeros(6), &Matrix::identity(3, 3), None).unwrap();
        assert_eq!(c.diag.as_slice(), &[1.0; 3]);
        assert_eq!(c.epsilon.as_slice(), &[0.0; 3]);

        let zeta = Vector::from_vec(vec![-1.5, -1.5]); // L10, L01
        let c = complete_diagonal(&zeta, &Matrix::identity(2, 2), Some(0.01)).unwrap();
        assert_eq!(c.nu_row + c.nu_col, 3.0);
        assert_eq!(c.base.as_slice(), &[1.0, 1.0]);
        assert!((c.diag[0] - 3.01).abs() < 1e-12);
        assert!((c.epsilon[0] - 2.01).abs() < 1e-12);
    }

    #[test]
    fn completion_makes_both_operators_dominant() {
        let zeta = Vector::from_vec(vec![0.7, -1.2, 0.3, -0.4, 2.0, -0.1]);
        let s = Matrix::from_row_slice(3, 3, &[1.8, 0.4, -0.3, 0.4, 1.2, 0.25, -0.3, 0.25, 0.9]);
        let c = complete_diagonal(&zeta, &s, None).unwrap();
        let mut l = offdiag_matrix(3, &zeta);
        l.set_diagonal(&c.diag);
        assert!(diag_dominance_alpha(&lyapunov_operator(&l)).is_ok());
        let eye = Matrix::identity(3, 3);
        let transposed = kronecker(&eye, &l) + kronecker(&l.transpose(), &eye);
        assert!(diag_dominance_alpha(&transposed).is_ok());
    }

    #[test]
    fn bounded_identity_and_diagonal() {
        let est = learn_ggim_bounded(&Matrix::identity(3, 3), 0.1, None, &LassoOptions::default()).unwrap();
        assert!((&est.l_hat - Matrix::identity(3, 3)).amax() < 1e-15);
        assert_eq!(est.xi, 0.0);
        assert_eq!(est.alpha, Some(2.0));
        let b = compute_bound(&est, &Matrix::identity(3, 3)).unwrap();
        assert_eq!(b.lhs, 0.0);
        assert_eq!(b.bound, 0.0);
        assert!(b.holds);

        let d = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0]));
        let est = learn_ggim_bounded(&d, 0.1, None, &LassoOptions::default()).unwrap();
        assert!((est.l_hat[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((est.l_hat[(1, 1)] - 1.0).abs() < 1e-15);
        assert!(est.xi < 1e-15);
    }

    #[test]
    fn corollary_examples() {
        let est = learn_ggim_bounded(&Matrix::identity(2, 2), 0.1, None, &LassoOptions::default()).unwrap();
        let mut b = compute_bound(&est, &Matrix::identity(2, 2)).unwrap();
        assert_eq!(corollary_bound(&b, 0.0, None).unwrap().value, b.bound);
        b.bound = 0.3;
        assert!((corollary_bound(&b, 0.1, None).unwrap().value - 0.4).abs() < 1e-15);
        assert!(corollary_bound(&b, -1.0, None).is_err());
    }

    #[test]
    fn bound_requires_alpha() {
        let est = crate::ggim::learn_ggim(&Matrix::identity(2, 2), 0.01, &LassoOptions::default()).unwrap();
        assert!(matches!(compute_bound(&est, &Matrix::identity(2, 2)), Err(Error::Missing(_))));
    }
}
