//! Interaction models for rank-deficient covariances.
//!
//! When `Σ 1 = 0` (a proper graph Laplacian with `L 1 = 0` drives the
//! process), the Lyapunov equation only holds on the complement of `1`.
//! With `Q` an orthonormal basis of that complement, the reduced quantities
//! `L̄ = Q L Qᵀ` and `Σ̄ = Q Σ Qᵀ` satisfy `L̄ Σ̄ + Σ̄ L̄ᵀ = 2I`, and the
//! equivalent Laplacians are `Ψ (I + κ) Σ⁺` for projections `Ψ` with
//! `Ψ 1 = 0`.

use crate::error::{Error, Result};
use crate::lasso::{solve_lasso, LassoOptions, LassoProblem};
use crate::linalg::{
    build_q_basis, ensure_finite, ensure_square, solve_lyapunov, unvectorize, validate_stability,
    vectorize, Matrix, SkewSymmetric, Vector,
};

const PROJECTION_TOLERANCE: f64 = 1e-9;
/// `|L 1|∞` allowed (relative to `1 + ‖L‖∞`) before a matrix is refused as
/// a Laplacian.
pub const LAPLACIAN_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ReducedCovariance {
    /// `Q S Qᵀ`
    pub sigma_bar: Matrix,
    pub q: Matrix,
    pub p: usize,
}

/// `Σ̄ = Q S Qᵀ`. Fails with [`Error::Disconnected`] when `Σ̄` is not
/// positive definite.
pub fn reduce_covariance(s: &Matrix, q: &Matrix) -> Result<ReducedCovariance> {
    let p = ensure_square(s, "covariance")?;
    ensure_finite(s)?;
    if p < 2 || q.shape() != (p - 1, p) {
        return Err(Error::Dimension(format!(
            "basis must be {}x{p}, got {}x{}",
            p.saturating_sub(1),
            q.nrows(),
            q.ncols()
        )));
    }
    if (s - s.transpose()).amax() > 1e-9 * (1.0 + s.amax()) {
        return Err(Error::InvalidArgument("covariance is not symmetric".into()));
    }
    let leak = (s * Vector::from_element(p, 1.0)).amax();
    if leak > 1e-8 * (1.0 + s.amax()) {
        log::warn!("covariance does not annihilate the all-ones vector (|S 1| = {leak:e})");
    }
    let sigma_bar = q * s * q.transpose();
    let sigma_bar = (&sigma_bar + sigma_bar.transpose()) * 0.5;
    if sigma_bar.clone().cholesky().is_none() {
        return Err(Error::Disconnected);
    }
    Ok(ReducedCovariance { sigma_bar, q: q.clone(), p })
}

/// Covariance of a connected Laplacian (`L 1 = 0`) on the complement of `1`:
/// `Qᵀ Σ̄ Q` with `Σ̄` solving the reduced Lyapunov equation.
pub fn stationary_covariance_semidef(l: &Matrix) -> Result<Matrix> {
    let p = ensure_square(l, "Laplacian")?;
    let q = build_q_basis(p)?;
    let l_bar = &q * l * q.transpose();
    let sigma_bar = solve_lyapunov(&l_bar)?;
    Ok(q.transpose() * sigma_bar * q)
}

fn check_projection(psi: &Matrix) -> Result<()> {
    let p = psi.nrows();
    let scale = 1.0 + psi.amax();
    if (psi * psi - psi).amax() > PROJECTION_TOLERANCE * scale {
        return Err(Error::NotProjection("Ψ² ≠ Ψ".into()));
    }
    if (psi * Vector::from_element(p, 1.0)).amax() > PROJECTION_TOLERANCE * scale {
        return Err(Error::NotProjection("Ψ 1 ≠ 0".into()));
    }
    Ok(())
}

fn pseudo_inverse(m: &Matrix) -> Result<Matrix> {
    let svd = m.clone().svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max().max(f64::MIN_POSITIVE);
    svd.pseudo_inverse(cutoff).map_err(|e| Error::Singular(e.to_string()))
}

/// `L(Ψ, κ) = Ψ (I + κ) Σ⁺`.
pub fn family_member_semidef(sigma: &Matrix, psi: &Matrix, kappa: &SkewSymmetric) -> Result<Matrix> {
    let p = ensure_square(sigma, "covariance")?;
    if psi.shape() != (p, p) || kappa.dim() != p {
        return Err(Error::Dimension("Ψ, κ and Σ must share a dimension".into()));
    }
    ensure_finite(sigma)?;
    check_projection(psi)?;
    Ok(psi * (Matrix::identity(p, p) + kappa.to_matrix()) * pseudo_inverse(sigma)?)
}

/// `‖2I − (L̄ Σ̄ + Σ̄ L̄ᵀ)‖∞` with `L̄ = Q L Qᵀ`.
pub fn reduced_lyapunov_residual(l: &Matrix, reduced: &ReducedCovariance) -> f64 {
    let l_bar = &reduced.q * l * reduced.q.transpose();
    crate::linalg::lyapunov_residual(&l_bar, &reduced.sigma_bar)
}

/// Linear system in `vec(L)` (column-major, `p²` unknowns): the upper
/// triangle of `Q L Qᵀ Σ̄ + Σ̄ (Q L Qᵀ)ᵀ = 2I` (`p(p−1)/2` rows, `(r, s)`
/// with `r ≤ s` lexicographic), optionally followed by the `p` row-sum
/// equations `L 1 = 0`.
#[derive(Debug, Clone)]
pub struct SemidefSystem {
    pub g: Matrix,
    pub rhs: Vector,
    pub p: usize,
    /// Rows `0..lyapunov_rows` are the reduced Lyapunov equations.
    pub lyapunov_rows: usize,
    pub reduced: ReducedCovariance,
}

impl SemidefSystem {
    /// `‖rhs − G vec(L)‖₂` restricted to the reduced Lyapunov rows.
    pub fn reduced_residual(&self, l: &Matrix) -> f64 {
        let r = &self.rhs - &self.g * vectorize(l);
        r.rows(0, self.lyapunov_rows).norm()
    }
}

pub fn build_semidef_system(s: &Matrix, laplacian_rows: bool) -> Result<SemidefSystem> {
    let p = ensure_square(s, "covariance")?;
    let q = build_q_basis(p)?;
    let reduced = reduce_covariance(s, &q)?;
    let r_mat = q.transpose() * &reduced.sigma_bar; // p x (p-1)
    let pairs: Vec<(usize, usize)> = (0..p - 1).flat_map(|r| (r..p - 1).map(move |s| (r, s))).collect();
    let lyapunov_rows = pairs.len();
    let total = lyapunov_rows + if laplacian_rows { p } else { 0 };
    let mut g = Matrix::zeros(total, p * p);
    let mut rhs = Vector::zeros(total);
    for (row, &(r, s_)) in pairs.iter().enumerate() {
        for b in 0..p {
            for a in 0..p {
                g[(row, a + b * p)] = q[(r, a)] * r_mat[(b, s_)] + q[(s_, a)] * r_mat[(b, r)];
            }
        }
        if r == s_ {
            rhs[row] = 2.0;
        }
    }
    if laplacian_rows {
        for i in 0..p {
            for m in 0..p {
                g[(lyapunov_rows + i, i + m * p)] = 1.0;
            }
        }
    }
    Ok(SemidefSystem { g, rhs, p, lyapunov_rows, reduced })
}

#[derive(Debug, Clone)]
pub struct SemidefOptions {
    pub lasso: LassoOptions,
    /// Append `L 1 = 0` to the fitted system so the estimate is a proper
    /// Laplacian; without it the components of `L` along `1` are left to the
    /// penalty alone.
    pub laplacian_rows: bool,
}

impl Default for SemidefOptions {
    fn default() -> Self {
        Self { lasso: LassoOptions::default(), laplacian_rows: true }
    }
}

#[derive(Debug, Clone)]
pub struct SemidefGgimEstimate {
    pub l_hat: Matrix,
    pub rho: f64,
    /// `‖2I − (L̄ Σ̄ + Σ̄ L̄ᵀ)‖₂` over the upper-triangle equations.
    pub reduced_residual: f64,
    /// `|L̂ 1|∞`
    pub row_sum_residual: f64,
    pub psi_hat: Option<Matrix>,
    pub kappa_hat: Option<SkewSymmetric>,
    pub converged: bool,
    pub iterations: usize,
}

pub fn learn_ggim_semidef(s: &Matrix, rho: f64, opts: &SemidefOptions) -> Result<SemidefGgimEstimate> {
    let sys = build_semidef_system(s, opts.laplacian_rows)?;
    let problem = LassoProblem::new(sys.g.clone(), sys.rhs.clone(), rho)?;
    let sol = solve_lasso(&problem, &opts.lasso)?;
    let p = sys.p;
    let l_hat = unvectorize(&sol.x, p, p)?;
    let reduced_residual = sys.reduced_residual(&l_hat);
    let row_sum_residual = (&l_hat * Vector::from_element(p, 1.0)).amax();
    let (psi_hat, kappa_hat) = match recover_psi_kappa(&l_hat, s) {
        Ok(rec) => (Some(rec.psi), Some(rec.kappa)),
        Err(e) => {
            log::warn!("projection recovery skipped: {e}");
            (None, None)
        }
    };
    Ok(SemidefGgimEstimate {
        l_hat,
        rho,
        reduced_residual,
        row_sum_residual,
        psi_hat,
        kappa_hat,
        converged: sol.converged,
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone)]
pub struct PsiKappa {
    pub psi: Matrix,
    /// Representative with `κ 1 = 0`; components of `κ` along `1` do not
    /// affect `Ψ (I + κ) Σ⁺`.
    pub kappa: SkewSymmetric,
    pub skew_defect: f64,
}

/// `Ψ̂ = I − 1 vᵀ / (vᵀ 1)` for the left null vector `v` of `L̂` (so
/// `Ψ̂ L̂ = L̂` and `Ψ̂ 1 = 0`), and `κ̂ = Qᵀ κ̄ Q` with `κ̄` the skew part of
/// `L̄ Σ̄ − I`.
pub fn recover_psi_kappa(l_hat: &Matrix, s: &Matrix) -> Result<PsiKappa> {
    let p = ensure_square(l_hat, "Laplacian")?;
    ensure_finite(l_hat)?;
    let ones = Vector::from_element(p, 1.0);
    let max_row_sum = (l_hat * &ones).amax();
    if max_row_sum > LAPLACIAN_TOLERANCE * (1.0 + l_hat.amax()) {
        return Err(Error::NotLaplacian { max_row_sum });
    }
    let q = build_q_basis(p)?;
    let reduced = reduce_covariance(s, &q)?;
    let l_bar = &q * l_hat * q.transpose();
    if !validate_stability(&l_bar)? {
        let min_real_part = crate::linalg::min_real_eigenvalue(&l_bar)?;
        return Err(Error::Unstable { min_real_part });
    }

    let svd = l_hat.clone().svd(true, false);
    let u = svd.u.ok_or_else(|| Error::Singular("SVD of the Laplacian".into()))?;
    let (idx, _) = svd.singular_values.argmin();
    let v = u.column(idx).into_owned();
    let mass = v.sum();
    if mass.abs() < 1e-12 {
        return Err(Error::Disconnected);
    }
    let psi = Matrix::identity(p, p) - &ones * v.transpose() / mass;

    let (kappa_bar, skew_defect) =
        SkewSymmetric::from_matrix(&(&l_bar * &reduced.sigma_bar - Matrix::identity(p - 1, p - 1)))?;
    let (kappa, _) = SkewSymmetric::from_matrix(&(q.transpose() * kappa_bar.to_matrix() * &q))?;
    Ok(PsiKappa { psi, kappa, skew_defect })
}
