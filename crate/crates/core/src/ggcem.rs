//! Conditional-expectation models.
//!
//! For a steady-state pair `(Σ, L)` and any pair of variables `a = {j, k}`
//! with complement `b`, the conditional expectation of the precision block,
//!
//! ```text
//! P̃_aa = L_aa + Σ_ab Σ_bb⁻¹ (P_ba − L_ba),   P = Σ⁻¹,
//! ```
//!
//! satisfies the 2x2 Lyapunov equation `P̃_aa Σ_{a|b} + Σ_{a|b} P̃_aaᵀ = 2I`.
//! Eliminating its diagonal gives one balance equation per pair between the
//! two off-diagonal entries. The learned adjacency `P̂` collects those
//! off-diagonals with adjacency sign (`P̂_jk = −P̃_jk`, as `A = −L` off the
//! diagonal), so its balance equations read
//!
//! ```text
//! P̂_jk (Σ_k|c − Σ_jk|c² / Σ_j|c) + P̂_kj (Σ_j|c − Σ_jk|c² / Σ_k|c) = Σ_jk|c / Σ_j|c + Σ_jk|c / Σ_k|c.
//! ```

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::ggim::{lower_pairs, offdiag_index, offdiag_matrix};
use crate::graph::{adjacency_edges, Edge, Orientation};
use crate::lasso::{solve_lasso, LassoOptions, LassoProblem};
use crate::linalg::{
    conditional_stats, ensure_finite, ensure_square, lyapunov_residual, spd_inverse,
    ConditionalStats, Matrix, Vector,
};

fn complement(p: usize, j: usize, k: usize) -> Vec<usize> {
    (0..p).filter(|&i| i != j && i != k).collect()
}

/// `P̃_aa` for `a = {j, k}`: the 2x2 block of `L` corrected by the
/// conditional mean of the precision columns given the remaining rows.
/// With `p = 2` the correction is empty and `L` itself is returned.
pub fn conditional_expectation_matrix(
    sigma: &Matrix,
    l: &Matrix,
    j: usize,
    k: usize,
) -> Result<Matrix2<f64>> {
    let p = ensure_square(sigma, "covariance")?;
    if l.shape() != (p, p) {
        return Err(Error::Dimension("Laplacian and covariance differ in size".into()));
    }
    if j == k || j >= p || k >= p {
        return Err(Error::InvalidArgument(format!("pair ({j}, {k}) invalid for p = {p}")));
    }
    let precision = spd_inverse(sigma)?;
    expectation_block(sigma, &precision, l, j, k)
}

fn expectation_block(
    sigma: &Matrix,
    precision: &Matrix,
    l: &Matrix,
    j: usize,
    k: usize,
) -> Result<Matrix2<f64>> {
    let a = [j, k];
    let b = complement(sigma.nrows(), j, k);
    let mut block = Matrix2::from_fn(|r, c| l[(a[r], a[c])]);
    if b.is_empty() {
        return Ok(block);
    }
    let s_bb = sigma.select_rows(&b).select_columns(&b);
    let s_ba = sigma.select_rows(&b).select_columns(&a);
    let diff = precision.select_rows(&b).select_columns(&a) - l.select_rows(&b).select_columns(&a);
    let chol = s_bb
        .cholesky()
        .ok_or_else(|| Error::Singular(format!("conditioning block for pair ({j}, {k})")))?;
    // Σ_ab Σ_bb⁻¹ (P_ba − L_ba)
    let corr = s_ba.transpose() * chol.solve(&diff);
    block += Matrix2::from_fn(|r, c| corr[(r, c)]);
    Ok(block)
}

fn pair_violation(x: &Matrix2<f64>, st: &ConditionalStats) -> f64 {
    let (c1, c2, c12) = (st.sigma_j, st.sigma_k, st.sigma_jk);
    x[(0, 1)] * (c12 * c12 / c1 - c2) + x[(1, 0)] * (c12 * c12 / c2 - c1) - (c12 / c1 + c12 / c2)
}

/// Largest absolute violation of the pairwise balance equations over all
/// pairs, without checking that `(Σ, L)` is a steady-state pair.
pub fn balance_violation(sigma: &Matrix, l: &Matrix) -> Result<f64> {
    let p = ensure_square(sigma, "covariance")?;
    if l.shape() != (p, p) {
        return Err(Error::Dimension("Laplacian and covariance differ in size".into()));
    }
    let precision = spd_inverse(sigma)?;
    let mut worst = 0.0f64;
    for (j, k) in lower_pairs(p) {
        let x = expectation_block(sigma, &precision, l, j, k)?;
        let st = conditional_stats(sigma, j, k)?;
        worst = worst.max(pair_violation(&x, &st).abs());
    }
    Ok(worst)
}

/// Lyapunov residual allowed before [`verify_balance`] rejects its input,
/// relative to `1 + ‖L‖∞ ‖Σ‖∞`.
pub const BALANCE_INPUT_TOLERANCE: f64 = 1e-8;

/// [`balance_violation`] for a pair that must satisfy `L Σ + Σ Lᵀ = 2I`.
pub fn verify_balance(sigma: &Matrix, l: &Matrix) -> Result<f64> {
    ensure_square(sigma, "covariance")?;
    if l.shape() != sigma.shape() {
        return Err(Error::Dimension("Laplacian and covariance differ in size".into()));
    }
    let residual = lyapunov_residual(l, sigma);
    let tolerance = BALANCE_INPUT_TOLERANCE * (1.0 + l.amax() * sigma.amax());
    if !(residual <= tolerance) {
        return Err(Error::LyapunovResidual { residual, tolerance });
    }
    balance_violation(sigma, l)
}

/// `W y = d` over the off-diagonal adjacency entries (column-major order),
/// one row per pair `j < k`.
#[derive(Debug, Clone)]
pub struct GgcemSystem {
    pub w: Matrix,
    pub d: Vector,
    pub p: usize,
}

fn pair_stats(s: &Matrix) -> Result<Vec<ConditionalStats>> {
    let p = ensure_square(s, "covariance")?;
    ensure_finite(s)?;
    lower_pairs(p).into_iter().map(|(j, k)| conditional_stats(s, j, k)).collect()
}

pub fn build_ggcem_system(s: &Matrix) -> Result<GgcemSystem> {
    let p = ensure_square(s, "covariance")?;
    let stats = pair_stats(s)?;
    let mut w = Matrix::zeros(stats.len(), p * p - p);
    let mut d = Vector::zeros(stats.len());
    for (r, st) in stats.iter().enumerate() {
        let (c1, c2, c12) = (st.sigma_j, st.sigma_k, st.sigma_jk);
        w[(r, offdiag_index(p, st.j, st.k))] = c2 - c12 * c12 / c1;
        w[(r, offdiag_index(p, st.k, st.j))] = c1 - c12 * c12 / c2;
        d[r] = c12 / c1 + c12 / c2;
    }
    Ok(GgcemSystem { w, d, p })
}

#[derive(Debug, Clone)]
pub struct GgcemEstimate {
    /// Learned adjacency, sensing convention, zero diagonal.
    pub p_hat: Matrix,
    pub rho: f64,
    /// `‖d − W ŷ‖₂` of the system that was solved.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl GgcemEstimate {
    pub fn edges(&self, orientation: Orientation, tol: f64) -> Vec<Edge> {
        adjacency_edges(&self.p_hat, orientation, tol)
    }
}

pub fn learn_ggcem(s: &Matrix, rho: f64, opts: &LassoOptions) -> Result<GgcemEstimate> {
    let sys = build_ggcem_system(s)?;
    let problem = LassoProblem::new(sys.w, sys.d, rho)?;
    let sol = solve_lasso(&problem, opts)?;
    Ok(GgcemEstimate {
        p_hat: offdiag_matrix(sys.p, &sol.x),
        rho,
        residual: sol.residual_l2,
        converged: sol.converged,
        iterations: sol.iterations,
    })
}

/// All three components of the pairwise 2x2 Lyapunov equation, with the two
/// diagonal entries of each `P̃_aa` as pair-local auxiliary unknowns.
///
/// Columns `0..p²−p` are the off-diagonal adjacency entries (same order as
/// [`GgcemSystem`]); column `p²−p + 2t` and `p²−p + 2t + 1` hold the
/// auxiliaries of pair `t`. Rows come in triples per pair: diagonal `j`,
/// diagonal `k`, off-diagonal.
#[derive(Debug, Clone)]
pub struct ExtendedGgcemSystem {
    pub w_ext: Matrix,
    pub d_ext: Vector,
    pub p: usize,
    /// `(pair (j, k), column of P̃_jj, column of P̃_kk)`.
    pub aux_columns: Vec<((usize, usize), usize, usize)>,
}

pub fn build_extended_system(s: &Matrix) -> Result<ExtendedGgcemSystem> {
    let p = ensure_square(s, "covariance")?;
    let stats = pair_stats(s)?;
    let off = p * p - p;
    let mut w = Matrix::zeros(3 * stats.len(), 2 * off);
    let mut d = Vector::zeros(3 * stats.len());
    let mut aux_columns = Vec::with_capacity(stats.len());
    for (t, st) in stats.iter().enumerate() {
        let (c1, c2, c12) = (st.sigma_j, st.sigma_k, st.sigma_jk);
        let (ajk, akj) = (offdiag_index(p, st.j, st.k), offdiag_index(p, st.k, st.j));
        let (xj, xk) = (off + 2 * t, off + 2 * t + 1);
        let r = 3 * t;
        // adjacency unknowns enter with the sign flipped: P̃_jk = −P̂_jk
        w[(r, xj)] = 2.0 * c1;
        w[(r, ajk)] = -2.0 * c12;
        d[r] = 2.0;
        w[(r + 1, xk)] = 2.0 * c2;
        w[(r + 1, akj)] = -2.0 * c12;
        d[r + 1] = 2.0;
        w[(r + 2, xj)] = c12;
        w[(r + 2, xk)] = c12;
        w[(r + 2, ajk)] = -c2;
        w[(r + 2, akj)] = -c1;
        aux_columns.push(((st.j, st.k), xj, xk));
    }
    Ok(ExtendedGgcemSystem { w_ext: w, d_ext: d, p, aux_columns })
}

/// LASSO on the extended system; auxiliaries are dropped from the result.
pub fn learn_ggcem_extended(s: &Matrix, rho: f64, opts: &LassoOptions) -> Result<GgcemEstimate> {
    let (est, _) = learn_ggcem_extended_with_aux(s, rho, opts)?;
    Ok(est)
}

/// As [`learn_ggcem_extended`], also returning the fitted auxiliaries in
/// [`ExtendedGgcemSystem::aux_columns`] order.
pub fn learn_ggcem_extended_with_aux(
    s: &Matrix,
    rho: f64,
    opts: &LassoOptions,
) -> Result<(GgcemEstimate, Vec<(f64, f64)>)> {
    let sys = build_extended_system(s)?;
    let off = sys.p * sys.p - sys.p;
    let problem = LassoProblem::new(sys.w_ext, sys.d_ext, rho)?;
    let sol = solve_lasso(&problem, opts)?;
    let y = Vector::from_iterator(off, sol.x.iter().take(off).copied());
    let aux = sys.aux_columns.iter().map(|&(_, a, b)| (sol.x[a], sol.x[b])).collect();
    let est = GgcemEstimate {
        p_hat: offdiag_matrix(sys.p, &y),
        rho,
        residual: sol.residual_l2,
        converged: sol.converged,
        iterations: sol.iterations,
    };
    Ok((est, aux))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ggim::family_member;
    use crate::linalg::SkewSymmetric;

    fn s3() -> Matrix {
        Matrix::from_row_slice(3, 3, &[1.8, 0.4, -0.3, 0.4, 1.2, 0.25, -0.3, 0.25, 0.9])
    }

    fn member3() -> Matrix {
        let mut k = SkewSymmetric::zeros(3);
        k.set(0, 1, 0.6);
        k.set(1, 2, -0.35);
        k.set(0, 2, 0.2);
        family_member(&s3(), &k).unwrap()
    }

    #[test]
    fn symmetric_member_returns_precision_block() {
        let s = s3();
        let prec = s.clone().try_inverse().unwrap();
        let x = conditional_expectation_matrix(&s, &prec, 0, 2).unwrap();
        assert!((x[(0, 0)] - prec[(0, 0)]).abs() < 1e-12);
        assert!((x[(0, 1)] - prec[(0, 2)]).abs() < 1e-12);
        assert!((x[(1, 1)] - prec[(2, 2)]).abs() < 1e-12);
    }

    #[test]
    fn two_variables_return_l() {
        let s = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let l = Matrix::from_row_slice(2, 2, &[0.5, 0.0, -1.5, 2.5]);
        let x = conditional_expectation_matrix(&s, &l, 0, 1).unwrap();
        assert_eq!(x, Matrix2::new(0.5, 0.0, -1.5, 2.5));
    }

    #[test]
    fn pairwise_lyapunov_identity() {
        let (s, l) = (s3(), member3());
        for (j, k) in lower_pairs(3) {
            let x = conditional_expectation_matrix(&s, &l, j, k).unwrap();
            let c = conditional_stats(&s, j, k).unwrap().as_matrix();
            let r = x * c + c * x.transpose() - Matrix2::identity() * 2.0;
            assert!(r.amax() < 1e-10);
        }
    }

    #[test]
    fn identity_balance() {
        let i = Matrix::identity(4, 4);
        assert_eq!(verify_balance(&i, &i).unwrap(), 0.0);
        assert!(verify_balance(&s3(), &member3()).unwrap() < 1e-10);
    }

    #[test]
    fn verify_rejects_non_members() {
        let mut l = member3();
        l[(0, 1)] += 0.3;
        assert!(matches!(verify_balance(&s3(), &l), Err(Error::LyapunovResidual { .. })));
        assert!(balance_violation(&s3(), &l).unwrap() > 1e-4);
    }

    #[test]
    fn two_variable_system() {
        let s = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let sys = build_ggcem_system(&s).unwrap();
        // columns: P̂_10, P̂_01
        assert_eq!(sys.w.shape(), (1, 2));
        assert!((sys.w[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((sys.w[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((sys.d[0] - 1.5).abs() < 1e-15);

        let est = learn_ggcem(&s, 1e-9, &LassoOptions::default()).unwrap();
        assert!((est.p_hat[(1, 0)] - 1.5).abs() < 1e-6);
        assert_eq!(est.p_hat[(0, 1)], 0.0);
    }

    #[test]
    fn member_expectations_satisfy_system() {
        let (s, l) = (s3(), member3());
        let sys = build_ggcem_system(&s).unwrap();
        let prec = spd_inverse(&s).unwrap();
        let mut y = Vector::zeros(6);
        for (j, k) in lower_pairs(3) {
            let x = expectation_block(&s, &prec, &l, j, k).unwrap();
            y[offdiag_index(3, j, k)] = -x[(0, 1)];
            y[offdiag_index(3, k, j)] = -x[(1, 0)];
        }
        assert!((&sys.w * y - &sys.d).amax() < 1e-10);
    }

    #[test]
    fn diagonal_covariance_gives_empty_graph() {
        let d = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 1.0, 0.5]));
        let sys = build_ggcem_system(&d).unwrap();
        assert_eq!(sys.d.amax(), 0.0);
        assert_eq!(learn_ggcem(&d, 0.01, &LassoOptions::default()).unwrap().p_hat.amax(), 0.0);

        let (est, aux) = learn_ggcem_extended_with_aux(&d, 1e-9, &LassoOptions::default()).unwrap();
        assert_eq!(est.p_hat.amax(), 0.0);
        for (((j, k), _, _), (xj, xk)) in build_extended_system(&d).unwrap().aux_columns.iter().zip(aux) {
            assert!((xj - 1.0 / d[(*j, *j)]).abs() < 1e-6);
            assert!((xk - 1.0 / d[(*k, *k)]).abs() < 1e-6);
        }
    }

    #[test]
    fn large_rho_gives_empty_graph() {
        let s = s3();
        let sys = build_ggcem_system(&s).unwrap();
        let rho_max = 2.0 * (sys.w.transpose() * &sys.d).amax();
        let est = learn_ggcem(&s, rho_max * 1.01, &LassoOptions::default()).unwrap();
        assert_eq!(est.p_hat.amax(), 0.0);
    }

    #[test]
    fn extended_dimensions() {
        let s = Matrix::identity(4, 4);
        let sys = build_extended_system(&s).unwrap();
        assert_eq!(sys.w_ext.shape(), (18, 24));
    }

    #[test]
    fn extended_admits_member_expectations() {
        let (s, l) = (s3(), member3());
        let sys = build_extended_system(&s).unwrap();
        let prec = spd_inverse(&s).unwrap();
        let mut z = Vector::zeros(12);
        for ((j, k), xj, xk) in &sys.aux_columns {
            let x = expectation_block(&s, &prec, &l, *j, *k).unwrap();
            z[offdiag_index(3, *j, *k)] = -x[(0, 1)];
            z[offdiag_index(3, *k, *j)] = -x[(1, 0)];
            z[*xj] = x[(0, 0)];
            z[*xk] = x[(1, 1)];
        }
        assert!((&sys.w_ext * z - &sys.d_ext).amax() < 1e-10);
    }
}
