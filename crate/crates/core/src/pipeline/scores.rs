use rayon::prelude::*;

use super::data::{center, sample_covariance, CenterMode, ObservationSet};
use crate::error::{Error, Result};
use crate::ggcem::{learn_ggcem, learn_ggcem_extended, GgcemEstimate};
use crate::ggim::{learn_ggim, learn_ggim_bounded, GgimEstimate};
use crate::graph::{laplacian_edges, Edge, Orientation};
use crate::lasso::LassoOptions;
use crate::linalg::Matrix;
use crate::semidef::{learn_ggim_semidef, SemidefGgimEstimate, SemidefOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GgimVariant {
    #[default]
    Full,
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GgcemVariant {
    #[default]
    Basic,
    Extended,
}

#[derive(Debug, Clone, Default)]
pub struct FitOptions {
    pub lasso: LassoOptions,
    pub center: CenterMode,
    pub ggim: GgimVariant,
    pub ggcem: GgcemVariant,
    /// Diagonal margin of the bounded variant; `None` uses its default.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum GgimFit {
    Definite(GgimEstimate),
    Semidefinite(SemidefGgimEstimate),
}

impl GgimFit {
    pub fn laplacian(&self) -> &Matrix {
        match self {
            GgimFit::Definite(e) => &e.l_hat,
            GgimFit::Semidefinite(e) => &e.l_hat,
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            GgimFit::Definite(e) => e.converged,
            GgimFit::Semidefinite(e) => e.converged,
        }
    }

    pub fn edges(&self, orientation: Orientation, tol: f64) -> Vec<Edge> {
        laplacian_edges(self.laplacian(), orientation, tol)
    }
}

#[derive(Debug, Clone)]
pub struct ConditionFit {
    pub covariance: Matrix,
    pub ggim: GgimFit,
    /// Absent when the covariance is singular; the pairwise conditioning
    /// needs invertible blocks.
    pub ggcem: Option<GgcemEstimate>,
}

/// Relative eigenvalue floor below which a sample covariance is treated as
/// singular.
const DEFINITE_TOLERANCE: f64 = 1e-10;

fn is_positive_definite(s: &Matrix) -> bool {
    let eig = s.clone().symmetric_eigen().eigenvalues;
    let max = eig.max();
    max > 0.0 && eig.min() > DEFINITE_TOLERANCE * max
}

/// Centers, forms the sample covariance and fits both models. Singular
/// covariances go to the semidefinite interaction model and skip the
/// conditional-expectation model.
pub fn fit_condition(obs: &ObservationSet, rho: f64, opts: &FitOptions) -> Result<ConditionFit> {
    let centered = center(obs, opts.center)?;
    let s = sample_covariance(&centered);
    if !is_positive_definite(&s) {
        log::info!("sample covariance is singular; using the semidefinite interaction model");
        let semi = SemidefOptions { lasso: opts.lasso.clone(), ..SemidefOptions::default() };
        let ggim = GgimFit::Semidefinite(learn_ggim_semidef(&s, rho, &semi)?);
        return Ok(ConditionFit { covariance: s, ggim, ggcem: None });
    }
    let ggim = match opts.ggim {
        GgimVariant::Full => learn_ggim(&s, rho, &opts.lasso)?,
        GgimVariant::Bounded => learn_ggim_bounded(&s, rho, opts.delta, &opts.lasso)?,
    };
    let ggcem = match opts.ggcem {
        GgcemVariant::Basic => learn_ggcem(&s, rho, &opts.lasso)?,
        GgcemVariant::Extended => learn_ggcem_extended(&s, rho, &opts.lasso)?,
    };
    Ok(ConditionFit { covariance: s, ggim: GgimFit::Definite(ggim), ggcem: Some(ggcem) })
}

/// Non-negative directed scores with zero diagonal, already oriented.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeScoreMatrix {
    pub scores: Matrix,
    pub orientation: Orientation,
}

impl EdgeScoreMatrix {
    pub fn p(&self) -> usize {
        self.scores.nrows()
    }
}

/// `Σ_c (|L̂_c| + |P̂_c|) / tr(S_c)` over off-diagonal entries.
pub fn hybrid_edge_scores(fits: &[ConditionFit], orientation: Orientation) -> Result<EdgeScoreMatrix> {
    let first = fits.first().ok_or_else(|| Error::InvalidArgument("no condition fits".into()))?;
    let p = first.covariance.nrows();
    let mut total = Matrix::zeros(p, p);
    for fit in fits {
        if fit.covariance.nrows() != p {
            return Err(Error::Dimension("conditions disagree on the number of variables".into()));
        }
        let trace = fit.covariance.trace();
        if !(trace > 0.0) {
            return Err(Error::Data("condition with zero total variance".into()));
        }
        let mut raw = fit.ggim.laplacian().abs();
        if let Some(g) = &fit.ggcem {
            raw += g.p_hat.abs();
        }
        total += raw / trace;
    }
    total.fill_diagonal(0.0);
    Ok(EdgeScoreMatrix { scores: orientation.apply(&total), orientation })
}

#[derive(Debug, Clone)]
pub struct HybridResult {
    pub conditions: Vec<(String, ConditionFit)>,
    pub scores: EdgeScoreMatrix,
}

/// Splits by condition, fits every condition in parallel and combines the
/// scores. Condition order (and hence the result) does not depend on
/// scheduling.
pub fn run_hybrid(
    obs: &ObservationSet,
    rho: f64,
    opts: &FitOptions,
    orientation: Orientation,
) -> Result<HybridResult> {
    let groups = obs.split_by_condition()?;
    let conditions = groups
        .into_par_iter()
        .map(|(label, set)| {
            match fit_condition(&set, rho, opts) {
                Ok(fit) => Ok((label, fit)),
                Err(Error::Data(msg)) if !label.is_empty() => {
                    Err(Error::Data(format!("condition '{label}': {msg}")))
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let fits: Vec<ConditionFit> = conditions.iter().map(|(_, f)| f.clone()).collect();
    let scores = hybrid_edge_scores(&fits, orientation)?;
    Ok(HybridResult { conditions, scores })
}

/// Parses `a:b:n` into `n` log-spaced values from `a` down to `b` (or up,
/// when `b > a`; callers sort as needed).
pub fn parse_rho_path(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("rho path '{spec}' is not of the form a:b:n"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || n == 0 {
        return Err(Error::InvalidArgument(format!("rho path '{spec}' needs positive ends and n >= 1")));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok((0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect())
}
