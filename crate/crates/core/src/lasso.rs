//! Cyclic coordinate descent for `min_x ‖b − A x‖₂² + ρ‖x‖₁`.
//!
//! The objective carries no `1/(2m)` factor, so `ρ` is on the same scale as
//! the regularization values used by the graph learners.

use crate::error::{Error, Result};
use crate::linalg::{ensure_finite, Matrix, Vector};

#[derive(Debug, Clone)]
pub struct LassoProblem {
    design: Matrix,
    response: Vector,
    rho: f64,
}

impl LassoProblem {
    pub fn new(design: Matrix, response: Vector, rho: f64) -> Result<Self> {
        if design.nrows() != response.len() {
            return Err(Error::Dimension(format!(
                "design has {} rows but response has {} entries",
                design.nrows(),
                response.len()
            )));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("rho must be finite and >= 0, got {rho}")));
        }
        ensure_finite(&design)?;
        if response.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { design, response, rho })
    }

    pub fn design(&self) -> &Matrix {
        &self.design
    }

    pub fn response(&self) -> &Vector {
        &self.response
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.design.clone(), self.response.clone(), rho)
    }

    /// `‖b − A x‖₂² + ρ‖x‖₁`
    pub fn objective(&self, x: &Vector) -> f64 {
        let r = &self.response - &self.design * x;
        r.norm_squared() + self.rho * x.lp_norm(1)
    }

    /// Largest violation of the LASSO optimality conditions at `x`: for
    /// `g = 2 Aᵀ(A x − b)`, zero coordinates need `|g_j| ≤ ρ` and nonzero
    /// ones need `g_j + ρ sign(x_j) = 0`.
    pub fn kkt_violation(&self, x: &Vector) -> f64 {
        let g = self.design.transpose() * (&self.design * x - &self.response) * 2.0;
        g.iter()
            .zip(x.iter())
            .map(|(&gj, &xj)| {
                if xj == 0.0 {
                    (gj.abs() - self.rho).max(0.0)
                } else {
                    (gj + self.rho * xj.signum()).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    /// `2 ‖Aᵀ b‖∞`: the smallest `ρ` at which `x = 0` is optimal.
    pub fn rho_max(&self) -> f64 {
        2.0 * (self.design.transpose() * &self.response).amax()
    }
}

#[derive(Debug, Clone)]
pub struct LassoOptions {
    /// Converged once a full sweep moves no coordinate by this much.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub initial: Option<Vector>,
    /// Record the objective after every sweep.
    pub trace: bool,
}

impl Default for LassoOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_sweeps: 100_000, initial: None, trace: false }
    }
}

#[derive(Debug, Clone)]
pub struct LassoSolution {
    pub x: Vector,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖b − A x‖₂`
    pub residual_l2: f64,
    pub objective_trace: Vec<f64>,
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

struct Workspace<'a> {
    a: &'a [f64],
    m: usize,
    col_sq: Vec<f64>,
    half_rho: f64,
    x: Vec<f64>,
    r: Vec<f64>,
}

impl Workspace<'_> {
    fn column(&self, j: usize) -> &[f64] {
        &self.a[j * self.m..(j + 1) * self.m]
    }

    fn refresh_residual(&mut self, b: &Vector) {
        self.r.copy_from_slice(b.as_slice());
        for (j, &xj) in self.x.iter().enumerate() {
            if xj != 0.0 {
                let col = &self.a[j * self.m..(j + 1) * self.m];
                for (ri, ai) in self.r.iter_mut().zip(col) {
                    *ri -= ai * xj;
                }
            }
        }
    }

    /// Exact minimization over coordinate `j`; returns `|Δx_j|`.
    fn update(&mut self, j: usize) -> f64 {
        let old = self.x[j];
        let sq = self.col_sq[j];
        if sq == 0.0 {
            self.x[j] = 0.0;
            return old.abs();
        }
        let col = self.column(j);
        let z = col.iter().zip(&self.r).map(|(a, r)| a * r).sum::<f64>() + sq * old;
        let new = soft_threshold(z, self.half_rho) / sq;
        let delta = new - old;
        if delta != 0.0 {
            let m = self.m;
            let (a, r) = (&self.a[j * m..(j + 1) * m], &mut self.r);
            for (ri, ai) in r.iter_mut().zip(a) {
                *ri -= ai * delta;
            }
            self.x[j] = new;
        }
        delta.abs()
    }

    fn objective(&self, rho: f64) -> f64 {
        self.r.iter().map(|v| v * v).sum::<f64>() + rho * self.x.iter().map(|v| v.abs()).sum::<f64>()
    }
}

/// Cyclic coordinate descent with exact soft-threshold updates.
///
/// Full sweeps alternate with sweeps restricted to the current nonzero set;
/// convergence is only declared after a full sweep. Coordinates whose design
/// column is identically zero are fixed at 0. Running out of sweeps is not an
/// error: the solution comes back with `converged = false`.
pub fn solve_lasso(problem: &LassoProblem, opts: &LassoOptions) -> Result<LassoSolution> {
    let (m, d) = problem.design.shape();
    let x0 = match &opts.initial {
        Some(v) if v.len() != d => {
            return Err(Error::Dimension(format!(
                "initial point has length {}, expected {d}",
                v.len()
            )))
        }
        Some(v) => v.as_slice().to_vec(),
        None => vec![0.0; d],
    };
    let a = problem.design.as_slice();
    let col_sq = (0..d).map(|j| a[j * m..(j + 1) * m].iter().map(|v| v * v).sum()).collect();
    let mut ws = Workspace { a, m, col_sq, half_rho: 0.5 * problem.rho, x: x0, r: vec![0.0; m] };
    for j in 0..d {
        if ws.col_sq[j] == 0.0 {
            ws.x[j] = 0.0;
        }
    }

    let mut trace = Vec::new();
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        ws.refresh_residual(&problem.response);
        let mut max_delta = 0.0f64;
        for j in 0..d {
            max_delta = max_delta.max(ws.update(j));
        }
        sweeps += 1;
        if opts.trace {
            trace.push(ws.objective(problem.rho));
        }
        if max_delta < opts.tolerance {
            converged = true;
            break;
        }
        let active: Vec<usize> = (0..d).filter(|&j| ws.x[j] != 0.0).collect();
        while sweeps < opts.max_sweeps {
            let mut max_delta = 0.0f64;
            for &j in &active {
                max_delta = max_delta.max(ws.update(j));
            }
            sweeps += 1;
            if opts.trace {
                trace.push(ws.objective(problem.rho));
            }
            if max_delta < opts.tolerance {
                break;
            }
        }
    }
    if !converged {
        log::warn!(
            "coordinate descent did not converge in {} sweeps (rho = {:e})",
            opts.max_sweeps,
            problem.rho
        );
    }

    let x = Vector::from_vec(ws.x);
    let residual = &problem.response - &problem.design * &x;
    let residual_l2 = residual.norm();
    Ok(LassoSolution {
        objective: residual_l2 * residual_l2 + problem.rho * x.lp_norm(1),
        x,
        iterations: sweeps,
        converged,
        residual_l2,
        objective_trace: trace,
    })
}

/// Solves along a strictly descending sequence of `ρ`, warm-starting each
/// solve from the previous solution.
pub fn rho_path(
    problem: &LassoProblem,
    rhos: &[f64],
    opts: &LassoOptions,
) -> Result<Vec<LassoSolution>> {
    if rhos.is_empty() {
        return Err(Error::InvalidArgument("empty rho path".into()));
    }
    if rhos.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("rho path must be strictly descending".into()));
    }
    let mut out: Vec<LassoSolution> = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let prob = problem.with_rho(rho)?;
        let mut o = opts.clone();
        if let Some(prev) = out.last() {
            o.initial = Some(prev.x.clone());
        }
        out.push(solve_lasso(&prob, &o)?);
    }
    Ok(out)
}
