use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dense::{ensure_finite, ensure_square, Matrix, Vector};
use super::lyapunov::{min_real_eigenvalue, STABILITY_TOLERANCE};
use crate::error::{Error, Result};

const DIVERGENCE_NORM: f64 = 1e100;

/// Euler–Maruyama settings for `dx = -L x dt + sigma dW`, started at `x = 0`.
#[derive(Debug, Clone)]
pub struct DiffusionConfig {
    pub sigma: f64,
    pub dt: f64,
    /// Steps discarded before sampling. `None` uses `10 / min Re(λ(L))`
    /// time units.
    pub burn_in_steps: Option<usize>,
    /// Integration steps after burn-in.
    pub sample_steps: usize,
    /// Record every `sample_stride`-th state.
    pub sample_stride: usize,
    pub seed: u64,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self {
            sigma: std::f64::consts::SQRT_2,
            dt: 1e-3,
            burn_in_steps: None,
            sample_steps: 10_000_000,
            sample_stride: 10,
            seed: 0,
        }
    }
}

impl DiffusionConfig {
    pub fn samples(&self) -> usize {
        self.sample_steps / self.sample_stride.max(1)
    }
}

struct Integrator<'a> {
    l: &'a Matrix,
    cfg: &'a DiffusionConfig,
    rng: ChaCha8Rng,
    x: Vector,
    buf: Vector,
    scale: f64,
    step: usize,
}

impl<'a> Integrator<'a> {
    fn new(l: &'a Matrix, cfg: &'a DiffusionConfig) -> Result<Self> {
        let p = ensure_square(l, "Laplacian")?;
        ensure_finite(l)?;
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", cfg.dt)));
        }
        if !(cfg.sigma >= 0.0 && cfg.sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be >= 0, got {}", cfg.sigma)));
        }
        if cfg.sample_stride == 0 {
            return Err(Error::InvalidArgument("sample_stride must be >= 1".into()));
        }
        Ok(Self {
            l,
            cfg,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            x: Vector::zeros(p),
            buf: Vector::zeros(p),
            scale: cfg.sigma * cfg.dt.sqrt(),
            step: 0,
        })
    }

    fn advance(&mut self) -> Result<()> {
        for b in self.buf.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            *b = self.scale * z;
        }
        self.buf.gemv(-self.cfg.dt, self.l, &self.x, 1.0);
        self.x += &self.buf;
        self.step += 1;
        if self.step.is_multiple_of(256) && !self.x.iter().all(|v| v.is_finite() && v.abs() < DIVERGENCE_NORM) {
            return Err(Error::Diverged { step: self.step });
        }
        Ok(())
    }

    fn burn_in(&mut self, min_re: f64) -> Result<()> {
        let steps = match self.cfg.burn_in_steps {
            Some(n) => n,
            None => (10.0 / min_re / self.cfg.dt).ceil() as usize,
        };
        for _ in 0..steps {
            self.advance()?;
        }
        Ok(())
    }

    fn for_each_sample(&mut self, mut f: impl FnMut(&Vector)) -> Result<usize> {
        let mut count = 0;
        for s in 1..=self.cfg.sample_steps {
            self.advance()?;
            if s % self.cfg.sample_stride == 0 {
                if !self.x.iter().all(|v| v.is_finite() && v.abs() < DIVERGENCE_NORM) {
                    return Err(Error::Diverged { step: self.step });
                }
                f(&self.x);
                count += 1;
            }
        }
        Ok(count)
    }
}

fn checked_min_re(l: &Matrix) -> Result<f64> {
    let min_re = min_real_eigenvalue(l)?;
    if min_re <= STABILITY_TOLERANCE {
        return Err(Error::Unstable { min_real_part: min_re });
    }
    Ok(min_re)
}

/// Post-burn-in states of the diffusion, one row per recorded sample.
pub fn sample_diffusion(l: &Matrix, cfg: &DiffusionConfig) -> Result<Matrix> {
    let min_re = checked_min_re(l)?;
    let mut integ = Integrator::new(l, cfg)?;
    integ.burn_in(min_re)?;
    let p = l.nrows();
    let mut rows: Vec<f64> = Vec::with_capacity(cfg.samples() * p);
    let n = integ.for_each_sample(|x| rows.extend(x.iter()))?;
    Ok(Matrix::from_row_slice(n, p, &rows))
}

/// Empirical covariance (mean-centred, `1/n`) of the post-burn-in samples.
pub fn simulate_diffusion(l: &Matrix, cfg: &DiffusionConfig) -> Result<Matrix> {
    let min_re = checked_min_re(l)?;
    let mut integ = Integrator::new(l, cfg)?;
    integ.burn_in(min_re)?;
    let p = l.nrows();
    let mut sum = Vector::zeros(p);
    let mut outer = Matrix::zeros(p, p);
    let n = integ.for_each_sample(|x| {
        sum += x;
        outer.ger(1.0, x, x, 1.0);
    })?;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two samples, got {n}"
        )));
    }
    let n = n as f64;
    let mean = sum / n;
    Ok(outer / n - &mean * mean.transpose())
}
