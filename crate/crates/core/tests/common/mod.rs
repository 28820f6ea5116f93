#![allow(dead_code)]

use directed_ggm::{Matrix, SkewSymmetric, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_fn(r, c, |_, _| gaussian(rng))
}

/// `B Bᵀ / p + shift I`, comfortably conditioned.
pub fn random_spd(rng: &mut ChaCha8Rng, p: usize, shift: f64) -> Matrix {
    let b = random_matrix(rng, p, p);
    let s = &b * b.transpose() / p as f64 + Matrix::identity(p, p) * shift;
    (&s + s.transpose()) * 0.5
}

pub fn random_skew(rng: &mut ChaCha8Rng, p: usize, scale: f64) -> SkewSymmetric {
    let upper = (0..p * (p - 1) / 2).map(|_| scale * gaussian(rng)).collect();
    SkewSymmetric::from_upper(p, upper).unwrap()
}

/// Stable asymmetric drift: a diagonally dominant matrix with a positive diagonal.
pub fn random_stable(rng: &mut ChaCha8Rng, p: usize) -> Matrix {
    let mut l = random_matrix(rng, p, p) * 0.4;
    for i in 0..p {
        let off: f64 = (0..p).filter(|&j| j != i).map(|j| l[(i, j)].abs()).sum();
        l[(i, i)] = off + 0.5 + rng.random::<f64>();
    }
    l
}

/// Directed Laplacian `D − A` (sensing convention) of a strongly connected
/// graph: a directed ring plus random extra edges, positive weights.
pub fn random_connected_laplacian(rng: &mut ChaCha8Rng, p: usize) -> Matrix {
    let mut a = Matrix::zeros(p, p);
    for i in 0..p {
        a[(i, (i + 1) % p)] = 0.5 + rng.random::<f64>();
    }
    for i in 0..p {
        for j in 0..p {
            if i != j && a[(i, j)] == 0.0 && rng.random::<f64>() < 0.3 {
                a[(i, j)] = 0.2 + rng.random::<f64>();
            }
        }
    }
    let mut l = -a.clone();
    for i in 0..p {
        l[(i, i)] = a.row(i).sum();
    }
    l
}

/// Direct double-loop Lyapunov residual `max |L Σ + Σ Lᵀ − 2I|`.
pub fn lyapunov_residual_loop(l: &Matrix, sigma: &Matrix) -> f64 {
    let p = l.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let mut v = 0.0;
            for k in 0..p {
                v += l[(i, k)] * sigma[(k, j)] + sigma[(i, k)] * l[(j, k)];
            }
            if i == j {
                v -= 2.0;
            }
            worst = worst.max(v.abs());
        }
    }
    worst
}

/// Probability that a random positive outranks a random negative, ties
/// counted as one half, by enumerating every (positive, negative) pair.
pub fn pairwise_auc(scores: &Matrix, gold: &[(usize, usize)]) -> f64 {
    let p = scores.nrows();
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for i in 0..p {
        for j in 0..p {
            if i != j {
                if gold.contains(&(i, j)) {
                    pos.push(scores[(i, j)]);
                } else {
                    neg.push(scores[(i, j)]);
                }
            }
        }
    }
    let mut wins = 0.0;
    for &a in &pos {
        for &b in &neg {
            wins += if a > b {
                1.0
            } else if a == b {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// For 2x2 `Σ`, `Σ |L(k)_ij|` with `L(k) = [[1, k], [−k, 1]] Σ⁻¹` is
/// piecewise linear in `k`; its minimum sits at a breakpoint where some
/// entry vanishes. Returns `(k*, objective)`.
pub fn breakpoint_scan_p2(sigma: &Matrix) -> (f64, f64) {
    let (a, b, d) = (sigma[(0, 0)], sigma[(0, 1)], sigma[(1, 1)]);
    let det = a * d - b * b;
    let inv = [[d / det, -b / det], [-b / det, a / det]];
    // entry (i, j) of L(k) is u_ij + k v_ij
    let mut u = [[0.0; 2]; 2];
    let mut v = [[0.0; 2]; 2];
    for j in 0..2 {
        u[0][j] = inv[0][j];
        v[0][j] = inv[1][j];
        u[1][j] = inv[1][j];
        v[1][j] = -inv[0][j];
    }
    let objective = |k: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                s += (u[i][j] + k * v[i][j]).abs();
            }
        }
        s
    };
    let mut best = (0.0, objective(0.0));
    for i in 0..2 {
        for j in 0..2 {
            if v[i][j] != 0.0 {
                let k = -u[i][j] / v[i][j];
                let f = objective(k);
                if f < best.1 {
                    best = (k, f);
                }
            }
        }
    }
    best
}

pub fn lasso_objective(a: &Matrix, b: &Vector, rho: f64, x: &Vector) -> f64 {
    (b - a * x).norm_squared() + rho * x.lp_norm(1)
}

/// Compass search along coordinate axes with step halving. For a smooth
/// convex loss plus a separable penalty, a point with no improving axis move
/// at every step size is a global minimizer.
pub fn coordinate_search_lasso(a: &Matrix, b: &Vector, rho: f64) -> (Vector, f64) {
    let d = a.ncols();
    let mut x = Vector::zeros(d);
    let mut f = lasso_objective(a, b, rho, &x);
    let mut step = 1.0 + b.amax();
    while step > 1e-13 {
        let mut improved = false;
        for j in 0..d {
            for dir in [1.0, -1.0] {
                loop {
                    let mut y = x.clone();
                    y[j] += dir * step;
                    let fy = lasso_objective(a, b, rho, &y);
                    if fy < f {
                        x = y;
                        f = fy;
                        improved = true;
                    } else {
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, f)
}
