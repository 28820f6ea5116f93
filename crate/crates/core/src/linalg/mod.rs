//! Dense kernels shared by every learner: Kronecker/vec plumbing, the
//! Lyapunov solve, conditional Gaussian statistics, the orthonormal basis of
//! the complement of `1`, and a seeded diffusion simulator.

mod conditional;
mod dense;
mod diffusion;
mod lyapunov;
mod qbasis;

pub use conditional::{conditional_stats, ConditionalStats};
pub use dense::{
    diag_dominance_alpha, ensure_finite, ensure_square, kronecker, norm_l1_elementwise,
    norm_linf_elementwise, offdiag_positions, spd_inverse, unvectorize, vectorize, Matrix,
    SkewSymmetric, Vector,
};
pub use diffusion::{sample_diffusion, simulate_diffusion, DiffusionConfig};
pub use lyapunov::{
    lyapunov_operator, lyapunov_residual, min_real_eigenvalue, solve_lyapunov,
    validate_stability, STABILITY_TOLERANCE,
};
pub use qbasis::{build_q_basis, centering_projector};
