//! Directed Gaussian graphical models learned from stationary Gaussian data.
//!
//! Observations are treated as samples of the stationary diffusion
//! `dx = -L x dt + sigma dW`, whose steady-state covariance solves
//! `L Sigma + Sigma L^T = 2 I`. Two directed graphs are learned from a
//! covariance estimate:
//!
//! * the interaction model ([`ggim`]): a sparse Laplacian `L` fitted to the
//!   Lyapunov equation by LASSO, optionally with a diagonal chosen so the
//!   implied covariance provably stays within `xi / alpha` of the sample
//!   covariance;
//! * the conditional-expectation model ([`ggcem`]): a sparse adjacency fitted
//!   to the pairwise balance equations between conditional covariances.
//!
//! [`semidef`] handles rank-deficient covariances by reducing onto the
//! complement of the all-ones vector, and [`pipeline`] provides ingestion,
//! hybrid edge scoring and ROC evaluation.
//!
//! Matrices are `nalgebra::DMatrix<f64>`; vectorization is column-major
//! throughout, so `vec(A X B) = (B^T ⊗ A) vec(X)`.

// `!(x >= 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod ggcem;
pub mod ggim;
pub mod graph;
pub mod lasso;
pub mod linalg;
pub mod pipeline;
pub mod semidef;

pub use error::{Error, Result};
pub use linalg::{Matrix, SkewSymmetric, Vector};
