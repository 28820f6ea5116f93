//! Edge extraction from learned matrices.
//!
//! Learned matrices use the sensing convention: a nonzero `(i, j)` entry
//! means node `i` senses the state of node `j`. The sending graph is the
//! transpose.

use serde::{Deserialize, Serialize};

use crate::linalg::Matrix;

pub const DEFAULT_EDGE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Sensing,
    #[default]
    Sending,
}

impl Orientation {
    /// Re-orients a sensing-convention matrix.
    pub fn apply(self, sensing: &Matrix) -> Matrix {
        match self {
            Orientation::Sensing => sensing.clone(),
            Orientation::Sending => sensing.transpose(),
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sensing" => Ok(Orientation::Sensing),
            "sending" => Ok(Orientation::Sending),
            other => Err(format!("unknown orientation '{other}' (expected sensing|sending)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    /// Set when a Laplacian off-diagonal was positive, i.e. the implied
    /// adjacency weight is negative. Kept rather than clipped.
    pub sign_violation: bool,
}

/// Directed edges of a Laplacian `L = D - A`: `|L_ij| > tol`, weight `-L_ij`.
/// Sorted by `(from, to)`.
pub fn laplacian_edges(l: &Matrix, orientation: Orientation, tol: f64) -> Vec<Edge> {
    collect(&orientation.apply(l), tol, |v| -v)
}

/// Directed edges of an adjacency-like matrix (weight is the entry itself).
pub fn adjacency_edges(a: &Matrix, orientation: Orientation, tol: f64) -> Vec<Edge> {
    collect(&orientation.apply(a), tol, |v| v)
}

fn collect(m: &Matrix, tol: f64, weight: impl Fn(f64) -> f64) -> Vec<Edge> {
    let p = m.nrows();
    let mut edges = Vec::new();
    for i in 0..p {
        for j in 0..p {
            if i != j && m[(i, j)].abs() > tol {
                let w = weight(m[(i, j)]);
                edges.push(Edge { from: i, to: j, weight: w, sign_violation: w < 0.0 });
            }
        }
    }
    edges
}
