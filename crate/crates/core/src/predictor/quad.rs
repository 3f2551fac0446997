//! Closed-form prediction under the quadratic graph Laplacian prior.
//!
//! Minimizes `|y - Hx|^2 + gamma xᵀ L x` over the nine patch values, where `H`
//! samples the eight ring nodes. The normal equations
//! `(HᵀH + gamma L) x = Hᵀ y` are positive definite whenever the graph is
//! connected with positive weights, so a Cholesky solve always succeeds on
//! graphs built from real patches.

use crate::error::{Error, Result};
use crate::graph::{NodeVector, SimilarityGraph, CENTER, NODES, RING_NODES};
use crate::linalg::{Cholesky, Matrix};
use crate::patch_search::RingVector;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadSolveResult {
    pub x_star: NodeVector,
    pub center_real: f64,
    pub center_int: u8,
}

/// `Hᵀ y`: ring observations scattered onto their nodes, zero at the center.
pub fn scatter_ring(y: &RingVector) -> NodeVector {
    let mut out = [0.0; NODES];
    for (&node, &v) in RING_NODES.iter().zip(y.values()) {
        out[node] = v;
    }
    out
}

/// `HᵀH + gamma L`.
pub fn system_matrix(g: &SimilarityGraph, gamma: f64) -> Matrix<NODES> {
    let mut a = g.laplacian();
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v *= gamma;
        }
    }
    for &node in &RING_NODES {
        a[node][node] += 1.0;
    }
    a
}

/// Round half up on the 0..=255 scale, then clamp.
pub fn round_center(center_real: f64) -> u8 {
    (center_real * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn predict_quad(y: &RingVector, g: &SimilarityGraph, gamma: f64) -> Result<QuadSolveResult> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
    }
    let chol = Cholesky::factor(&system_matrix(g, gamma))?;
    let x_star = chol.solve(&scatter_ring(y));
    let center_real = x_star[CENTER];
    Ok(QuadSolveResult {
        x_star,
        center_real,
        center_int: round_center(center_real),
    })
}
