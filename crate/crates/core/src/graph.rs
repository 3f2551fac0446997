//! The 8-connected similarity graph over a 3x3 patch.
//!
//! Nodes are numbered row-major (node 4 is the center). Edge weights follow a
//! bilateral kernel on grid distance and on the intensity difference of the
//! matched patch.

use crate::error::{Error, Result};
use crate::image::NormalizedPatch;
use crate::linalg::Matrix;

pub const NODES: usize = 9;
pub const EDGE_COUNT: usize = 20;
pub const CENTER: usize = 4;

/// Edges `(i, j)` with `i < j`, sorted; row `k` of the incidence matrix and
/// entry `k` of every edge vector refer to `EDGES[k]`.
pub const EDGES: [(usize, usize); EDGE_COUNT] = [
    (0, 1),
    (0, 3),
    (0, 4),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 4),
    (2, 5),
    (3, 4),
    (3, 6),
    (3, 7),
    (4, 5),
    (4, 6),
    (4, 7),
    (4, 8),
    (5, 7),
    (5, 8),
    (6, 7),
    (7, 8),
];

/// Ring node for each observation slot: the sampling operator `H`.
pub const RING_NODES: [usize; 8] = [0, 1, 2, 3, 5, 6, 7, 8];

pub type EdgeVector = [f64; EDGE_COUNT];
pub type NodeVector = [f64; NODES];

/// Squared grid distance between the endpoints of an edge (1 or 2).
pub fn grid_distance_sq(i: usize, j: usize) -> f64 {
    let dr = (i / 3).abs_diff(j / 3);
    let dc = (i % 3).abs_diff(j % 3);
    (dr * dr + dc * dc) as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    weights: EdgeVector,
    sigma_l: f64,
    sigma_x: f64,
}

impl SimilarityGraph {
    /// Graph with explicit weights, in canonical edge order.
    pub fn from_weights(weights: EdgeVector) -> Self {
        SimilarityGraph {
            weights,
            sigma_l: f64::NAN,
            sigma_x: f64::NAN,
        }
    }

    pub fn weights(&self) -> &EdgeVector {
        &self.weights
    }

    pub fn sigmas(&self) -> (f64, f64) {
        (self.sigma_l, self.sigma_x)
    }

    /// Combinatorial Laplacian `L = D - W`.
    pub fn laplacian(&self) -> Matrix<NODES> {
        let mut l = [[0.0; NODES]; NODES];
        for (&(i, j), &w) in EDGES.iter().zip(&self.weights) {
            l[i][i] += w;
            l[j][j] += w;
            l[i][j] -= w;
            l[j][i] -= w;
        }
        l
    }
}

pub fn build_graph(matched: &NormalizedPatch, sigma_l: f64, sigma_x: f64) -> Result<SimilarityGraph> {
    if !(sigma_l > 0.0 && sigma_x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "graph sigmas must be positive, got {sigma_l} and {sigma_x}"
        )));
    }
    let x = matched.values();
    let (sl2, sx2) = (sigma_l * sigma_l, sigma_x * sigma_x);
    let mut weights = [0.0; EDGE_COUNT];
    for (w, &(i, j)) in weights.iter_mut().zip(&EDGES) {
        let dx = x[i] - x[j];
        *w = (-grid_distance_sq(i, j) / sl2 - dx * dx / sx2).exp();
    }
    Ok(SimilarityGraph {
        weights,
        sigma_l,
        sigma_x,
    })
}

pub fn laplacian(g: &SimilarityGraph) -> Matrix<NODES> {
    g.laplacian()
}

/// Edge-difference operator `F`: `(F x)_k = x_i - x_j` for `EDGES[k] = (i, j)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Incidence;

impl Incidence {
    pub fn dense(&self) -> [[f64; NODES]; EDGE_COUNT] {
        let mut f = [[0.0; NODES]; EDGE_COUNT];
        for (row, &(i, j)) in f.iter_mut().zip(&EDGES) {
            row[i] = 1.0;
            row[j] = -1.0;
        }
        f
    }

    pub fn apply(&self, x: &NodeVector) -> EdgeVector {
        let mut out = [0.0; EDGE_COUNT];
        for (o, &(i, j)) in out.iter_mut().zip(&EDGES) {
            *o = x[i] - x[j];
        }
        out
    }

    pub fn apply_transpose(&self, v: &EdgeVector) -> NodeVector {
        let mut out = [0.0; NODES];
        for (&vk, &(i, j)) in v.iter().zip(&EDGES) {
            out[i] += vk;
            out[j] -= vk;
        }
        out
    }

    /// `Fᵀ F`, the unweighted Laplacian of the grid.
    pub fn gram(&self) -> Matrix<NODES> {
        SimilarityGraph::from_weights([1.0; EDGE_COUNT]).laplacian()
    }
}

/// The incidence operator shared by every graph (topology is fixed).
pub fn incidence(_g: &SimilarityGraph) -> Incidence {
    Incidence
}
