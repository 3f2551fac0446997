//! Prediction under the graph total variation prior.
//!
//! Solves `min |y - Hx|^2 + gamma * sum_k w_k |(F x)_k|` with scaled-form ADMM
//! on the split `z = F x`:
//!
//! * x-step: `(2HᵀH + rho FᵀF) x = 2Hᵀy - rho Fᵀ(u - z)`, a fixed SPD system;
//! * z-step: proximal gradient on `rho/2 |Fx - z + u|^2 + gamma sum w |z|`,
//!   a gradient step of size `t` followed by soft thresholding at `t gamma w`;
//! * u-step: `u += F x - z`.

use crate::error::{Error, Result};
use crate::graph::{EdgeVector, Incidence, NodeVector, SimilarityGraph, CENTER, EDGE_COUNT, RING_NODES};
use crate::linalg::{max_abs_diff, Cholesky, Matrix};
use crate::patch_search::RingVector;
use crate::predictor::quad::{round_center, scatter_ring};

/// Stopping threshold on `|x_{k+1} - x_k|_inf`.
pub const X_CHANGE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtvParams {
    pub gamma: f64,
    pub rho: f64,
    pub step_t: f64,
    pub admm_max_iters: usize,
    pub pg_max_iters: usize,
    pub primal_tol: f64,
    pub pg_tol: f64,
}

impl Default for GtvParams {
    fn default() -> Self {
        GtvParams {
            gamma: 0.5,
            rho: 5.0,
            step_t: 0.1,
            admm_max_iters: 200,
            pg_max_iters: 50,
            primal_tol: 1e-5,
            pg_tol: 1e-7,
        }
    }
}

impl GtvParams {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("gamma", self.gamma),
            ("rho", self.rho),
            ("step_t", self.step_t),
            ("primal_tol", self.primal_tol),
            ("pg_tol", self.pg_tol),
        ];
        for (name, v) in reals {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.admm_max_iters == 0 || self.pg_max_iters == 0 {
            return Err(Error::InvalidParameter("iteration caps must be positive".into()));
        }
        Ok(())
    }
}

pub fn soft_threshold(z: f64, theta: f64) -> f64 {
    if z > theta {
        z - theta
    } else if z < -theta {
        z + theta
    } else {
        0.0
    }
}

/// `2HᵀH + rho FᵀF`.
pub fn x_step_matrix(rho: f64) -> Matrix<9> {
    let mut a = Incidence.gram();
    for row in a.iter_mut() {
        for v in row.iter_mut() {
            *v *= rho;
        }
    }
    for &node in &RING_NODES {
        a[node][node] += 2.0;
    }
    a
}

/// Pre-factored x-step system; the matrix depends only on `rho`.
#[derive(Debug, Clone)]
pub struct XStep {
    chol: Cholesky<9>,
    rho: f64,
}

impl XStep {
    pub fn new(rho: f64) -> Result<Self> {
        Ok(XStep {
            chol: Cholesky::factor(&x_step_matrix(rho))?,
            rho,
        })
    }

    pub fn rhs(&self, y: &RingVector, z: &EdgeVector, u: &EdgeVector) -> NodeVector {
        let mut diff = [0.0; EDGE_COUNT];
        for k in 0..EDGE_COUNT {
            diff[k] = u[k] - z[k];
        }
        let ft = Incidence.apply_transpose(&diff);
        let hy = scatter_ring(y);
        let mut rhs = [0.0; 9];
        for i in 0..9 {
            rhs[i] = 2.0 * hy[i] - self.rho * ft[i];
        }
        rhs
    }

    pub fn solve(&self, y: &RingVector, z: &EdgeVector, u: &EdgeVector) -> NodeVector {
        self.chol.solve(&self.rhs(y, z, u))
    }
}

pub fn x_step(y: &RingVector, z: &EdgeVector, u: &EdgeVector, rho: f64) -> Result<NodeVector> {
    Ok(XStep::new(rho)?.solve(y, z, u))
}

/// Nested proximal gradient for the z-subproblem, warm-started at `z_init`.
/// Returns the iterate and the number of inner steps taken.
pub fn z_step_counted(
    fx: &EdgeVector,
    u: &EdgeVector,
    z_init: &EdgeVector,
    weights: &EdgeVector,
    params: &GtvParams,
) -> (EdgeVector, usize) {
    let (t, rho) = (params.step_t, params.rho);
    let mut z = *z_init;
    for iter in 1..=params.pg_max_iters {
        let mut change = 0.0f64;
        for k in 0..EDGE_COUNT {
            let grad = -rho * (fx[k] - z[k] + u[k]);
            let next = soft_threshold(z[k] - t * grad, t * params.gamma * weights[k]);
            change = change.max((next - z[k]).abs());
            z[k] = next;
        }
        if change <= params.pg_tol {
            return (z, iter);
        }
    }
    (z, params.pg_max_iters)
}

pub fn z_step(
    fx: &EdgeVector,
    u: &EdgeVector,
    z_init: &EdgeVector,
    weights: &EdgeVector,
    params: &GtvParams,
) -> EdgeVector {
    z_step_counted(fx, u, z_init, weights, params).0
}

pub fn u_step(u: &EdgeVector, fx: &EdgeVector, z: &EdgeVector) -> EdgeVector {
    std::array::from_fn(|k| u[k] + (fx[k] - z[k]))
}

/// `|y - Hx|^2 + gamma sum w |x_i - x_j|`.
pub fn objective(y: &RingVector, x: &NodeVector, weights: &EdgeVector, gamma: f64) -> f64 {
    let fidelity: f64 = RING_NODES
        .iter()
        .zip(y.values())
        .map(|(&n, &v)| (v - x[n]) * (v - x[n]))
        .sum();
    let tv: f64 = Incidence
        .apply(x)
        .iter()
        .zip(weights)
        .map(|(d, w)| w * d.abs())
        .sum();
    fidelity + gamma * tv
}

/// Scaled augmented Lagrangian (constant term dropped).
pub fn augmented_lagrangian(
    y: &RingVector,
    x: &NodeVector,
    z: &EdgeVector,
    u: &EdgeVector,
    weights: &EdgeVector,
    params: &GtvParams,
) -> f64 {
    let fidelity: f64 = RING_NODES
        .iter()
        .zip(y.values())
        .map(|(&n, &v)| (v - x[n]) * (v - x[n]))
        .sum();
    let l1: f64 = z.iter().zip(weights).map(|(z, w)| w * z.abs()).sum();
    let fx = Incidence.apply(x);
    let penalty: f64 = (0..EDGE_COUNT)
        .map(|k| {
            let r = fx[k] - z[k] + u[k];
            r * r
        })
        .sum();
    fidelity + params.gamma * l1 + params.rho / 2.0 * penalty
}

/// Deterministic warm start: ring values observed, center at the ring mean.
pub fn initial_patch(y: &RingVector) -> NodeVector {
    let mut x = scatter_ring(y);
    x[CENTER] = y.mean();
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct GtvSolveResult {
    pub x: NodeVector,
    pub z: EdgeVector,
    pub u: EdgeVector,
    pub center_real: f64,
    pub center_int: u8,
    pub iterations: usize,
    /// False when the ADMM loop stopped at its iteration cap. The result is
    /// still the last iterate and is deterministic.
    pub converged: bool,
}

impl GtvSolveResult {
    pub fn primal_residual(&self) -> f64 {
        max_abs_diff(&Incidence.apply(&self.x), &self.z)
    }
}

pub fn predict_gtv(y: &RingVector, g: &SimilarityGraph, params: &GtvParams) -> Result<GtvSolveResult> {
    params.validate()?;
    let xs = XStep::new(params.rho)?;
    let weights = g.weights();

    let mut x = initial_patch(y);
    let mut z = Incidence.apply(&x);
    let mut u = [0.0; EDGE_COUNT];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.admm_max_iters {
        iterations += 1;
        let x_next = xs.solve(y, &z, &u);
        let fx = Incidence.apply(&x_next);
        let z_next = z_step(&fx, &u, &z, weights, params);
        u = u_step(&u, &fx, &z_next);
        let dx = max_abs_diff(&x_next, &x);
        let primal = max_abs_diff(&fx, &z_next);
        x = x_next;
        z = z_next;
        if dx <= X_CHANGE_TOL && primal <= params.primal_tol {
            converged = true;
            break;
        }
    }

    let center_real = x[CENTER];
    Ok(GtvSolveResult {
        x,
        z,
        u,
        center_real,
        center_int: round_center(center_real),
        iterations,
        converged,
    })
}
