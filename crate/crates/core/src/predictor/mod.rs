//! Pixel predictors and their smoothness gates.

pub mod gtv;
pub mod quad;
pub mod rhombus;

use std::fmt;
use std::str::FromStr;

use crate::codec::LayerPlan;
use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::image::{GrayImage, Pos};
use crate::patch_search::{find_similar_patch, RingVector};
use crate::tensor_gate::{eigen_min, structure_tensor_from_ring};

pub use gtv::{predict_gtv, GtvParams, GtvSolveResult};
pub use quad::{predict_quad, QuadSolveResult};
pub use rhombus::rhombus_predict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictorKind {
    /// Quadratic graph Laplacian prior, closed form.
    Quad,
    /// Graph total variation prior, ADMM.
    Gtv,
    /// Mean of the four axis neighbours with a local-deviation gate.
    Rhombus,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 3] = [PredictorKind::Quad, PredictorKind::Gtv, PredictorKind::Rhombus];

    pub fn name(self) -> &'static str {
        match self {
            PredictorKind::Quad => "quad",
            PredictorKind::Gtv => "gtv",
            PredictorKind::Rhombus => "rhombus",
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quad" => Ok(PredictorKind::Quad),
            "gtv" => Ok(PredictorKind::Gtv),
            "rhombus" => Ok(PredictorKind::Rhombus),
            other => Err(Error::InvalidParameter(format!("unknown predictor '{other}'"))),
        }
    }
}

/// Every solver knob of the graph predictors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorParams {
    pub sigma_l: f64,
    pub sigma_x: f64,
    pub gamma: f64,
    pub rho: f64,
    pub step_t: f64,
    /// Side length of the square search window.
    pub window: usize,
    pub admm_max_iters: usize,
    pub pg_max_iters: usize,
    pub primal_tol: f64,
    pub pg_tol: f64,
}

impl Default for PredictorParams {
    fn default() -> Self {
        let gtv = GtvParams::default();
        PredictorParams {
            sigma_l: 0.5,
            sigma_x: 0.5,
            gamma: gtv.gamma,
            rho: gtv.rho,
            step_t: gtv.step_t,
            window: 31,
            admm_max_iters: gtv.admm_max_iters,
            pg_max_iters: gtv.pg_max_iters,
            primal_tol: gtv.primal_tol,
            pg_tol: gtv.pg_tol,
        }
    }
}

impl PredictorParams {
    pub fn gtv(&self) -> GtvParams {
        GtvParams {
            gamma: self.gamma,
            rho: self.rho,
            step_t: self.step_t,
            admm_max_iters: self.admm_max_iters,
            pg_max_iters: self.pg_max_iters,
            primal_tol: self.primal_tol,
            pg_tol: self.pg_tol,
        }
    }

    pub fn window_radius(&self) -> usize {
        self.window / 2
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_l > 0.0 && self.sigma_x > 0.0) {
            return Err(Error::InvalidParameter("sigmas must be positive".into()));
        }
        if self.window < 3 {
            return Err(Error::InvalidParameter(format!(
                "search window {} is smaller than 3",
                self.window
            )));
        }
        self.gtv().validate()
    }
}

/// The value compared against the layer threshold; smaller is smoother.
///
/// Reads only the ring of `pos`. Callers must have checked the footprint.
pub fn gate_value(kind: PredictorKind, image: &GrayImage, pos: Pos) -> f64 {
    match kind {
        PredictorKind::Quad | PredictorKind::Gtv => {
            eigen_min(&structure_tensor_from_ring(&image.ring_raw(pos)))
        }
        PredictorKind::Rhombus => rhombus::rhombus_gate_value(image, pos),
    }
}

/// Integer prediction of the center of `pos` from the current image state.
pub fn predict_pixel(
    kind: PredictorKind,
    image: &GrayImage,
    pos: Pos,
    layer: &LayerPlan,
    params: &PredictorParams,
) -> Result<u8> {
    if kind == PredictorKind::Rhombus {
        return rhombus_predict(image, pos);
    }
    image.check_footprint(pos)?;
    let ring = RingVector::from_raw(image.ring_raw(pos));
    let matched = find_similar_patch(image, pos, params.window_radius(), layer)?;
    let graph = build_graph(&matched.patch, params.sigma_l, params.sigma_x)?;
    match kind {
        PredictorKind::Quad => Ok(predict_quad(&ring, &graph, params.gamma)?.center_int),
        PredictorKind::Gtv => Ok(predict_gtv(&ring, &graph, &params.gtv())?.center_int),
        PredictorKind::Rhombus => unreachable!(),
    }
}
