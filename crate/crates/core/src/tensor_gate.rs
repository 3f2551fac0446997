//! Structure-tensor smoothness gate and the per-layer threshold search.
//!
//! A pixel is a candidate for embedding when the smaller eigenvalue of the
//! structure tensor of its eight-pixel ring is below a threshold `tau`. The
//! tensor never reads the center pixel, so the decoder sees the same gate
//! decision as the encoder.

use crate::error::{Error, Result};
use crate::image::{GrayImage, Pos};
use crate::par::{self, ExecMode};

/// Summed gradient outer products over a pixel's ring, in [0, 1] intensity units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureTensor {
    pub jxx: f64,
    pub jxy: f64,
    pub jyy: f64,
}

/// Corner gradient samples `(gx, gy)` of a ring in raw intensity units.
///
/// At each corner, `gx` differences toward the edge-midpoint neighbour in the
/// same row and `gy` toward the one in the same column, both oriented so that
/// positive means increasing column (resp. row).
pub fn corner_gradients(ring: &[u8; 8]) -> [(i32, i32); 4] {
    let v = ring.map(i32::from);
    [
        (v[1] - v[0], v[3] - v[0]),
        (v[2] - v[1], v[4] - v[2]),
        (v[6] - v[5], v[5] - v[3]),
        (v[7] - v[6], v[7] - v[4]),
    ]
}

pub fn structure_tensor_from_ring(ring: &[u8; 8]) -> StructureTensor {
    let (mut xx, mut xy, mut yy) = (0i32, 0i32, 0i32);
    for (gx, gy) in corner_gradients(ring) {
        xx += gx * gx;
        xy += gx * gy;
        yy += gy * gy;
    }
    const SCALE: f64 = 255.0 * 255.0;
    StructureTensor {
        jxx: f64::from(xx) / SCALE,
        jxy: f64::from(xy) / SCALE,
        jyy: f64::from(yy) / SCALE,
    }
}

pub fn structure_tensor_at(image: &GrayImage, pos: Pos) -> Result<StructureTensor> {
    image.check_footprint(pos)?;
    Ok(structure_tensor_from_ring(&image.ring_raw(pos)))
}

/// Smaller eigenvalue of a symmetric 2x2 tensor, clamped at zero.
pub fn eigen_min(t: &StructureTensor) -> f64 {
    let tr = t.jxx + t.jyy;
    let det = t.jxx * t.jyy - t.jxy * t.jxy;
    let disc = (tr * tr - 4.0 * det).max(0.0);
    ((tr - disc.sqrt()) / 2.0).max(0.0)
}

pub fn is_predictable(image: &GrayImage, pos: Pos, tau: GateThreshold) -> Result<bool> {
    Ok(eigen_min(&structure_tensor_at(image, pos)?) < tau.tau())
}

/// A gate threshold on the 0.01 grid over [0, 5].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GateThreshold {
    code: u16,
}

impl GateThreshold {
    pub const MAX_CODE: u16 = 500;
    pub const STEP: f64 = 0.01;

    pub fn from_code(code: u16) -> Result<Self> {
        if code > Self::MAX_CODE {
            return Err(Error::InvalidParameter(format!(
                "threshold code {code} above {}",
                Self::MAX_CODE
            )));
        }
        Ok(GateThreshold { code })
    }

    /// Nearest grid point to `tau`.
    pub fn from_tau(tau: f64) -> Result<Self> {
        if !(0.0..=5.0).contains(&tau) {
            return Err(Error::InvalidParameter(format!("tau {tau} outside [0, 5]")));
        }
        Self::from_code((tau / Self::STEP).round() as u16)
    }

    #[inline]
    pub fn code(self) -> u16 {
        self.code
    }

    #[inline]
    pub fn tau(self) -> f64 {
        f64::from(self.code) * Self::STEP
    }

    #[inline]
    pub fn passes(self, gate_value: f64) -> bool {
        gate_value < self.tau()
    }
}

/// Number of gate values strictly below each grid threshold, indexed by code.
pub fn gate_counts(values: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    (0..=GateThreshold::MAX_CODE)
        .map(|code| {
            let t = GateThreshold { code };
            sorted.partition_point(|&v| t.passes(v))
        })
        .collect()
}

/// Smallest code whose gate-passing count reaches `target`, if any.
///
/// Embeddable bits never exceed gate-passing pixels, so every code below this
/// one fails any capacity probe.
pub fn gate_lower_bound(counts: &[usize], target: usize) -> Option<u16> {
    counts.iter().position(|&n| n >= target).map(|i| i as u16)
}

/// Binary search over the whole grid for the smallest code with
/// `dry_run(code) >= target_bits`.
pub fn find_threshold<F>(target_bits: usize, dry_run: F) -> Result<GateThreshold>
where
    F: Fn(GateThreshold) -> usize + Sync,
{
    let top = GateThreshold {
        code: GateThreshold::MAX_CODE,
    };
    let available = dry_run(top);
    if available < target_bits {
        return Err(Error::CapacityUnreachable {
            target: target_bits,
            available,
        });
    }
    let (mut lo, mut hi) = (0u16, GateThreshold::MAX_CODE);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if dry_run(GateThreshold { code: mid }) >= target_bits {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(GateThreshold { code: hi })
}

/// Threshold search starting from a known-infeasible floor.
///
/// Probes `lower, lower+1, lower+3, lower+7, ...` until one satisfies the
/// target, then bisects the last gap. For a monotone `dry_run` this returns
/// the same smallest code as [`find_threshold`] while keeping the probes near
/// the (cheap) low end of the grid. In [`ExecMode::Parallel`] several probes
/// are evaluated speculatively at once; the chosen code is identical to the
/// sequential walk.
pub fn search_threshold<F>(
    lower: u16,
    target_bits: usize,
    mode: ExecMode,
    dry_run: F,
) -> Result<GateThreshold>
where
    F: Fn(GateThreshold) -> Result<usize> + Sync + Send,
{
    let max = GateThreshold::MAX_CODE;
    let lower = lower.min(max);
    let mode = mode.effective();
    let batch = match mode {
        ExecMode::Parallel => par::available_threads().clamp(2, 8),
        ExecMode::Sequential => 1,
    };

    let mut schedule = Vec::new();
    let (mut probe, mut step) = (lower, 1u16);
    loop {
        schedule.push(probe);
        if probe == max {
            break;
        }
        probe = probe.saturating_add(step).min(max);
        step = step.saturating_mul(2);
    }

    // galloping phase
    let mut last_fail: Option<u16> = None;
    let mut found: Option<u16> = None;
    let mut top_count = 0;
    'gallop: for chunk in schedule.chunks(batch) {
        let counts = par::map(mode, chunk, |&code| dry_run(GateThreshold { code }))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for (&code, &n) in chunk.iter().zip(&counts) {
            if n >= target_bits {
                found = Some(code);
                break 'gallop;
            }
            last_fail = Some(code);
            top_count = n;
        }
    }
    let mut hi = found.ok_or(Error::CapacityUnreachable {
        target: target_bits,
        available: top_count,
    })?;
    let mut lo = last_fail.map_or(lower, |c| c + 1);

    // bisection phase; the parallel path also evaluates both possible next
    // midpoints so two halvings complete per round
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match mode {
            ExecMode::Parallel if hi - lo >= 4 => {
                let left_mid = lo + (mid - lo) / 2;
                let right_mid = (mid + 1) + (hi - mid - 1) / 2;
                let probes = [mid, left_mid, right_mid];
                let ok = par::map(mode, &probes, |&code| {
                    dry_run(GateThreshold { code }).map(|n| n >= target_bits)
                })
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
                if ok[0] {
                    hi = mid;
                    if ok[1] {
                        hi = left_mid;
                    } else {
                        lo = left_mid + 1;
                    }
                } else {
                    lo = mid + 1;
                    if ok[2] {
                        hi = right_mid;
                    } else {
                        lo = right_mid + 1;
                    }
                }
            }
            _ => {
                if dry_run(GateThreshold { code: mid })? >= target_bits {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
        }
    }
    Ok(GateThreshold { code: hi })
}
