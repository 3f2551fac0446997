//! Layer geometry and the per-layer embed/extract passes.
//!
//! The interior is split into the four 2x2 parity cosets, so the ring of every
//! pixel consists of other-layer pixels only. Embedding walks a layer in
//! row-major order and extraction walks it backwards, which hands every pixel
//! the same image context in both directions.

use crate::codec::location_map::LocationMap;
use crate::codec::mapping::{is_expandable, map_error_embed, map_error_extract};
use crate::error::{Error, Result};
use crate::image::{GrayImage, Pos};
use crate::par::{self, ExecMode};
use crate::predictor::{gate_value, predict_pixel, PredictorKind, PredictorParams};
use crate::tensor_gate::GateThreshold;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerPlan {
    index: u8,
    parity: (usize, usize),
    pixels: Vec<Pos>,
}

impl LayerPlan {
    /// Rows up to and including this one are never modified by a layer pass
    /// and never feed a prediction context; row 0 carries the side information.
    pub const FIRST_CONTEXT_ROW: usize = 1;

    /// `(row % 2, col % 2)` of each layer, in embedding order.
    pub const PARITIES: [(usize, usize); 4] = [(1, 1), (1, 0), (0, 1), (0, 0)];

    pub fn new(index: u8, width: usize, height: usize) -> Result<Self> {
        if !(1..=4).contains(&index) {
            return Err(Error::InvalidParameter(format!("layer index {index} not in 1..=4")));
        }
        let parity = Self::PARITIES[usize::from(index) - 1];
        let mut pixels = Vec::new();
        let first_row = Self::FIRST_CONTEXT_ROW + 1;
        if height >= 3 && width >= 3 {
            for r in first_row..height - 1 {
                if r % 2 != parity.0 {
                    continue;
                }
                for c in 1..width - 1 {
                    if c % 2 == parity.1 {
                        pixels.push(Pos::new(r, c));
                    }
                }
            }
        }
        Ok(LayerPlan {
            index,
            parity,
            pixels,
        })
    }

    /// All four layers of a `width x height` image, in embedding order.
    pub fn all(width: usize, height: usize) -> [LayerPlan; 4] {
        [1, 2, 3, 4].map(|i| LayerPlan::new(i, width, height).expect("valid layer index"))
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn parity(&self) -> (usize, usize) {
        self.parity
    }

    pub fn pixels(&self) -> &[Pos] {
        &self.pixels
    }

    #[inline]
    pub fn has_parity(&self, row: usize, col: usize) -> bool {
        (row % 2, col % 2) == self.parity
    }

    pub fn contains(&self, pos: Pos) -> bool {
        self.has_parity(pos.row, pos.col) && self.pixels.binary_search(&pos).is_ok()
    }
}

/// Gate values of every pixel of a layer, in layer order.
pub fn layer_gate_values(
    image: &GrayImage,
    layer: &LayerPlan,
    kind: PredictorKind,
    mode: ExecMode,
) -> Vec<f64> {
    par::map(mode, layer.pixels(), |&p| gate_value(kind, image, p))
}

/// Maps 0 to 1 and 255 to 254 across the layer and records which boundary
/// values were moved.
pub fn preprocess_layer_boundaries(image: &mut GrayImage, layer: &LayerPlan) -> LocationMap {
    let mut lm = LocationMap::default();
    for &p in layer.pixels() {
        match image.at(p) {
            0 => {
                image.set(p.row, p.col, 1);
                lm.push(true);
            }
            255 => {
                image.set(p.row, p.col, 254);
                lm.push(true);
            }
            1 | 254 => lm.push(false),
            _ => {}
        }
    }
    lm
}

/// Inverse of [`preprocess_layer_boundaries`].
pub fn restore_layer_boundaries(image: &mut GrayImage, layer: &LayerPlan, lm: &LocationMap) -> Result<()> {
    let mut entries = lm.bits().iter();
    for &p in layer.pixels() {
        let v = image.at(p);
        if v == 1 || v == 254 {
            let moved = *entries
                .next()
                .ok_or_else(|| Error::MalformedStego("location map too short".into()))?;
            if moved {
                image.set(p.row, p.col, if v == 1 { 0 } else { 255 });
            }
        }
    }
    if entries.next().is_some() {
        return Err(Error::MalformedStego("location map too long".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LayerOutcome {
    /// Gate-passing pixels visited.
    pub gated: usize,
    /// Visited pixels whose error was expandable.
    pub embeddable: usize,
    /// Payload bits actually placed.
    pub consumed: usize,
}

/// One layer of embedding on the current image state.
///
/// Bits beyond the end of `bits` are taken as zero, so expandable pixels after
/// the payload keep their value. With `stop_after`, the pass returns as soon
/// as that many expandable pixels have been seen (capacity probing only; the
/// image is then only partially marked).
#[allow(clippy::too_many_arguments)]
pub fn embed_layer_gated(
    image: &mut GrayImage,
    layer: &LayerPlan,
    gates: &[f64],
    tau: GateThreshold,
    bits: &[bool],
    kind: PredictorKind,
    params: &PredictorParams,
    stop_after: Option<usize>,
) -> Result<LayerOutcome> {
    debug_assert_eq!(gates.len(), layer.pixels().len());
    let mut out = LayerOutcome::default();
    for (&p, &g) in layer.pixels().iter().zip(gates) {
        if !tau.passes(g) {
            continue;
        }
        out.gated += 1;
        let predicted = i32::from(predict_pixel(kind, image, p, layer, params)?);
        let e = i32::from(image.at(p)) - predicted;
        let bit = if is_expandable(e) {
            let b = bits.get(out.embeddable).copied().unwrap_or(false);
            out.embeddable += 1;
            b
        } else {
            false
        };
        let marked = predicted + map_error_embed(e, bit);
        let marked = u8::try_from(marked).map_err(|_| {
            Error::InvalidParameter(format!(
                "pixel ({}, {}) left [0, 255]; boundary preprocessing was skipped",
                p.row, p.col
            ))
        })?;
        image.set(p.row, p.col, marked);
        if stop_after.is_some_and(|n| out.embeddable >= n) {
            break;
        }
    }
    out.consumed = out.embeddable.min(bits.len());
    Ok(out)
}

pub fn embed_layer(
    image: &mut GrayImage,
    layer: &LayerPlan,
    tau: GateThreshold,
    bits: &[bool],
    kind: PredictorKind,
    params: &PredictorParams,
) -> Result<LayerOutcome> {
    let gates = layer_gate_values(image, layer, kind, ExecMode::default().effective());
    embed_layer_gated(image, layer, &gates, tau, bits, kind, params, None)
}

/// Undoes one layer pass and returns the first `expected_bits` carried bits.
pub fn extract_layer(
    image: &mut GrayImage,
    layer: &LayerPlan,
    tau: GateThreshold,
    expected_bits: usize,
    kind: PredictorKind,
    params: &PredictorParams,
) -> Result<Vec<bool>> {
    let gates = layer_gate_values(image, layer, kind, ExecMode::default().effective());
    let mut collected = Vec::new();
    for (&p, &g) in layer.pixels().iter().zip(&gates).rev() {
        if !tau.passes(g) {
            continue;
        }
        let predicted = i32::from(predict_pixel(kind, image, p, layer, params)?);
        let (e, bit) = map_error_extract(i32::from(image.at(p)) - predicted);
        if let Some(b) = bit {
            collected.push(b);
        }
        let restored = u8::try_from(predicted + e).map_err(|_| {
            Error::MalformedStego(format!("pixel ({}, {}) restores outside [0, 255]", p.row, p.col))
        })?;
        image.set(p.row, p.col, restored);
    }
    if collected.len() < expected_bits {
        return Err(Error::MalformedStego(format!(
            "layer {} carries {} bits, side information claims {}",
            layer.index(),
            collected.len(),
            expected_bits
        )));
    }
    collected.reverse();
    collected.truncate(expected_bits);
    Ok(collected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn smooth_image(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |r, c| {
            let base = 120.0 + 40.0 * ((r as f64) / 9.0).sin() + 30.0 * ((c as f64) / 13.0).cos();
            (base + rng.gen_range(-2.0..2.0)).round() as u8
        })
    }

    #[test]
    fn layers_partition_the_interior() {
        let (w, h) = (17, 12);
        let layers = LayerPlan::all(w, h);
        let mut seen = std::collections::HashSet::new();
        for l in &layers {
            for &p in l.pixels() {
                assert!(seen.insert(p), "{p:?} in two layers");
                assert!(l.contains(p));
            }
            assert!(l.pixels().windows(2).all(|w| w[0] < w[1]));
        }
        let interior: Vec<Pos> = (2..h - 1)
            .flat_map(|r| (1..w - 1).map(move |c| Pos::new(r, c)))
            .collect();
        assert_eq!(seen.len(), interior.len());
        assert!(interior.iter().all(|p| seen.contains(p)));
        assert!(LayerPlan::new(0, w, h).is_err());
        assert!(LayerPlan::new(5, w, h).is_err());
    }

    #[test]
    fn rings_never_touch_the_own_layer() {
        let l = LayerPlan::new(3, 20, 20).unwrap();
        for &p in l.pixels() {
            for (dr, dc) in crate::image::RING_OFFSETS {
                let q = Pos::new((p.row as isize + dr) as usize, (p.col as isize + dc) as usize);
                assert!(!l.contains(q));
                assert!(q.row >= LayerPlan::FIRST_CONTEXT_ROW);
            }
        }
    }

    #[test]
    fn boundary_preprocessing_example() {
        // layer 1 of a 9x6 image: (3,1) (3,3) (3,5) (3,7)
        let mut img = GrayImage::filled(9, 6, 100);
        let layer = LayerPlan::new(1, 9, 6).unwrap();
        assert_eq!(layer.pixels().len(), 4);
        for (&p, v) in layer.pixels().iter().zip([0u8, 100, 254, 255]) {
            img.set(p.row, p.col, v);
        }
        let before = img.clone();
        let lm = preprocess_layer_boundaries(&mut img, &layer);
        let after: Vec<u8> = layer.pixels().iter().map(|&p| img.at(p)).collect();
        assert_eq!(after, vec![1, 100, 254, 254]);
        assert_eq!(lm.bits(), &[true, false, true]);
        restore_layer_boundaries(&mut img, &layer, &lm).unwrap();
        assert_eq!(img, before);

        let mut plain = GrayImage::filled(9, 6, 100);
        assert!(preprocess_layer_boundaries(&mut plain, &layer).is_empty());
        assert_eq!(plain, GrayImage::filled(9, 6, 100));
    }

    #[test]
    fn restore_checks_map_length() {
        let mut img = GrayImage::filled(9, 6, 1);
        let layer = LayerPlan::new(1, 9, 6).unwrap();
        assert!(restore_layer_boundaries(&mut img, &layer, &LocationMap::new(vec![false; 3])).is_err());
        assert!(restore_layer_boundaries(&mut img, &layer, &LocationMap::new(vec![false; 5])).is_err());
    }

    #[test]
    fn zero_threshold_touches_nothing() {
        let img = smooth_image(40, 40, 1);
        let layer = LayerPlan::new(1, 40, 40).unwrap();
        let params = PredictorParams::default();
        let mut marked = img.clone();
        let out = embed_layer(&mut marked, &layer, GateThreshold::default(), &[true; 10], PredictorKind::Quad, &params).unwrap();
        assert_eq!(out, LayerOutcome::default());
        assert_eq!(marked, img);
        let bits = extract_layer(&mut marked, &layer, GateThreshold::default(), 0, PredictorKind::Quad, &params).unwrap();
        assert!(bits.is_empty());
        assert_eq!(marked, img);
    }

    #[test]
    fn single_flat_pixel_takes_a_one() {
        let mut img = GrayImage::filled(40, 40, 120);
        let layer = LayerPlan::new(1, 40, 40).unwrap();
        let params = PredictorParams::default();
        let out = embed_layer(&mut img, &layer, GateThreshold::from_code(1).unwrap(), &[true], PredictorKind::Quad, &params).unwrap();
        assert_eq!(out.consumed, 1);
        let first = layer.pixels()[0];
        assert_eq!(img.at(first), 121);
    }

    #[test]
    fn layer_round_trip_all_predictors() {
        let params = PredictorParams {
            window: 9,
            ..PredictorParams::default()
        };
        let mut rng = rand::rngs::StdRng::seed_from_u64(99);
        for kind in PredictorKind::ALL {
            for layer_index in 1..=4 {
                let cover = smooth_image(36, 30, u64::from(layer_index));
                let layer = LayerPlan::new(layer_index, 36, 30).unwrap();
                let bits: Vec<bool> = (0..40).map(|_| rng.gen()).collect();
                let tau = GateThreshold::from_code(if kind == PredictorKind::Rhombus { 40 } else { 5 }).unwrap();
                let mut img = cover.clone();
                let out = embed_layer(&mut img, &layer, tau, &bits, kind, &params).unwrap();
                assert!(out.consumed > 0, "{kind} layer {layer_index} embedded nothing");
                let max_diff = crate::image::max_abs_diff(&img, &cover).unwrap();
                assert!(max_diff <= 1);
                let got = extract_layer(&mut img, &layer, tau, out.consumed, kind, &params).unwrap();
                assert_eq!(got, bits[..out.consumed]);
                assert_eq!(img, cover);
            }
        }
    }

    #[test]
    fn extraction_demands_enough_bits() {
        let cover = smooth_image(30, 30, 4);
        let layer = LayerPlan::new(2, 30, 30).unwrap();
        let params = PredictorParams {
            window: 7,
            ..PredictorParams::default()
        };
        let tau = GateThreshold::from_code(3).unwrap();
        let mut img = cover.clone();
        let out = embed_layer(&mut img, &layer, tau, &[true; 5], PredictorKind::Quad, &params).unwrap();
        let r = extract_layer(&mut img, &layer, tau, out.embeddable + 1, PredictorKind::Quad, &params);
        assert!(matches!(r, Err(Error::MalformedStego(_))));
    }
}
