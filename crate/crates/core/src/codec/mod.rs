//! The reversible embed/extract protocol.
//!
//! Embedding:
//! 1. The LSBs of the first [`SIDE_INFO_BITS`] pixels of row 0 are saved and
//!    prepended to the message; the result is split into four near-equal
//!    quarters.
//! 2. For each layer in order: boundary values of the layer are moved inward
//!    and recorded in a location map; the layer payload is the compressed map
//!    followed by its quarter; the smallest threshold that fits the payload is
//!    found by dry runs on scratch copies; the layer is embedded.
//! 3. The side information replaces the saved LSBs of row 0.
//!
//! Extraction runs the same steps backwards, layers 4 to 1.

pub mod layer;
pub mod location_map;
pub mod mapping;
pub mod side_info;

pub use layer::{
    embed_layer, embed_layer_gated, extract_layer, layer_gate_values, preprocess_layer_boundaries,
    restore_layer_boundaries, LayerOutcome, LayerPlan,
};
pub use location_map::LocationMap;
pub use mapping::{map_error_embed, map_error_extract};
pub use side_info::{SideInfo, SIDE_INFO_BITS};

use crate::bits::BitStream;
use crate::error::{Error, Result};
use crate::image::{psnr, GrayImage};
use crate::par::ExecMode;
use crate::predictor::{PredictorKind, PredictorParams};
use crate::tensor_gate::{gate_counts, gate_lower_bound, search_threshold, GateThreshold};

/// Smallest image height with a non-empty pixel set in every layer.
pub const MIN_HEIGHT: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerReport {
    pub tau: GateThreshold,
    /// Compressed location map plus message quarter.
    pub payload_bits: usize,
    pub lm_entries: usize,
    pub lm_compressed_bits: usize,
    /// Gate-passing pixels in the final pass.
    pub gated_pixels: usize,
    /// Expandable pixels in the final pass (payload bits plus zero padding).
    pub embeddable: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedReport {
    pub predictor: PredictorKind,
    pub message_bits: usize,
    pub layers: Vec<LayerReport>,
    /// PSNR of the stego image against the cover, dB.
    pub psnr: f64,
}

impl EmbedReport {
    pub fn taus(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.tau.tau()).collect()
    }
}

/// Quarter `i` (0-based) of a `total`-bit payload; the first `total % 4`
/// quarters take one extra bit.
pub fn quarter_len(total: usize, i: usize) -> usize {
    total / 4 + usize::from(i < total % 4)
}

fn check_dimensions(image: &GrayImage) -> Result<()> {
    if image.width() < SIDE_INFO_BITS {
        return Err(Error::ImageTooSmall(format!(
            "width {} cannot hold {SIDE_INFO_BITS} side-information bits in row 0",
            image.width()
        )));
    }
    if image.height() < MIN_HEIGHT {
        return Err(Error::ImageTooSmall(format!(
            "height {} leaves an empty layer (need {MIN_HEIGHT})",
            image.height()
        )));
    }
    Ok(())
}

fn first_row_lsbs(image: &GrayImage) -> Vec<bool> {
    (0..SIDE_INFO_BITS).map(|c| image.get(0, c) & 1 == 1).collect()
}

fn write_first_row_lsbs(image: &mut GrayImage, bits: &[bool]) {
    for (c, &b) in bits.iter().enumerate() {
        let v = image.get(0, c);
        image.set(0, c, (v & !1) | u8::from(b));
    }
}

pub fn embed(
    cover: &GrayImage,
    message: &BitStream,
    predictor: PredictorKind,
    params: &PredictorParams,
) -> Result<(GrayImage, EmbedReport)> {
    embed_with_mode(cover, message, predictor, params, ExecMode::default())
}

pub fn embed_with_mode(
    cover: &GrayImage,
    message: &BitStream,
    predictor: PredictorKind,
    params: &PredictorParams,
    mode: ExecMode,
) -> Result<(GrayImage, EmbedReport)> {
    check_dimensions(cover)?;
    params.validate()?;
    let message_length = u32::try_from(message.len())
        .ok()
        .filter(|&n| n < 1 << 20)
        .ok_or(Error::SideInfoOverflow {
            field: "message_length",
            value: message.len() as i64,
        })?;

    let mut payload = first_row_lsbs(cover);
    payload.extend_from_slice(message.as_slice());
    let total = payload.len();

    let mode = mode.effective();
    let mut image = cover.clone();
    let mut info = SideInfo {
        message_length,
        ..SideInfo::default()
    };
    let mut reports = Vec::with_capacity(4);
    let mut offset = 0;

    for (i, layer) in LayerPlan::all(cover.width(), cover.height()).iter().enumerate() {
        let lm = preprocess_layer_boundaries(&mut image, layer);
        let mut segment = lm.compress();
        let lm_bits = segment.len();
        let quarter = quarter_len(total, i);
        segment.extend_from_slice(&payload[offset..offset + quarter]);
        offset += quarter;

        let gates = layer_gate_values(&image, layer, predictor, mode);
        let counts = gate_counts(&gates);
        let target = segment.len();
        let lower = gate_lower_bound(&counts, target).ok_or(Error::CapacityUnreachable {
            target,
            available: counts[usize::from(GateThreshold::MAX_CODE)],
        })?;

        let tau = search_threshold(lower, target, mode, |tau| {
            let mut scratch = image.clone();
            embed_layer_gated(&mut scratch, layer, &gates, tau, &segment, predictor, params, Some(target))
                .map(|o| o.embeddable)
        })?;
        let outcome = embed_layer_gated(&mut image, layer, &gates, tau, &segment, predictor, params, None)?;
        debug_assert_eq!(outcome.consumed, target);

        info.tau_codes[i] = tau.code();
        info.lm_lengths[i] = lm_bits as u32;
        reports.push(LayerReport {
            tau,
            payload_bits: target,
            lm_entries: lm.len(),
            lm_compressed_bits: lm_bits,
            gated_pixels: outcome.gated,
            embeddable: outcome.embeddable,
        });
    }

    write_first_row_lsbs(&mut image, &info.serialize()?);
    let report = EmbedReport {
        predictor,
        message_bits: message.len(),
        layers: reports,
        psnr: psnr(cover, &image)?,
    };
    Ok((image, report))
}

pub fn extract(stego: &GrayImage, predictor: PredictorKind, params: &PredictorParams) -> Result<(BitStream, GrayImage)> {
    check_dimensions(stego).map_err(|e| Error::MalformedStego(e.to_string()))?;
    params.validate()?;
    let info = SideInfo::parse(&first_row_lsbs(stego))?;
    let total = SIDE_INFO_BITS + info.message_length as usize;

    let mut image = stego.clone();
    let layers = LayerPlan::all(stego.width(), stego.height());
    let mut quarters: Vec<Vec<bool>> = vec![Vec::new(); 4];
    for i in (0..4).rev() {
        let tau = GateThreshold::from_code(info.tau_codes[i])?;
        let lm_bits = info.lm_lengths[i] as usize;
        let expected = lm_bits + quarter_len(total, i);
        let mut segment = extract_layer(&mut image, &layers[i], tau, expected, predictor, params)?;
        let lm = LocationMap::decompress(&segment[..lm_bits])?;
        restore_layer_boundaries(&mut image, &layers[i], &lm)?;
        quarters[i] = segment.split_off(lm_bits);
    }

    let payload: Vec<bool> = quarters.concat();
    write_first_row_lsbs(&mut image, &payload[..SIDE_INFO_BITS]);
    Ok((BitStream::from(payload[SIDE_INFO_BITS..].to_vec()), image))
}
