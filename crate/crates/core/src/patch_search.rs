//! Semi-local search for the patch whose ring best matches a target ring.

use crate::codec::LayerPlan;
use crate::error::Result;
use crate::image::{normalize, GrayImage, NormalizedPatch, Pos};

/// Default half-width of the search window (a 31x31 window).
pub const DEFAULT_WINDOW_RADIUS: usize = 15;

/// The eight normalized ring intensities, row-major with the center skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingVector(pub [f64; 8]);

impl RingVector {
    pub fn from_raw(raw: [u8; 8]) -> Self {
        RingVector(raw.map(normalize))
    }

    pub fn values(&self) -> &[f64; 8] {
        &self.0
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / 8.0
    }
}

pub fn ring_vector(image: &GrayImage, pos: Pos) -> Result<RingVector> {
    image.check_footprint(pos)?;
    Ok(RingVector::from_raw(image.ring_raw(pos)))
}

/// Euclidean distance between the mean-removed rings.
pub fn ac_distance(a: &RingVector, b: &RingVector) -> f64 {
    let (ma, mb) = (a.mean(), b.mean());
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| {
            let d = (x - ma) - (y - mb);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// `8 * |ac(a) - ac(b)|^2` in raw intensity units; exact in integers.
#[inline]
fn ac_key(a: &[i32; 8], b: [u8; 8]) -> i64 {
    let mut sum = 0i32;
    let mut sq = 0i32;
    for k in 0..8 {
        let d = a[k] - i32::from(b[k]);
        sum += d;
        sq += d * d;
    }
    8 * i64::from(sq) - i64::from(sum) * i64::from(sum)
}

fn key_to_distance(key: i64) -> f64 {
    (key as f64 / 8.0).sqrt() / 255.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub center: Pos,
    pub distance: f64,
    pub patch: NormalizedPatch,
    /// No admissible candidate existed; `patch` is the target ring with the
    /// ring mean at the center.
    pub self_match: bool,
}

/// Exhaustive scan of the `(2r+1)^2` window around `pos`, clipped at the image
/// border.
///
/// A candidate center is admissible when its footprint is fully inside the
/// image, stays clear of the reserved rows, does not cover `pos` itself, and
/// the center is not a pixel of `layer`. Ties go to the first candidate in
/// row-major order.
pub fn find_similar_patch(
    image: &GrayImage,
    pos: Pos,
    window_radius: usize,
    layer: &LayerPlan,
) -> Result<MatchResult> {
    image.check_footprint(pos)?;
    let target_raw = image.ring_raw(pos);
    let target = target_raw.map(i32::from);

    let min_row = pos
        .row
        .saturating_sub(window_radius)
        .max(LayerPlan::FIRST_CONTEXT_ROW + 1);
    let max_row = (pos.row + window_radius).min(image.height() - 2);
    let min_col = pos.col.saturating_sub(window_radius).max(1);
    let max_col = (pos.col + window_radius).min(image.width() - 2);

    let mut best: Option<(i64, Pos)> = None;
    'scan: for r in min_row..=max_row {
        let near_row = r.abs_diff(pos.row) <= 1;
        for c in min_col..=max_col {
            if near_row && c.abs_diff(pos.col) <= 1 {
                continue;
            }
            if layer.has_parity(r, c) {
                continue;
            }
            let cand = Pos::new(r, c);
            let key = ac_key(&target, image.ring_raw(cand));
            if best.is_none_or(|(k, _)| key < k) {
                best = Some((key, cand));
                if key == 0 {
                    // nothing later in scan order can beat an exact match
                    break 'scan;
                }
            }
        }
    }

    Ok(match best {
        Some((key, center)) => MatchResult {
            center,
            distance: key_to_distance(key),
            patch: image.patch_at(center)?,
            self_match: false,
        },
        None => {
            let ring = RingVector::from_raw(target_raw);
            let mut values = [0.0; 9];
            values[..4].copy_from_slice(&ring.0[..4]);
            values[4] = ring.mean();
            values[5..].copy_from_slice(&ring.0[4..]);
            MatchResult {
                center: pos,
                distance: 0.0,
                patch: NormalizedPatch(values),
                self_match: true,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::LayerPlan;
    use rand::{Rng, SeedableRng};

    #[test]
    fn ring_vector_order_and_center_exclusion() {
        let raw = [0u8, 1, 2, 3, 99, 4, 5, 6, 7];
        let mut img = GrayImage::from_fn(3, 3, |r, c| raw[r * 3 + c]);
        let ring = ring_vector(&img, Pos::new(1, 1)).unwrap();
        let expected: Vec<f64> = (0..8).map(|v| f64::from(v) / 255.0).collect();
        assert_eq!(ring.values().as_slice(), expected.as_slice());
        img.set(1, 1, 3);
        assert_eq!(ring_vector(&img, Pos::new(1, 1)).unwrap(), ring);

        let white = GrayImage::filled(3, 3, 255);
        assert_eq!(ring_vector(&white, Pos::new(1, 1)).unwrap().0, [1.0; 8]);
        assert!(ring_vector(&white, Pos::new(0, 1)).is_err());
    }

    #[test]
    fn ac_distance_examples() {
        let a = RingVector([0.3, 0.1, 0.9, 0.4, 0.2, 0.0, 1.0, 0.5]);
        assert_eq!(ac_distance(&a, &a), 0.0);
        let b = RingVector(a.0.map(|v| v + 0.25));
        assert!(ac_distance(&a, &b) < 1e-15);

        let zero = RingVector([0.0; 8]);
        let one = RingVector::from_raw([1, 0, 0, 0, 0, 0, 0, 0]);
        let expected = (7.0f64 / 8.0).sqrt() / 255.0;
        assert!((ac_distance(&zero, &one) - expected).abs() < 1e-15);
    }

    #[test]
    fn integer_key_matches_float_distance() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..1000 {
            let a: [u8; 8] = rng.gen();
            let b: [u8; 8] = rng.gen();
            let key = ac_key(&a.map(i32::from), b);
            let d = ac_distance(&RingVector::from_raw(a), &RingVector::from_raw(b));
            assert!((key_to_distance(key) - d).abs() < 1e-12);
        }
    }

    fn noise_image(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |_, _| rng.gen())
    }

    /// Exhaustive scan written directly from the admissibility rules.
    fn oracle_min(img: &GrayImage, pos: Pos, radius: usize, layer: &LayerPlan) -> Option<(f64, Pos)> {
        let target = ring_vector(img, pos).unwrap();
        let mut best: Option<(f64, Pos)> = None;
        for r in 0..img.height() {
            for c in 0..img.width() {
                let cand = Pos::new(r, c);
                let in_window = r.abs_diff(pos.row) <= radius && c.abs_diff(pos.col) <= radius;
                let covers_target = r.abs_diff(pos.row) <= 1 && c.abs_diff(pos.col) <= 1;
                if !in_window || covers_target || !img.has_footprint(cand) || r < 2 {
                    continue;
                }
                if (r % 2, c % 2) == layer.parity() {
                    continue;
                }
                let d = ac_distance(&target, &ring_vector(img, cand).unwrap());
                if best.map_or(true, |(bd, _)| d < bd - 1e-13) {
                    best = Some((d, cand));
                }
            }
        }
        best
    }

    #[test]
    fn constant_image_picks_first_candidate() {
        let img = GrayImage::filled(40, 40, 128);
        let layer = LayerPlan::new(1, 40, 40).unwrap();
        let m = find_similar_patch(&img, Pos::new(21, 21), 15, &layer).unwrap();
        assert_eq!(m.distance, 0.0);
        // row 6 is the first window row; (6, 6) is even/even, not layer 1
        assert_eq!(m.center, Pos::new(6, 6));
        assert!(!m.self_match);
    }

    #[test]
    fn planted_duplicate_is_found() {
        let mut img = noise_image(40, 40, 5);
        let pos = Pos::new(21, 21);
        let ring = img.ring_raw(pos);
        let dup = Pos::new(12, 30);
        for (k, (dr, dc)) in crate::image::RING_OFFSETS.iter().enumerate() {
            img.set(
                (dup.row as isize + dr) as usize,
                (dup.col as isize + dc) as usize,
                ring[k],
            );
        }
        let layer = LayerPlan::new(1, 40, 40).unwrap();
        let m = find_similar_patch(&img, pos, 15, &layer).unwrap();
        assert_eq!(m.center, dup);
        assert_eq!(m.distance, 0.0);
        assert_eq!(m.patch, img.patch_at(dup).unwrap());
    }

    #[test]
    fn matches_exhaustive_oracle_on_noise() {
        for seed in 0..6 {
            let img = noise_image(23, 19, seed);
            for layer_index in 1..=4 {
                let layer = LayerPlan::new(layer_index, 23, 19).unwrap();
                for &pos in layer.pixels().iter().step_by(7) {
                    let m = find_similar_patch(&img, pos, 4, &layer).unwrap();
                    let (d, _) = oracle_min(&img, pos, 4, &layer).unwrap();
                    assert!((m.distance - d).abs() < 1e-12);
                    assert!(!layer.contains(m.center));
                    let target = ring_vector(&img, pos).unwrap();
                    let found = ring_vector(&img, m.center).unwrap();
                    assert!((ac_distance(&target, &found) - m.distance).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn corner_window_is_clipped() {
        let img = noise_image(30, 30, 9);
        let layer = LayerPlan::new(4, 30, 30).unwrap();
        let pos = Pos::new(2, 28);
        let m = find_similar_patch(&img, pos, 15, &layer).unwrap();
        assert!(img.has_footprint(m.center));
        assert!(m.center.row >= 2);
    }

    #[test]
    fn empty_candidate_set_falls_back_to_ring_mean() {
        let img = noise_image(5, 5, 1);
        let layer = LayerPlan::new(4, 5, 5).unwrap();
        // radius 1 only reaches candidates covering the target
        let pos = Pos::new(2, 2);
        let m = find_similar_patch(&img, pos, 1, &layer).unwrap();
        assert!(m.self_match);
        assert_eq!(m.center, pos);
        let ring = ring_vector(&img, pos).unwrap();
        assert!((m.patch.0[4] - ring.mean()).abs() < 1e-15);
        assert_eq!(m.patch.0[0], ring.0[0]);
        assert_eq!(m.patch.0[8], ring.0[7]);
    }

    #[test]
    fn search_is_deterministic() {
        let img = noise_image(50, 50, 2);
        let layer = LayerPlan::new(2, 50, 50).unwrap();
        let a = find_similar_patch(&img, Pos::new(25, 24), 15, &layer).unwrap();
        let b = find_similar_patch(&img, Pos::new(25, 24), 15, &layer).unwrap();
        assert_eq!(a, b);
    }
}
