//! Grayscale image container and distortion metrics.

use crate::error::{Error, Result};

/// Pixel coordinate, row first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub row: usize,
    pub col: usize,
}

impl Pos {
    pub const fn new(row: usize, col: usize) -> Self {
        Pos { row, col }
    }
}

/// Offsets of the eight ring neighbours in row-major order, center skipped.
pub const RING_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// An 8-bit grayscale image stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} pixels supplied for a {}x{} image",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                pixels.push(f(r, c));
            }
        }
        GrayImage {
            width,
            height,
            pixels,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    #[inline]
    pub fn at(&self, pos: Pos) -> u8 {
        self.get(pos.row, pos.col)
    }

    /// True if the full 3x3 footprint centered at `pos` lies inside the image.
    #[inline]
    pub fn has_footprint(&self, pos: Pos) -> bool {
        pos.row >= 1 && pos.col >= 1 && pos.row + 1 < self.height && pos.col + 1 < self.width
    }

    pub fn check_footprint(&self, pos: Pos) -> Result<()> {
        if self.has_footprint(pos) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                row: pos.row,
                col: pos.col,
                width: self.width,
                height: self.height,
            })
        }
    }

    /// The eight raw ring intensities around `pos`, in [`RING_OFFSETS`] order.
    ///
    /// Callers must have checked the footprint.
    #[inline]
    pub fn ring_raw(&self, pos: Pos) -> [u8; 8] {
        let w = self.width;
        let up = (pos.row - 1) * w + pos.col;
        let mid = pos.row * w + pos.col;
        let down = (pos.row + 1) * w + pos.col;
        let p = &self.pixels;
        [
            p[up - 1],
            p[up],
            p[up + 1],
            p[mid - 1],
            p[mid + 1],
            p[down - 1],
            p[down],
            p[down + 1],
        ]
    }

    /// The 3x3 patch centered at `pos`, normalized to [0, 1].
    pub fn patch_at(&self, pos: Pos) -> Result<NormalizedPatch> {
        self.check_footprint(pos)?;
        let mut values = [0.0; 9];
        for (k, v) in values.iter_mut().enumerate() {
            let r = pos.row + k / 3 - 1;
            let c = pos.col + k % 3 - 1;
            *v = normalize(self.get(r, c));
        }
        Ok(NormalizedPatch(values))
    }

    fn same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

#[inline]
pub fn normalize(v: u8) -> f64 {
    f64::from(v) / 255.0
}

/// Nine intensities of a 3x3 footprint in [0, 1], row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPatch(pub [f64; 9]);

impl NormalizedPatch {
    pub fn from_raw(raw: [u8; 9]) -> Self {
        NormalizedPatch(raw.map(normalize))
    }

    pub fn values(&self) -> &[f64; 9] {
        &self.0
    }
}

/// Sum of squared differences between two images of equal size.
pub fn sum_squared_error(a: &GrayImage, b: &GrayImage) -> Result<u64> {
    a.same_dims(b)?;
    Ok(a.pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum())
}

/// Peak signal-to-noise ratio in dB. Identical images give `f64::INFINITY`.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    let sse = sum_squared_error(a, b)?;
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.pixels.len() as f64;
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

/// Largest absolute per-pixel difference.
pub fn max_abs_diff(a: &GrayImage, b: &GrayImage) -> Result<u8> {
    a.same_dims(b)?;
    Ok(a.pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&x, &y)| x.abs_diff(y))
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn psnr_of_identical_images_is_infinite() {
        let a = GrayImage::filled(4, 4, 17);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
    }

    #[test]
    fn psnr_with_unit_error_everywhere() {
        let a = GrayImage::filled(8, 8, 100);
        let b = GrayImage::filled(8, 8, 101);
        let expected = 10.0 * (255.0f64 * 255.0).log10();
        assert!((psnr(&a, &b).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 48.1308).abs() < 1e-4);
    }

    #[test]
    fn psnr_with_error_two_on_half_the_pixels() {
        let a = GrayImage::filled(8, 8, 100);
        let b = GrayImage::from_fn(8, 8, |r, _| if r % 2 == 0 { 102 } else { 100 });
        let got = psnr(&a, &b).unwrap();
        assert!((got - 10.0 * (255.0f64 * 255.0 / 2.0).log10()).abs() < 1e-12);
        assert!((got - 45.1205).abs() < 1e-4);
    }

    #[test]
    fn psnr_dimension_mismatch() {
        let a = GrayImage::filled(4, 4, 0);
        let b = GrayImage::filled(4, 5, 0);
        assert!(matches!(psnr(&a, &b), Err(Error::DimensionMismatch(..))));
    }

    #[test]
    fn new_rejects_wrong_length() {
        assert!(GrayImage::new(3, 3, vec![0; 8]).is_err());
    }

    #[test]
    fn ring_skips_center() {
        let img = GrayImage::from_fn(3, 3, |r, c| (r * 3 + c) as u8);
        assert_eq!(img.ring_raw(Pos::new(1, 1)), [0, 1, 2, 3, 5, 6, 7, 8]);
        assert!(!img.has_footprint(Pos::new(0, 1)));
        assert!(img.check_footprint(Pos::new(2, 1)).is_err());
    }

    proptest! {
        #[test]
        fn psnr_is_symmetric(a in prop::collection::vec(any::<u8>(), 36),
                             b in prop::collection::vec(any::<u8>(), 36)) {
            let a = GrayImage::new(6, 6, a).unwrap();
            let b = GrayImage::new(6, 6, b).unwrap();
            let ab = psnr(&a, &b).unwrap();
            let ba = psnr(&b, &a).unwrap();
            prop_assert!(ab == ba);
        }

        #[test]
        fn unit_bounded_difference_keeps_psnr_floor(
            a in prop::collection::vec(1u8..=254, 49),
            d in prop::collection::vec(-1i16..=1, 49),
        ) {
            let b: Vec<u8> = a.iter().zip(&d).map(|(&x, &e)| (i16::from(x) + e) as u8).collect();
            let a = GrayImage::new(7, 7, a).unwrap();
            let b = GrayImage::new(7, 7, b).unwrap();
            prop_assert!(psnr(&a, &b).unwrap() >= 48.1308);
        }
    }
}
