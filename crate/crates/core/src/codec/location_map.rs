//! Location map of boundary-valued pixels and its run-length coding.
//!
//! The compressed form is the value of the first run followed by the
//! Elias-gamma codes of all run lengths. An empty map compresses to nothing.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocationMap {
    bits: Vec<bool>,
}

impl LocationMap {
    pub fn new(bits: Vec<bool>) -> Self {
        LocationMap { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn compress(&self) -> Vec<bool> {
        let mut out = Vec::new();
        let Some(&first) = self.bits.first() else {
            return out;
        };
        out.push(first);
        let mut run = 1usize;
        for w in self.bits.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                elias_gamma_encode(run, &mut out);
                run = 1;
            }
        }
        elias_gamma_encode(run, &mut out);
        out
    }

    pub fn decompress(code: &[bool]) -> Result<Self> {
        let Some((&first, mut rest)) = code.split_first() else {
            return Ok(LocationMap::default());
        };
        let mut bits = Vec::new();
        let mut value = first;
        while !rest.is_empty() {
            let (run, used) = elias_gamma_decode(rest)?;
            bits.extend(std::iter::repeat_n(value, run));
            rest = &rest[used..];
            value = !value;
        }
        if bits.is_empty() {
            return Err(Error::MalformedStego("location map has no runs".into()));
        }
        Ok(LocationMap { bits })
    }
}

/// `floor(log2 n)` zeros followed by `n` in binary. `n` must be positive.
pub fn elias_gamma_encode(n: usize, out: &mut Vec<bool>) {
    assert!(n > 0, "Elias-gamma codes positive integers only");
    let width = usize::BITS - n.leading_zeros();
    out.extend(std::iter::repeat_n(false, width as usize - 1));
    for i in (0..width).rev() {
        out.push((n >> i) & 1 == 1);
    }
}

/// Decodes one code from the front of `bits`; returns the value and the
/// number of bits used.
pub fn elias_gamma_decode(bits: &[bool]) -> Result<(usize, usize)> {
    let zeros = bits.iter().take_while(|&&b| !b).count();
    if zeros >= 40 {
        return Err(Error::MalformedStego("Elias-gamma prefix too long".into()));
    }
    let total = 2 * zeros + 1;
    if bits.len() < total {
        return Err(Error::MalformedStego("truncated Elias-gamma code".into()));
    }
    let n = bits[zeros..total]
        .iter()
        .fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
    Ok((n, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gamma_codes() {
        let mut out = Vec::new();
        elias_gamma_encode(1, &mut out);
        assert_eq!(out, vec![true]);
        out.clear();
        elias_gamma_encode(5, &mut out);
        assert_eq!(out, vec![false, false, true, false, true]);
        assert_eq!(elias_gamma_decode(&out).unwrap(), (5, 5));
        assert!(elias_gamma_decode(&[false, false, true]).is_err());
    }

    #[test]
    fn empty_map_is_empty_code() {
        let lm = LocationMap::default();
        assert!(lm.compress().is_empty());
        assert_eq!(LocationMap::decompress(&[]).unwrap(), lm);
    }

    #[test]
    fn known_encoding() {
        let lm = LocationMap::new(vec![true, false, true]);
        // first bit 1, runs 1,1,1
        assert_eq!(lm.compress(), vec![true, true, true, true]);
        let lm = LocationMap::new(vec![false; 6]);
        assert_eq!(lm.compress(), vec![false, false, false, true, true, false]);
    }

    #[test]
    fn leading_bit_alone_is_malformed() {
        assert!(LocationMap::decompress(&[true]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
            let lm = LocationMap::new(bits);
            prop_assert_eq!(LocationMap::decompress(&lm.compress()).unwrap(), lm);
        }
    }
}
