//! Ordered bit sequences with a read cursor.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Eq)]
pub struct BitStream {
    bits: Vec<bool>,
    cursor: usize,
}

impl PartialEq for BitStream {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl From<Vec<bool>> for BitStream {
    fn from(bits: Vec<bool>) -> Self {
        BitStream { bits, cursor: 0 }
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitStream::from(iter.into_iter().collect::<Vec<_>>())
    }
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bits of `bytes`, most significant bit of each byte first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        bytes
            .iter()
            .flat_map(|&b| (0..8).rev().map(move |i| (b >> i) & 1 == 1))
            .collect()
    }

    /// Packs bits MSB-first; a trailing partial byte is zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)))
            })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.cursor
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from_slice(&mut self, bits: &[bool]) {
        self.bits.extend_from_slice(bits);
    }

    /// Appends the low `width` bits of `value`, MSB first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let bit = *self
            .bits
            .get(self.cursor)
            .ok_or(Error::BitStreamExhausted(self.cursor))?;
        self.cursor += 1;
        Ok(bit)
    }

    /// Reads `width` bits MSB first as an unsigned value.
    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        if self.remaining() < width as usize {
            return Err(Error::BitStreamExhausted(self.bits.len()));
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Ok(v)
    }
}
