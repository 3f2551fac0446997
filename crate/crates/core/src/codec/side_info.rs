//! The fixed 89-bit side-information header.
//!
//! Layout, most significant bit first:
//!
//! | bits    | field                                            |
//! |---------|--------------------------------------------------|
//! | 0..20   | message length (unsigned)                        |
//! | 20..29  | layer 1 threshold code (unsigned, 0.01 units)    |
//! | 29..53  | threshold deltas for layers 2..4 (8-bit signed)  |
//! | 53..65  | layer 1 compressed location-map length           |
//! | 65..89  | location-map length deltas, layers 2..4 (signed) |

use crate::error::{Error, Result};
use crate::tensor_gate::GateThreshold;

pub const SIDE_INFO_BITS: usize = 89;

const MESSAGE_BITS: u32 = 20;
const TAU_BITS: u32 = 9;
const LM_BITS: u32 = 12;
const DELTA_BITS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SideInfo {
    pub message_length: u32,
    pub tau_codes: [u16; 4],
    pub lm_lengths: [u32; 4],
}

fn push(out: &mut Vec<bool>, value: u64, width: u32) {
    for i in (0..width).rev() {
        out.push((value >> i) & 1 == 1);
    }
}

fn read(bits: &[bool], at: &mut usize, width: u32) -> u64 {
    let v = bits[*at..*at + width as usize]
        .iter()
        .fold(0u64, |acc, &b| (acc << 1) | u64::from(b));
    *at += width as usize;
    v
}

fn to_signed(raw: u64) -> i64 {
    i64::from(raw as u8 as i8)
}

fn delta_fits(d: i64) -> bool {
    (i64::from(i8::MIN)..=i64::from(i8::MAX)).contains(&d)
}

impl SideInfo {
    pub fn serialize(&self) -> Result<Vec<bool>> {
        if u64::from(self.message_length) >= 1 << MESSAGE_BITS {
            return Err(Error::SideInfoOverflow {
                field: "message_length",
                value: i64::from(self.message_length),
            });
        }
        if self.tau_codes[0] > GateThreshold::MAX_CODE {
            return Err(Error::InvalidParameter(format!(
                "threshold code {} out of range",
                self.tau_codes[0]
            )));
        }
        if u64::from(self.lm_lengths[0]) >= 1 << LM_BITS {
            return Err(Error::SideInfoOverflow {
                field: "lm_length_1",
                value: i64::from(self.lm_lengths[0]),
            });
        }
        let mut out = Vec::with_capacity(SIDE_INFO_BITS);
        push(&mut out, u64::from(self.message_length), MESSAGE_BITS);
        push(&mut out, u64::from(self.tau_codes[0]), TAU_BITS);
        for w in self.tau_codes.windows(2) {
            let d = i64::from(w[1]) - i64::from(w[0]);
            if !delta_fits(d) {
                return Err(Error::ThresholdDeltaOverflow(d as i32));
            }
            push(&mut out, d as u8 as u64, DELTA_BITS);
        }
        push(&mut out, u64::from(self.lm_lengths[0]), LM_BITS);
        for w in self.lm_lengths.windows(2) {
            let d = i64::from(w[1]) - i64::from(w[0]);
            if !delta_fits(d) {
                return Err(Error::SideInfoOverflow {
                    field: "lm_length_delta",
                    value: d,
                });
            }
            push(&mut out, d as u8 as u64, DELTA_BITS);
        }
        debug_assert_eq!(out.len(), SIDE_INFO_BITS);
        Ok(out)
    }

    pub fn parse(bits: &[bool]) -> Result<Self> {
        if bits.len() < SIDE_INFO_BITS {
            return Err(Error::MalformedStego(format!(
                "side information needs {SIDE_INFO_BITS} bits, got {}",
                bits.len()
            )));
        }
        let mut at = 0;
        let message_length = read(bits, &mut at, MESSAGE_BITS) as u32;
        let mut tau = [0i64; 4];
        tau[0] = read(bits, &mut at, TAU_BITS) as i64;
        for i in 1..4 {
            tau[i] = tau[i - 1] + to_signed(read(bits, &mut at, DELTA_BITS));
        }
        let mut lm = [0i64; 4];
        lm[0] = read(bits, &mut at, LM_BITS) as i64;
        for i in 1..4 {
            lm[i] = lm[i - 1] + to_signed(read(bits, &mut at, DELTA_BITS));
        }
        let mut tau_codes = [0u16; 4];
        for (code, &t) in tau_codes.iter_mut().zip(&tau) {
            if !(0..=i64::from(GateThreshold::MAX_CODE)).contains(&t) {
                return Err(Error::MalformedStego(format!("threshold code {t} out of range")));
            }
            *code = t as u16;
        }
        let mut lm_lengths = [0u32; 4];
        for (len, &l) in lm_lengths.iter_mut().zip(&lm) {
            if l < 0 {
                return Err(Error::MalformedStego(format!("negative location-map length {l}")));
            }
            *len = l as u32;
        }
        Ok(SideInfo {
            message_length,
            tau_codes,
            lm_lengths,
        })
    }
}
