//! Prediction-error expansion and shifting with unit pixel modification.
//!
//! Errors 0 and -1 carry one bit each (0 -> 0|1, -1 -> -1|-2); every other
//! error moves one step away from zero.

pub fn is_expandable(e: i32) -> bool {
    e == 0 || e == -1
}

/// Maps an error to its marked value. `bit` is consumed only when the error
/// is expandable.
pub fn map_error_embed(e: i32, bit: bool) -> i32 {
    match e {
        0 => i32::from(bit),
        -1 => -1 - i32::from(bit),
        e if e >= 1 => e + 1,
        e => e - 1,
    }
}

/// Inverse of [`map_error_embed`]: the original error and the carried bit.
pub fn map_error_extract(marked: i32) -> (i32, Option<bool>) {
    match marked {
        0 => (0, Some(false)),
        1 => (0, Some(true)),
        -1 => (-1, Some(false)),
        -2 => (-1, Some(true)),
        m if m >= 2 => (m - 1, None),
        m => (m + 1, None),
    }
}
