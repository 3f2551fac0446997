//! Rhombus baseline: the mean of the four axis neighbours.

use crate::error::Result;
use crate::image::{GrayImage, Pos};

/// Up, down, left and right neighbours.
fn neighbours(image: &GrayImage, pos: Pos) -> [u8; 4] {
    [
        image.get(pos.row - 1, pos.col),
        image.get(pos.row + 1, pos.col),
        image.get(pos.row, pos.col - 1),
        image.get(pos.row, pos.col + 1),
    ]
}

pub fn rhombus_from_neighbours(n: [u8; 4]) -> u8 {
    let sum: u32 = n.iter().map(|&v| u32::from(v)).sum();
    // round half up of sum / 4
    ((sum + 2) / 4) as u8
}

pub fn rhombus_predict(image: &GrayImage, pos: Pos) -> Result<u8> {
    image.check_footprint(pos)?;
    Ok(rhombus_from_neighbours(neighbours(image, pos)))
}

/// Local-variance gate for the baseline: sum of squared deviations of the
/// four neighbours from their mean, intensities in [0, 1]. Same units and
/// threshold grid as the structure-tensor gate, which is also a four-sample
/// sum of squared differences.
pub fn rhombus_gate_value(image: &GrayImage, pos: Pos) -> f64 {
    let n = neighbours(image, pos).map(i64::from);
    let sum: i64 = n.iter().sum();
    let sq: i64 = n.iter().map(|v| v * v).sum();
    // 4 * sum of squared deviations, exact
    let ssd4 = 4 * sq - sum * sum;
    ssd4 as f64 / 4.0 / (255.0 * 255.0)
}
