//! Dense Cholesky factorization for the small fixed-size SPD systems of the
//! predictors. All reductions run in a fixed index order so repeated solves
//! are bit-identical.

use crate::error::{Error, Result};

pub type Matrix<const N: usize> = [[f64; N]; N];

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<const N: usize> {
    lower: Matrix<N>,
}

impl<const N: usize> Cholesky<N> {
    /// Factors a symmetric matrix, reading only its lower triangle.
    pub fn factor(a: &Matrix<N>) -> Result<Self> {
        let mut l = [[0.0; N]; N];
        for j in 0..N {
            let mut d = a[j][j];
            for k in 0..j {
                d -= l[j][k] * l[j][k];
            }
            if !(d > 0.0) {
                return Err(Error::SolveFailed { row: j, pivot: d });
            }
            let djj = d.sqrt();
            l[j][j] = djj;
            for i in (j + 1)..N {
                let mut s = a[i][j];
                for k in 0..j {
                    s -= l[i][k] * l[j][k];
                }
                l[i][j] = s / djj;
            }
        }
        Ok(Cholesky { lower: l })
    }

    pub fn solve(&self, b: &[f64; N]) -> [f64; N] {
        let l = &self.lower;
        let mut y = [0.0; N];
        for i in 0..N {
            let mut s = b[i];
            for k in 0..i {
                s -= l[i][k] * y[k];
            }
            y[i] = s / l[i][i];
        }
        let mut x = [0.0; N];
        for i in (0..N).rev() {
            let mut s = y[i];
            for k in (i + 1)..N {
                s -= l[k][i] * x[k];
            }
            x[i] = s / l[i][i];
        }
        x
    }

    pub fn lower(&self) -> &Matrix<N> {
        &self.lower
    }
}

pub fn mat_vec<const N: usize>(a: &Matrix<N>, x: &[f64; N]) -> [f64; N] {
    let mut out = [0.0; N];
    for (o, row) in out.iter_mut().zip(a) {
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
