//! Classical Sinkhorn scaling of strictly positive square matrices.
//!
//! Finds positive diagonal `D₁`, `D₂` with `D₁ A D₂` doubly stochastic.
//! The pair is unique up to `(c D₁, D₂ / c)`; returned pairs are pinned to
//! `d1[0] = 1`.

use crate::error::{Error, Result};
use crate::matcore::RMatrix;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingPair {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub scaled: RMatrix,
}

impl ScalingPair {
    /// Largest deviation of any row or column sum of `scaled` from one.
    pub fn max_deviation(&self) -> f64 {
        stochastic_deviation(&self.scaled)
    }
}

pub fn stochastic_deviation(s: &RMatrix) -> f64 {
    let rows = s.row_iter().map(|r| (r.sum() - 1.0).abs());
    let cols = s.column_iter().map(|c| (c.sum() - 1.0).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

fn check_input(a: &RMatrix) -> Result<usize> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: a.ncols(),
        });
    }
    for ((row, col), &value) in a.iter().enumerate().map(|(k, v)| ((k % n, k / n), v)) {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveEntry { row, col, value });
        }
    }
    Ok(n)
}

pub fn sinkhorn_scale(a: &RMatrix, tol: f64, max_iter: usize) -> Result<ScalingPair> {
    let n = check_input(a)?;
    sinkhorn_scale_from(a, &vec![1.0; n], tol, max_iter)
}

/// Alternating row/column normalization starting from column scaling `d2`.
pub fn sinkhorn_scale_from(
    a: &RMatrix,
    init_d2: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<ScalingPair> {
    let n = check_input(a)?;
    if init_d2.len() != n || init_d2.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(
            "initial column scaling must be positive with one entry per column".into(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tol must be positive, got {tol}"
        )));
    }

    let mut d1 = vec![1.0; n];
    let mut d2 = init_d2.to_vec();
    let mut deviation = f64::INFINITY;
    for iteration in 0..max_iter {
        for i in 0..n {
            let s: f64 = (0..n).map(|j| a[(i, j)] * d2[j]).sum();
            d1[i] = 1.0 / s;
        }
        for j in 0..n {
            let s: f64 = (0..n).map(|i| d1[i] * a[(i, j)]).sum();
            d2[j] = 1.0 / s;
        }
        // columns are exact after the column step; rows carry the error
        deviation = (0..n)
            .map(|i| ((0..n).map(|j| d1[i] * a[(i, j)] * d2[j]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        if deviation <= tol || iteration + 1 == max_iter {
            break;
        }
    }

    let gauge = d1[0];
    d1.iter_mut().for_each(|x| *x /= gauge);
    d2.iter_mut().for_each(|x| *x *= gauge);
    let scaled = RMatrix::from_fn(n, n, |i, j| d1[i] * a[(i, j)] * d2[j]);
    let pair = ScalingPair { d1, d2, scaled };
    let final_deviation = pair.max_deviation();
    if final_deviation <= tol {
        Ok(pair)
    } else {
        Err(Error::SinkhornNotConverged {
            iterations: max_iter,
            deviation: final_deviation.max(deviation),
        })
    }
}

/// True iff `p2 = (c·p1.d1, p1.d2 / c)` for some `c > 0`, entrywise within
/// relative tolerance `tol`.
pub fn verify_uniqueness(a: &RMatrix, p1: &ScalingPair, p2: &ScalingPair, tol: f64) -> bool {
    let n = a.nrows();
    let sizes_ok = [&p1.d1, &p1.d2, &p2.d1, &p2.d2]
        .iter()
        .all(|v| v.len() == n);
    if !sizes_ok || !(p1.d1[0] > 0.0) {
        return false;
    }
    let c = p2.d1[0] / p1.d1[0];
    if !(c > 0.0 && c.is_finite()) {
        return false;
    }
    let close = |x: f64, y: f64| (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0);
    (0..n).all(|i| close(p2.d1[i], c * p1.d1[i]) && close(p2.d2[i], p1.d2[i] / c))
}
