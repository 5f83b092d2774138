use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, CMatrix};
use crate::random::{complex_gaussian_vector, seeded_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QNorm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "inf")]
    Inf,
}

impl QNorm {
    pub fn norm<'a>(self, v: impl Iterator<Item = &'a Complex64>) -> f64 {
        match self {
            QNorm::One => v.map(|c| c.norm()).sum(),
            QNorm::Two => v.map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            QNorm::Inf => v.map(|c| c.norm()).fold(0.0, f64::max),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WienerEstimate {
    pub q: QNorm,
    /// For `q = 2` the exact infimum; otherwise the smallest ratio over the probe pool,
    /// an upper estimate of the infimum.
    pub estimate: f64,
    pub certified: bool,
    pub trials: usize,
}

pub const DEFAULT_TRIALS: usize = 64;

/// Lower-bound constants `inf ‖A P c‖_q / ‖P c‖_q` over `P c ≠ 0`.
///
/// The probe pool holds the columns of `P` and `trials` images `P c` of seeded complex
/// Gaussian vectors. It depends only on `P` and the seed, so appending rows to `A`
/// never lowers an estimate.
pub fn wiener_probe(
    a: &CMatrix,
    p: &CMatrix,
    q_list: &[QNorm],
    trials: usize,
    seed: u64,
) -> Result<Vec<WienerEstimate>> {
    let n = p.nrows();
    if p.ncols() != n || a.ncols() != n {
        return Err(Error::InvalidParameter(format!(
            "need square P matching A's columns; got A {}×{}, P {}×{}",
            a.nrows(),
            a.ncols(),
            p.nrows(),
            p.ncols()
        )));
    }
    let defect = (p * p - p).norm();
    if defect > 1e-10 * p.norm().max(1.0) {
        return Err(Error::InvalidParameter(format!("P is not idempotent (‖P² − P‖ = {defect:.3e})")));
    }

    let mut pool: Vec<Vec<Complex64>> = (0..n).map(|j| p.column(j).iter().cloned().collect()).collect();
    let mut rng = seeded_rng(seed);
    for _ in 0..trials {
        let c = complex_gaussian_vector(&mut rng, n);
        pool.push((p * c).iter().cloned().collect());
    }
    let scale = pool
        .iter()
        .map(|y| QNorm::Two.norm(y.iter()))
        .fold(0.0, f64::max);

    q_list
        .iter()
        .map(|&q| {
            if q == QNorm::Two {
                let range = range_basis(p);
                if range.ncols() == 0 {
                    return Err(Error::Degenerate("P has trivial range".into()));
                }
                let s = singular_values(&(a * range));
                return Ok(WienerEstimate {
                    q,
                    estimate: s[s.len() - 1],
                    certified: true,
                    trials: 0,
                });
            }
            let estimate = pool
                .par_iter()
                .filter(|y| QNorm::Two.norm(y.iter()) > 1e-14 * scale)
                .map(|y| {
                    let ay = a * nalgebra::DVector::from_column_slice(y);
                    q.norm(ay.iter()) / q.norm(y.iter())
                })
                .reduce(|| f64::INFINITY, f64::min);
            if !estimate.is_finite() {
                return Err(Error::Degenerate("P has trivial range".into()));
            }
            Ok(WienerEstimate {
                q,
                estimate,
                certified: false,
                trials: pool.len(),
            })
        })
        .collect()
}

/// Orthonormal basis of the range of `P`.
fn range_basis(p: &CMatrix) -> CMatrix {
    let svd = p.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 1e-10 * top)
        .collect();
    CMatrix::from_fn(p.nrows(), keep.len(), |i, j| u[(i, keep[j])])
}
