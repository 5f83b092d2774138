use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;

use super::{KernelEvaluator, OrthoBasis};
use crate::envelope::{fit_decay, DecayFit};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg::CMatrix;
use crate::quadrature::QuadratureRule;
use crate::random::{complex_gaussian_vector, seeded_rng};
use crate::weights::Weight;

/// `(min, max)` of `K̃(z, z)` over the grid.
pub fn diag_bounds_scan(k: &KernelEvaluator, grid: &[Point]) -> Result<(f64, f64)> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let values: Vec<f64> = grid.par_iter().map(|&z| k.weighted_diagonal(z)).collect();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0) {
        return Err(Error::Singular(format!(
            "normalized diagonal reaches {lo}; truncation too small for the scanned region"
        )));
    }
    Ok((lo, hi))
}

/// Exponential upper envelope of `|K̃(z, w)|` against `|z - w|`.
pub fn decay_fit(k: &KernelEvaluator, pairs: &[(Point, Point)]) -> Result<DecayFit> {
    let samples: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(z, w)| ((z - w).norm(), k.weighted_kernel(z, w).norm().ln()))
        .collect();
    fit_decay(&samples, 20)
}

/// `∫_{B_r(center)} K(w, w) e^{-2φ(w)} dm(w)`.
pub fn bergman_mass(k: &KernelEvaluator, center: Point, radius: f64) -> Result<f64> {
    if !(radius >= 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be ≥ 0, got {radius}")));
    }
    if radius == 0.0 {
        return Ok(0.0);
    }
    let valid = k.valid_radius();
    if center.norm() + radius > valid {
        return Err(Error::RegionEscape {
            center,
            radius,
            clip: valid,
        });
    }
    let q = QuadratureRule::disk_default(center, radius);
    let parts: Vec<f64> = q
        .nodes
        .par_iter()
        .zip(q.weights.par_iter())
        .map(|(&z, &w)| w * k.weighted_diagonal(z))
        .collect();
    Ok(parts.iter().sum())
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagRatioReport {
    pub delta: f64,
    /// `1 + δ`, the ratio for Gaussian weights.
    pub expected: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max |ratio - (1 + δ)|` over the grid.
    pub max_deviation: f64,
    /// `max ratio - min ratio`.
    pub oscillation: f64,
}

/// Ratio `K̃_{(1+δ)φ}(z, z) / K̃_φ(z, z)` over the grid.
///
/// Gaussian weights use closed-form kernels; other weights use degree-`n` models.
pub fn scaled_diag_ratio(w: &Weight, delta: f64, grid: &[Point], n: usize) -> Result<DiagRatioReport> {
    if !(delta.abs() < 0.25) {
        return Err(Error::InvalidParameter(format!("|δ| must be < 1/4, got {delta}")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let base = KernelEvaluator::best_available(w, n)?;
    let scaled = KernelEvaluator::best_available(&Weight::scaled(1.0 + delta, w.clone())?, n)?;
    let ratios: Vec<f64> = grid
        .par_iter()
        .map(|&z| scaled.weighted_diagonal(z) / base.weighted_diagonal(z))
        .collect();
    let expected = 1.0 + delta;
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let max_deviation = ratios.iter().map(|r| (r - expected).abs()).fold(0.0, f64::max);
    Ok(DiagRatioReport {
        delta,
        expected,
        min_ratio,
        max_ratio,
        max_deviation,
        oscillation: max_ratio - min_ratio,
    })
}

/// Hermitian form `A` with `∫_{B_1(z)} |f|² e^{-2φ} dm = a^* A a` for `f = ∑ a_k e_k`.
fn local_gram(basis: &OrthoBasis, z: Point) -> CMatrix {
    let q = QuadratureRule::disk_default(z, 1.0);
    let n = basis.degree();
    let mut g = CMatrix::zeros(n, n);
    for (&x, &w) in q.nodes.iter().zip(&q.weights) {
        let e = basis.eval_weighted(x);
        for i in 0..n {
            let ci = e[i].conj() * w;
            for j in 0..n {
                g[(i, j)] += ci * e[j];
            }
        }
    }
    g
}

fn ratio_from(e: &[Complex64], gram: &CMatrix, a: &DVector<Complex64>) -> Option<f64> {
    let value: Complex64 = e.iter().zip(a.iter()).map(|(x, y)| x * y).sum();
    let local = (a.adjoint() * gram * a)[(0, 0)].re;
    if local <= 0.0 {
        None
    } else {
        Some(value.norm_sqr() / local)
    }
}

/// `|f(z)|² e^{-2φ(z)} / ∫_{B_1(z)} |f|² e^{-2φ} dm`; `None` for the zero function.
pub fn bernstein_ratio(basis: &OrthoBasis, coeffs: &DVector<Complex64>, z: Point) -> Option<f64> {
    if coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
        return None;
    }
    ratio_from(&basis.eval_weighted(z), &local_gram(basis, z), coeffs)
}

#[derive(Clone, Debug, Serialize)]
pub struct BernsteinReport {
    pub max_ratio: f64,
    pub argmax: Point,
    pub trials: usize,
    pub grid_points: usize,
}

/// Largest observed pointwise-to-local-energy ratio over random `f` and the grid.
pub fn bernstein_diagnostic(
    basis: &OrthoBasis,
    trials: usize,
    grid: &[Point],
    seed: u64,
) -> Result<BernsteinReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let mut rng = seeded_rng(seed);
    let coeffs: Vec<DVector<Complex64>> = (0..trials)
        .map(|_| complex_gaussian_vector(&mut rng, basis.degree()))
        .collect();
    let per_point: Vec<f64> = grid
        .par_iter()
        .map(|&z| {
            let g = local_gram(basis, z);
            let e = basis.eval_weighted(z);
            coeffs
                .iter()
                .filter_map(|a| ratio_from(&e, &g, a))
                .fold(0.0, f64::max)
        })
        .collect();
    let (idx, max_ratio) = per_point
        .iter()
        .cloned()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(BernsteinReport {
        max_ratio,
        argmax: grid[idx],
        trials,
        grid_points: grid.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelRow {
    pub re_z: f64,
    pub im_z: f64,
    pub re_w: f64,
    pub im_w: f64,
    #[serde(rename = "re_K")]
    pub re_k: f64,
    #[serde(rename = "im_K")]
    pub im_k: f64,
    #[serde(rename = "weighted_abs_K")]
    pub weighted_abs_k: f64,
}

pub fn kernel_table(k: &KernelEvaluator, pairs: &[(Point, Point)]) -> Vec<KernelRow> {
    pairs
        .par_iter()
        .map(|&(z, w)| {
            let kv = k.kernel(z, w);
            KernelRow {
                re_z: z.re,
                im_z: z.im,
                re_w: w.re,
                im_w: w.im,
                re_k: kv.re,
                im_k: kv.im,
                weighted_abs_k: k.weighted_kernel(z, w).norm(),
            }
        })
        .collect()
}

/// CSV with 17 significant digits per value.
pub fn write_kernel_csv<W: Write>(rows: &[KernelRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "re_z,im_z,re_w,im_w,re_K,im_K,weighted_abs_K")?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.re_z, r.im_z, r.re_w, r.im_w, r.re_k, r.im_k, r.weighted_abs_k
        )?;
    }
    Ok(())
}
