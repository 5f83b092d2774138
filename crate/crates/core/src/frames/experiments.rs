use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::{fit_envelope, DecayFit};
use crate::error::{Error, Result};
use crate::fekete::{fekete, FeketeSummary};
use crate::fockspace::{KernelEvaluator, OrthoBasis};
use crate::geometry::Point;
use crate::pointsets::{DensityEstimate, PointSet};
use crate::weights::Weight;

use super::sampling::{interpolation_lower_bound, sampling_bounds};
use super::FrameReport;

#[derive(Clone, Debug, Serialize)]
pub struct DeformRow {
    pub a: f64,
    pub lower: f64,
    pub upper: f64,
    pub set_size: usize,
    /// Weighted density ratio on the largest centred disk inside the dilated region.
    pub density: f64,
    pub density_radius: f64,
}

/// Sampling bounds and density of `a·S` for each `a` in the schedule.
pub fn deformation_experiment(
    basis: &OrthoBasis,
    s: &PointSet,
    schedule: &[f64],
    kernel: &KernelEvaluator,
) -> Result<Vec<DeformRow>> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty dilation schedule".into()));
    }
    let base = sampling_bounds(basis, s)?;
    if !(base.lower > 0.0) {
        return Err(Error::Degenerate("set is not sampling at a = 1 for this degree".into()));
    }
    schedule
        .par_iter()
        .map(|&a| {
            let d = s.dilate(a)?;
            let bounds = sampling_bounds(basis, &d)?;
            let r = d.clip_radius().min(kernel.valid_radius());
            let dens = d.beurling_density(kernel, &[r], &[Point::new(0.0, 0.0)])?;
            Ok(DeformRow {
                a,
                lower: bounds.lower,
                upper: bounds.upper,
                set_size: bounds.set_size,
                density: dens.d_plus,
                density_radius: r,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SharpReport {
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub n: usize,
    /// Degree of the model for `(1 − ε)φ`: `⌊(1 − ε)N⌋`.
    pub matched_degree: usize,
    /// Riesz bounds of the Fekete set under `(1 + ε)φ`.
    pub interpolation: FrameReport,
    /// Sampling bounds of the Fekete set under `(1 − ε)φ`.
    pub sampling: FrameReport,
    pub density: DensityEstimate,
    /// Envelope of `|l_λ(z)|` against `|z − λ|`.
    pub plain_decay: DecayFit,
    /// Envelope of `|l̃_λ(z)| = |l_λ(z)| |K̃_{εφ}(z, λ)| / K̃_{εφ}(λ, λ)`.
    pub improved_decay: DecayFit,
    /// `max |l̃_λ(λ') − δ_{λλ'}|` over the configuration.
    pub improved_cardinality_error: f64,
    pub fekete: FeketeSummary,
}

/// Fekete set at degree `N` for `φ`, probed as an interpolating set for `(1 + ε)φ` and as a
/// sampling set for `(1 − ε)φ`.
pub fn sharp_experiment(w: &Weight, epsilon: f64, n: usize) -> Result<SharpReport> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::InvalidParameter(format!("ε must lie in (0, 1/2), got {epsilon}")));
    }
    let f = fekete(OrthoBasis::new(w, n)?)?;
    let pts = f.points().points().to_vec();

    let up = Weight::scaled(1.0 + epsilon, w.clone())?;
    let interpolation = interpolation_lower_bound(&KernelEvaluator::best_available(&up, n)?, &pts)?;

    let matched_degree = (((1.0 - epsilon) * n as f64).floor() as usize).max(1);
    let down = Weight::scaled(1.0 - epsilon, w.clone())?;
    let sampling = sampling_bounds(&OrthoBasis::new(&down, matched_degree)?, f.points())?;

    let k = KernelEvaluator::best_available(w, n)?;
    let r = w.support_radius(n).min(f.points().clip_radius());
    let density = f.points().beurling_density(&k, &[r], &[Point::new(0.0, 0.0)])?;

    let k_eps = KernelEvaluator::best_available(&Weight::scaled(epsilon, w.clone())?, n)?;
    let lag = f.lagrange()?;
    let grid = f.grid().verification().points;
    let table = lag.eval_many(f.basis(), &grid);
    let mut plain = Vec::with_capacity(grid.len() * n);
    let mut improved = Vec::with_capacity(grid.len() * n);
    for (i, &z) in grid.iter().enumerate() {
        for (j, &lam) in pts.iter().enumerate() {
            let d = (z - lam).norm();
            let ln_l = table[(i, j)].norm().ln();
            let damp = k_eps.weighted_kernel(z, lam).norm() / k_eps.weighted_diagonal(lam);
            plain.push((d, ln_l));
            improved.push((d, ln_l + damp.ln()));
        }
    }
    let plain_decay = fit_envelope(&plain, 20)?;
    let improved_decay = fit_envelope(&improved, 20)?;

    let at_nodes = lag.eval_many(f.basis(), &pts);
    let mut improved_cardinality_error: f64 = 0.0;
    for (i, &z) in pts.iter().enumerate() {
        for (j, &lam) in pts.iter().enumerate() {
            let factor = k_eps.weighted_kernel(z, lam) / k_eps.weighted_diagonal(lam);
            let target = if i == j { 1.0 } else { 0.0 };
            improved_cardinality_error = improved_cardinality_error.max((at_nodes[(i, j)] * factor - target).norm());
        }
    }

    Ok(SharpReport {
        epsilon,
        n,
        matched_degree,
        interpolation,
        sampling,
        density,
        plain_decay,
        improved_decay,
        improved_cardinality_error,
        fekete: f.summary()?,
    })
}
