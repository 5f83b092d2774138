//! Upper-envelope fits `ln|g| ≤ ln C - c·d` to samples `(d, ln|g|)`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    /// Decay rate `c`.
    pub rate: f64,
    /// Prefactor `C`.
    pub prefactor: f64,
    /// RMS residual of the fit against the binned maxima.
    pub residual: f64,
    pub bins_used: usize,
}

/// Least-squares line through the per-bin maxima of `ln|g|`.
///
/// Separations are split into `bins` equal bins over `[min_d, max_d]`; empty bins and
/// bins whose maximum is `-∞` (exact zeros) are skipped. The returned rate may be
/// negative; use [`fit_decay`] to reject non-decaying data.
pub fn fit_envelope(samples: &[(f64, f64)], bins: usize) -> Result<DecayFit> {
    let finite: Vec<(f64, f64)> = samples
        .iter()
        .cloned()
        .filter(|(d, _)| d.is_finite())
        .collect();
    if finite.is_empty() {
        return Err(Error::Degenerate("no samples for the envelope fit".into()));
    }
    let lo = finite.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let hi = finite.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if !(hi - lo > 1e-9 * hi.abs().max(1.0)) {
        return Err(Error::Degenerate("samples have no separation spread".into()));
    }
    let bins = bins.max(2);
    let width = (hi - lo) / bins as f64;
    let mut top = vec![(f64::NEG_INFINITY, 0.0); bins];
    for &(d, y) in &finite {
        let b = (((d - lo) / width) as usize).min(bins - 1);
        if y > top[b].0 {
            top[b] = (y, d);
        }
    }
    let pts: Vec<(f64, f64)> = top
        .iter()
        .filter(|(y, _)| y.is_finite())
        .map(|&(y, d)| (d, y))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Degenerate("fewer than two populated separation bins".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        rate: -slope,
        prefactor: intercept.exp(),
        residual,
        bins_used: pts.len(),
    })
}

/// As [`fit_envelope`] but rejects fits whose rate is not strictly positive.
pub fn fit_decay(samples: &[(f64, f64)], bins: usize) -> Result<DecayFit> {
    let fit = fit_envelope(samples, bins)?;
    if !(fit.rate > 0.0) {
        return Err(Error::FitRejected(format!("decay rate {} is not positive", fit.rate)));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_exponential() {
        let samples: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let d = i as f64 * 0.05;
                (d, 0.3 - 1.7 * d)
            })
            .collect();
        let fit = fit_decay(&samples, 20).unwrap();
        assert!((fit.rate - 1.7).abs() < 1e-12);
        assert!((fit.prefactor - 0.3f64.exp()).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn uses_per_bin_maxima() {
        // points below the envelope must not drag the fit down
        let mut samples = Vec::new();
        for i in 0..100 {
            let d = i as f64 * 0.1;
            samples.push((d, -d));
            samples.push((d, -d - 5.0));
        }
        let fit = fit_decay(&samples, 10).unwrap();
        assert!((fit.rate - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_zero_spread_and_growth() {
        assert!(matches!(fit_decay(&[(0.0, 1.0), (0.0, 2.0)], 5), Err(Error::Degenerate(_))));
        let growing: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, i as f64)).collect();
        assert!(matches!(fit_decay(&growing, 5), Err(Error::FitRejected(_))));
    }
}
