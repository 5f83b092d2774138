use crate::error::{Error, Result};
use crate::fockspace::{KernelEvaluator, OrthoBasis};
use crate::geometry::{max_norm, Point};
use crate::linalg::{hermitian_eigenvalues, singular_values, CMatrix};
use crate::pointsets::{first_duplicate, PointSet};

use super::{FrameKind, FrameReport};

/// Margin added to the bulk radius `R_N` when restricting a set for [`sampling_bounds`].
pub const SAMPLING_MARGIN: f64 = 3.0;

/// `(σ_min², σ_max²)` of a collocation matrix.
pub fn extreme_squared_singular_values(m: &CMatrix) -> (f64, f64) {
    let s = singular_values(m);
    let hi = s.first().copied().unwrap_or(0.0);
    let lo = s.last().copied().unwrap_or(0.0);
    (lo * lo, hi * hi)
}

/// `A = σ_min²`, `B = σ_max²` of the collocation matrix of `S ∩ B_{R_N + 3}` in the
/// degree-`N` model.
pub fn sampling_bounds(basis: &OrthoBasis, s: &PointSet) -> Result<FrameReport> {
    let n = basis.degree();
    let radius = basis.bulk_radius() + SAMPLING_MARGIN;
    let kept = s.restricted_to_disk(radius);
    if kept.len() < n {
        return Err(Error::Degenerate(format!(
            "only {} points in B_{radius:.4}, fewer than N = {n}: not sampling at this degree",
            kept.len()
        )));
    }
    let m = basis.weighted_collocation(&kept);
    let (lower, upper) = extreme_squared_singular_values(&m);
    Ok(FrameReport {
        lower,
        upper,
        n: Some(n),
        region_radius: radius,
        set_size: kept.len(),
        dropped: s.len() - kept.len(),
        kind: FrameKind::Sampling,
    })
}

/// Extreme eigenvalues of the diagonally normalised Gram matrix `K̃(λ, μ)`.
pub fn interpolation_lower_bound(k: &KernelEvaluator, points: &[Point]) -> Result<FrameReport> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty point set".into()));
    }
    if let Some(d) = first_duplicate(points) {
        return Err(Error::Degenerate(format!(
            "duplicate point ({}, {}) makes the Gram matrix singular",
            d.re, d.im
        )));
    }
    let reach = max_norm(points);
    if reach > k.valid_radius() {
        return Err(Error::RegionEscape {
            center: Point::new(0.0, 0.0),
            radius: reach,
            clip: k.valid_radius(),
        });
    }
    let g = k.weighted_gram(points);
    let n = points.len();
    let scale: Vec<f64> = (0..n).map(|i| 1.0 / g[(i, i)].re.sqrt()).collect();
    if scale.iter().any(|s| !s.is_finite()) {
        return Err(Error::Singular("kernel diagonal vanishes at a point of the set".into()));
    }
    let normalized = CMatrix::from_fn(n, n, |i, j| g[(i, j)] * scale[i] * scale[j]);
    let ev = hermitian_eigenvalues(&normalized);
    Ok(FrameReport {
        lower: ev[0],
        upper: ev[n - 1],
        n: k.basis().map(|b| b.degree()),
        region_radius: reach,
        set_size: n,
        dropped: 0,
        kind: FrameKind::Riesz,
    })
}
