use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

use super::OrthoBasis;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg::CMatrix;
use crate::weights::Weight;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    /// `∑_{k<N} e_k(z) conj(e_k(w))` over an [`OrthoBasis`].
    Truncated,
    /// `(α/π) e^{α z conj(w)}` for `φ = α|z|²/2`.
    GaussianClosedForm,
}

/// Reproducing kernel `K(z, w)` together with its normalised form
/// `K̃(z, w) = K(z, w) e^{-φ(z) - φ(w)}`.
#[derive(Clone, Debug)]
pub struct KernelEvaluator {
    weight: Weight,
    mode: KernelMode,
    alpha: f64,
    basis: Option<Arc<OrthoBasis>>,
}

impl KernelEvaluator {
    pub fn truncated(basis: impl Into<Arc<OrthoBasis>>) -> Self {
        let basis = basis.into();
        KernelEvaluator {
            weight: basis.weight().clone(),
            mode: KernelMode::Truncated,
            alpha: f64::NAN,
            basis: Some(basis),
        }
    }

    /// Closed-form kernel; only Gaussian weights (possibly scaled) have one.
    pub fn closed_form(weight: &Weight) -> Result<Self> {
        let alpha = weight.gaussian_alpha().ok_or_else(|| {
            Error::InvalidParameter("closed-form kernel requires a Gaussian weight".into())
        })?;
        Ok(KernelEvaluator {
            weight: weight.clone(),
            mode: KernelMode::GaussianClosedForm,
            alpha,
            basis: None,
        })
    }

    /// Closed form when available, otherwise a truncated model of degree `n`.
    pub fn best_available(weight: &Weight, n: usize) -> Result<Self> {
        if weight.is_radial() {
            Self::closed_form(weight)
        } else {
            Ok(Self::truncated(OrthoBasis::new(weight, n)?))
        }
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn basis(&self) -> Option<&OrthoBasis> {
        self.basis.as_deref()
    }

    /// Radius of the disk on which the evaluator is meaningful (infinite in closed form).
    pub fn valid_radius(&self) -> f64 {
        match &self.basis {
            Some(b) => b.quadrature().extent,
            None => f64::INFINITY,
        }
    }

    pub fn kernel(&self, z: Point, w: Point) -> Complex64 {
        match self.mode {
            KernelMode::GaussianClosedForm => (self.alpha * z * w.conj()).exp() * (self.alpha / PI),
            KernelMode::Truncated => {
                self.weighted_kernel(z, w) * (self.weight.phi(z) + self.weight.phi(w)).exp()
            }
        }
    }

    pub fn weighted_kernel(&self, z: Point, w: Point) -> Complex64 {
        match self.mode {
            KernelMode::GaussianClosedForm => {
                let a = self.alpha;
                // α z conj(w) - α|z|²/2 - α|w|²/2 split into modulus and phase
                let re = z.re * w.re + z.im * w.im;
                let im = z.im * w.re - z.re * w.im;
                let ln_mag = a * re - 0.5 * a * (z.norm_sqr() + w.norm_sqr());
                Complex64::from_polar((a / PI) * ln_mag.exp(), a * im)
            }
            KernelMode::Truncated => {
                let b = self.basis.as_ref().expect("truncated mode carries a basis");
                let ez = b.eval_weighted(z);
                let ew = b.eval_weighted(w);
                ez.iter().zip(&ew).map(|(a, c)| a * c.conj()).sum()
            }
        }
    }

    /// `K̃(z, z)`.
    pub fn weighted_diagonal(&self, z: Point) -> f64 {
        match self.mode {
            KernelMode::GaussianClosedForm => self.alpha / PI,
            KernelMode::Truncated => {
                let b = self.basis.as_ref().expect("truncated mode carries a basis");
                b.eval_weighted(z).iter().map(|c| c.norm_sqr()).sum()
            }
        }
    }

    /// Matrix `[K̃(p_i, p_j)]`.
    pub fn weighted_gram(&self, points: &[Point]) -> CMatrix {
        match &self.basis {
            Some(b) => {
                let e = b.weighted_collocation(points);
                &e * e.adjoint()
            }
            None => {
                let rows: Vec<Vec<Complex64>> = points
                    .par_iter()
                    .map(|&z| points.iter().map(|&w| self.weighted_kernel(z, w)).collect())
                    .collect();
                CMatrix::from_fn(points.len(), points.len(), |i, j| rows[i][j])
            }
        }
    }
}
