//! Stability constants of point sets and frames in the truncated models.
//!
//! Sampling and Riesz bounds are exact for the finite sections they are computed on;
//! the experiments in [`experiments`] sweep degrees and deformations to expose the
//! trends that stand in for the infinite-dimensional statements.

use serde::Serialize;

pub mod experiments;
pub mod localized;
pub mod sampling;
pub mod translation;
pub mod wiener;

pub use experiments::{deformation_experiment, sharp_experiment, DeformRow, SharpReport};
pub use localized::{build_localized_frame, localized_frame_bounds, LocalizedFrame};
pub use sampling::{interpolation_lower_bound, sampling_bounds, SAMPLING_MARGIN};
pub use translation::{gaussian_translation_check, TranslationReport};
pub use wiener::{wiener_probe, QNorm, WienerEstimate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Sampling,
    Riesz,
    LocalizedFrame,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub lower: f64,
    pub upper: f64,
    /// Degree of the model; absent for closed-form kernels.
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub region_radius: f64,
    pub set_size: usize,
    /// Points of the input set left out by the region restriction.
    pub dropped: usize,
    pub kind: FrameKind,
}

impl FrameReport {
    pub fn condition(&self) -> f64 {
        self.upper / self.lower
    }
}
