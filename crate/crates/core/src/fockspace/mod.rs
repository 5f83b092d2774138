//! Finite-dimensional orthonormal models of the weighted Fock space and their
//! reproducing kernels.

mod basis;
mod diagnostics;
mod kernel;

pub use basis::{gaussian_closed_form_coefficient, orthonormal_basis, OrthoBasis};
pub use diagnostics::{
    bergman_mass, bernstein_diagnostic, bernstein_ratio, decay_fit, diag_bounds_scan,
    kernel_table, scaled_diag_ratio, write_kernel_csv, BernsteinReport, DiagRatioReport,
    KernelRow,
};
pub use kernel::{KernelEvaluator, KernelMode};
