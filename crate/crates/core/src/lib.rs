//! Numerical laboratory for sampling and interpolation in weighted Fock spaces
//! of the complex plane.
//!
//! Everything is built on finite-dimensional orthonormal models of the space
//! of entire functions square-integrable against `e^{-2φ} dm`. Point sets are
//! compared against these models through weighted densities and the extreme
//! singular values of their collocation matrices.
//!
//! All computations are planar (one complex variable).

pub mod envelope;
pub mod error;
pub mod fekete;
pub mod fockspace;
pub mod frames;
pub mod geometry;
pub mod linalg;
pub mod pointsets;
pub mod quadrature;
pub mod random;
pub mod weights;

pub use error::{Error, Result};

pub use fockspace::{KernelEvaluator, KernelMode, OrthoBasis};

pub use geometry::Point;
pub use fekete::FeketeResult;
pub use frames::{FrameKind, FrameReport, LocalizedFrame};
pub use pointsets::{lattice, PointSet};

pub use quadrature::QuadratureRule;
pub use weights::Weight;
