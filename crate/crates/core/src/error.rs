use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("curvature bounds violated at ({}, {}): Δφ/4 = {curvature}, bounds [{m}, {big_m}]", point.re, point.im)]
    BoundsViolation {
        point: Point,
        curvature: f64,
        m: f64,
        big_m: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ball B_{radius}({}, {}) escapes the generated region of radius {clip}", center.re, center.im)]
    RegionEscape {
        center: Point,
        radius: f64,
        clip: f64,
    },

    #[error("quadrature extent search exceeded the cap {cap} (weight grows too slowly)")]
    ExtentCap { cap: f64 },

    #[error("numerically singular: {0}")]
    Singular(String),

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("quadrature unresolved: {0}")]
    Unresolved(String),
}

impl Error {
    /// Numeric failures (as opposed to violated preconditions).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ExtentCap { .. } | Error::Singular(_) | Error::FitRejected(_) | Error::Unresolved(_)
        )
    }
}
