//! Subharmonic weights `φ` with curvature sandwiched between `m` and `M`.
//!
//! In the plane the curvature condition reads `m ≤ Δφ(z)/4 ≤ M`. Three
//! families are built in: the Gaussian `α|z|²/2`, a non-radial bounded
//! perturbation of it, and positive multiples of any weight.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{square_grid, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weight {
    /// `φ(z) = α|z|²/2`.
    Gaussian { alpha: f64 },
    /// `φ(z) = α|z|²/2 + t·sin(x)·sin(y)`.
    PerturbedGaussian { alpha: f64, t: f64 },
    /// `φ = a·φ_inner`.
    Scaled { a: f64, inner: Box<Weight> },
}

/// Outcome of a successful curvature scan.
#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub points: usize,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    /// `min_z min(Δφ(z)/4 - m, M - Δφ(z)/4)`; zero for constant curvature.
    pub worst_margin: f64,
    pub worst_point: Point,
}

impl Weight {
    pub fn gaussian(alpha: f64) -> Result<Self> {
        let w = Weight::Gaussian { alpha };
        w.check_params()?;
        Ok(w)
    }

    pub fn perturbed_gaussian(alpha: f64, t: f64) -> Result<Self> {
        let w = Weight::PerturbedGaussian { alpha, t };
        w.check_params()?;
        Ok(w)
    }

    pub fn scaled(a: f64, inner: Weight) -> Result<Self> {
        let w = Weight::Scaled {
            a,
            inner: Box::new(inner),
        };
        w.check_params()?;
        Ok(w)
    }

    /// The standard weight `π|z|²/2`.
    pub fn standard() -> Self {
        Weight::Gaussian {
            alpha: std::f64::consts::PI,
        }
    }

    /// Checks the parameter domains (`α > 0`, `t ≥ 0`, `a > 0`).
    ///
    /// This does not check the curvature sandwich; see [`validate_bounds`].
    pub fn check_params(&self) -> Result<()> {
        match self {
            Weight::Gaussian { alpha } => positive("alpha", *alpha),
            Weight::PerturbedGaussian { alpha, t } => {
                positive("alpha", *alpha)?;
                if !(t.is_finite() && *t >= 0.0) {
                    return Err(Error::InvalidParameter(format!("t must be ≥ 0, got {t}")));
                }
                Ok(())
            }
            Weight::Scaled { a, inner } => {
                positive("a", *a)?;
                inner.check_params()
            }
        }
    }

    pub fn phi(&self, z: Point) -> f64 {
        match self {
            Weight::Gaussian { alpha } => alpha * z.norm_sqr() / 2.0,
            Weight::PerturbedGaussian { alpha, t } => {
                alpha * z.norm_sqr() / 2.0 + t * z.re.sin() * z.im.sin()
            }
            Weight::Scaled { a, inner } => a * inner.phi(z),
        }
    }

    pub fn laplacian(&self, z: Point) -> f64 {
        match self {
            Weight::Gaussian { alpha } => 2.0 * alpha,
            Weight::PerturbedGaussian { alpha, t } => {
                2.0 * alpha - 2.0 * t * z.re.sin() * z.im.sin()
            }
            Weight::Scaled { a, inner } => a * inner.laplacian(z),
        }
    }

    /// Curvature bounds `(m, M)`.
    pub fn curvature_bounds(&self) -> (f64, f64) {
        match self {
            Weight::Gaussian { alpha } => (alpha / 2.0, alpha / 2.0),
            Weight::PerturbedGaussian { alpha, t } => ((alpha - t) / 2.0, (alpha + t) / 2.0),
            Weight::Scaled { a, inner } => {
                let (m, big_m) = inner.curvature_bounds();
                (a * m, a * big_m)
            }
        }
    }

    /// `Some(α)` when `φ = α|z|²/2` exactly.
    pub fn gaussian_alpha(&self) -> Option<f64> {
        match self {
            Weight::Gaussian { alpha } => Some(*alpha),
            Weight::PerturbedGaussian { alpha, t } if *t == 0.0 => Some(*alpha),
            Weight::PerturbedGaussian { .. } => None,
            Weight::Scaled { a, inner } => inner.gaussian_alpha().map(|x| a * x),
        }
    }

    pub fn is_radial(&self) -> bool {
        self.gaussian_alpha().is_some()
    }

    /// Gaussian envelope `(β, c)` with `|φ(z) - β|z|²/2| ≤ c` everywhere.
    pub fn radial_envelope(&self) -> (f64, f64) {
        match self {
            Weight::Gaussian { alpha } => (*alpha, 0.0),
            Weight::PerturbedGaussian { alpha, t } => (*alpha, *t),
            Weight::Scaled { a, inner } => {
                let (beta, c) = inner.radial_envelope();
                (a * beta, a * c)
            }
        }
    }

    /// Gaussian curvature scale used to pre-scale monomials.
    pub fn reference_alpha(&self) -> f64 {
        self.radial_envelope().0
    }

    /// Bulk radius `R_N = sqrt(N/(2m)) - 1` of a degree-`N` model.
    pub fn bulk_radius(&self, n: usize) -> f64 {
        (n as f64 / (2.0 * self.curvature_bounds().0)).sqrt() - 1.0
    }

    /// Radius `sqrt(N/(2m))` of the disk carrying a degree-`N` model.
    pub fn support_radius(&self, n: usize) -> f64 {
        (n as f64 / (2.0 * self.curvature_bounds().0)).sqrt()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")))
    }
}

/// Default validation grid: 101×101 over `[-5, 5]²`.
pub fn default_validation_grid() -> Vec<Point> {
    square_grid(101, 5.0)
}

/// Checks `m ≤ Δφ/4 ≤ M` (with `m > 0`) at every grid point.
pub fn validate_bounds(w: &Weight, grid: &[Point]) -> Result<BoundsReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("validation grid is empty".into()));
    }
    w.check_params()?;
    let (m, big_m) = w.curvature_bounds();
    let slack = 1e-12 * big_m.abs().max(1.0);

    let mut worst_margin = f64::INFINITY;
    let mut worst_point = grid[0];
    let mut lowest = (f64::INFINITY, grid[0]);
    for &z in grid {
        let curv = w.laplacian(z) / 4.0;
        let margin = (curv - m).min(big_m - curv);
        if margin < worst_margin {
            worst_margin = margin;
            worst_point = z;
        }
        if curv < lowest.0 {
            lowest = (curv, z);
        }
    }

    if m <= 0.0 || lowest.0 <= 0.0 {
        return Err(Error::BoundsViolation {
            point: lowest.1,
            curvature: lowest.0,
            m,
            big_m,
        });
    }
    if worst_margin < -slack {
        return Err(Error::BoundsViolation {
            point: worst_point,
            curvature: w.laplacian(worst_point) / 4.0,
            m,
            big_m,
        });
    }
    Ok(BoundsReport {
        points: grid.len(),
        m,
        big_m,
        worst_margin: worst_margin.max(0.0),
        worst_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn phi_examples() {
        let g = Weight::gaussian(PI).unwrap();
        assert_eq!(g.phi(Point::new(0.0, 0.0)), 0.0);
        assert!((g.phi(Point::new(1.0, 0.0)) - PI / 2.0).abs() < 1e-15);

        let p = Weight::perturbed_gaussian(PI, 0.5).unwrap();
        let z = Point::new(PI / 2.0, PI / 2.0);
        // hand evaluation: α|z|²/2 = π(π²/4 + π²/4)/2 = π³/4, perturbation 0.5
        let expected = PI.powi(3) / 4.0 + 0.5;
        assert!((p.phi(z) - expected).abs() < 1e-13);
    }

    #[test]
    fn laplacian_examples() {
        let g = Weight::gaussian(PI).unwrap();
        assert!((g.laplacian(Point::new(0.3, -2.0)) - 2.0 * PI).abs() < 1e-15);
        let p = Weight::perturbed_gaussian(PI, 0.5).unwrap();
        assert!((p.laplacian(Point::new(PI / 2.0, PI / 2.0)) - (2.0 * PI - 1.0)).abs() < 1e-14);
        let s = Weight::scaled(2.0, g).unwrap();
        assert!((s.laplacian(Point::new(1.0, 1.0)) - 4.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn laplacian_matches_finite_differences() {
        let p = Weight::perturbed_gaussian(1.3, 0.4).unwrap();
        let h = 1e-3;
        for z in square_grid(7, 2.0) {
            let fd = (p.phi(z + h) + p.phi(z - h) + p.phi(z + Point::new(0.0, h))
                + p.phi(z - Point::new(0.0, h))
                - 4.0 * p.phi(z))
                / (h * h);
            assert!((fd - p.laplacian(z)).abs() < 1e-5, "{z}: {fd} vs {}", p.laplacian(z));
        }
    }

    #[test]
    fn validate_gaussian_zero_margin() {
        let grid = square_grid(50, 3.0);
        let r = validate_bounds(&Weight::gaussian(PI).unwrap(), &grid).unwrap();
        assert_eq!(r.worst_margin, 0.0);
        assert_eq!(r.points, 2500);
    }

    #[test]
    fn validate_perturbed_passes() {
        let grid = square_grid(50, 3.0);
        let r = validate_bounds(&Weight::perturbed_gaussian(PI, 0.5).unwrap(), &grid).unwrap();
        assert!(r.worst_margin >= 0.0);
    }

    #[test]
    fn validate_rejects_large_perturbation() {
        let w = Weight::perturbed_gaussian(1.0, 2.0).unwrap();
        match validate_bounds(&w, &default_validation_grid()) {
            Err(Error::BoundsViolation { curvature, .. }) => assert!(curvature < 0.0),
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_empty_grid() {
        assert!(validate_bounds(&Weight::standard(), &[]).is_err());
    }

    #[test]
    fn bad_params_rejected() {
        assert!(Weight::gaussian(0.0).is_err());
        assert!(Weight::gaussian(f64::NAN).is_err());
        assert!(Weight::perturbed_gaussian(1.0, -0.1).is_err());
        assert!(Weight::scaled(-1.0, Weight::standard()).is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let w: Weight = serde_json::from_str(
            r#"{"family":"scaled","a":1.2,"inner":{"family":"perturbed_gaussian","alpha":3.0,"t":0.5}}"#,
        )
        .unwrap();
        assert_eq!(w, Weight::scaled(1.2, Weight::perturbed_gaussian(3.0, 0.5).unwrap()).unwrap());
        let back: Weight = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<Weight>(r#"{"family":"gaussian","alpha":1.0,"beta":2}"#).is_err());
    }

    #[test]
    fn builtin_families_validate_on_default_grid() {
        let grid = default_validation_grid();
        for w in [
            Weight::gaussian(0.5).unwrap(),
            Weight::gaussian(2.0 * PI).unwrap(),
            Weight::perturbed_gaussian(PI, 0.3).unwrap(),
            Weight::perturbed_gaussian(1.0, 0.99).unwrap(),
            Weight::scaled(0.8, Weight::perturbed_gaussian(PI, 1.0).unwrap()).unwrap(),
        ] {
            validate_bounds(&w, &grid).unwrap();
        }
    }

    proptest! {
        #[test]
        fn nested_scaling_collapses(a in 0.1f64..5.0, b in 0.1f64..5.0, alpha in 0.1f64..7.0,
                                    t in 0.0f64..1.0, x in -5.0f64..5.0, y in -5.0f64..5.0) {
            let inner = Weight::perturbed_gaussian(alpha, t).unwrap();
            let nested = Weight::scaled(a, Weight::scaled(b, inner.clone()).unwrap()).unwrap();
            let flat = Weight::scaled(a * b, inner).unwrap();
            let z = Point::new(x, y);
            let scale = flat.phi(z).abs().max(1.0);
            prop_assert!((nested.phi(z) - flat.phi(z)).abs() <= 1e-14 * scale);
            prop_assert!((nested.laplacian(z) - flat.laplacian(z)).abs() <= 1e-14 * flat.laplacian(z).abs().max(1.0));
        }

        #[test]
        fn gaussian_is_radial(alpha in 0.1f64..7.0, r in 0.0f64..6.0, th in 0.0f64..6.3, rot in 0.0f64..6.3) {
            let w = Weight::gaussian(alpha).unwrap();
            let z = Point::from_polar(r, th);
            let zr = crate::geometry::rotate(z, rot);
            prop_assert!((w.phi(z) - w.phi(zr)).abs() <= 1e-12 * w.phi(z).max(1.0));
        }

        #[test]
        fn legal_perturbations_validate(alpha in 0.2f64..7.0, frac in 0.0f64..0.95) {
            let w = Weight::perturbed_gaussian(alpha, frac * alpha).unwrap();
            prop_assert!(validate_bounds(&w, &square_grid(21, 5.0)).is_ok());
        }
    }
}
