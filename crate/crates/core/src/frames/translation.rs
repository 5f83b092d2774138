use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fockspace::gaussian_closed_form_coefficient;
use crate::geometry::Point;
use crate::weights::Weight;

#[derive(Clone, Debug, Serialize)]
pub struct TranslationReport {
    /// `max_z | |T_ζ f(z)| e^{-φ(z)} − |f(z−ζ)| e^{-φ(z−ζ)} |`.
    pub identity_error: f64,
    /// Largest deviation between `T_ζ(e^{-φ(λ)} K_λ)` and the translated kernel section,
    /// both weighted by `e^{-φ}`, over the grid and the sampled `λ`.
    pub covariance_error: f64,
    pub grid_points: usize,
    pub kernel_sections: usize,
}

/// For `φ = α|z|²/2`: `q(z, ζ) = α z conj(ζ) − α|ζ|²/2`.
fn q(alpha: f64, z: Point, zeta: Point) -> Complex64 {
    alpha * z * zeta.conj() - alpha * zeta.norm_sqr() / 2.0
}

/// `f(z) = ∑ a_k e_k(z)` in the closed-form Gaussian basis, by Horner's rule.
fn eval_series(alpha: f64, coeffs: &[Complex64], z: Point) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, a) in coeffs.iter().enumerate().rev() {
        acc = acc * z + a * gaussian_closed_form_coefficient(alpha, k);
    }
    acc
}

/// Checks the isometry `|T_ζ f| e^{-φ} = |f(· − ζ)| e^{-φ(· − ζ)}` and the kernel
/// covariance rule for a Gaussian weight, where `T_ζ f(z) = e^{q(z, ζ)} f(z − ζ)`.
///
/// The covariance rule is checked on up to 16 kernel sections centred at grid points.
pub fn gaussian_translation_check(
    w: &Weight,
    zeta: Point,
    coeffs: &[Complex64],
    grid: &[Point],
) -> Result<TranslationReport> {
    let alpha = w.gaussian_alpha().ok_or_else(|| {
        Error::InvalidParameter("translation check requires a Gaussian weight".into())
    })?;
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let phi = |z: Point| alpha * z.norm_sqr() / 2.0;

    let identity_error = grid
        .par_iter()
        .map(|&z| {
            let shifted = z - zeta;
            let f_shift = eval_series(alpha, coeffs, shifted);
            let lhs = (q(alpha, z, zeta).exp() * f_shift).norm() * (-phi(z)).exp();
            let rhs = f_shift.norm() * (-phi(shifted)).exp();
            (lhs - rhs).abs()
        })
        .reduce(|| 0.0, f64::max);

    let stride = grid.len().div_ceil(16);
    let lambdas: Vec<Point> = grid.iter().step_by(stride).cloned().collect();
    let c = alpha / PI;
    let covariance_error = grid
        .par_iter()
        .map(|&z| {
            lambdas
                .iter()
                .map(|&lam| {
                    // e^{-φ(z)} T_ζ(e^{-φ(λ)} K(·, λ))(z)
                    let lhs = c * (q(alpha, z, zeta) - phi(lam) + alpha * (z - zeta) * lam.conj() - phi(z)).exp();
                    // e^{-φ(z)} e^{i Im q(λ+ζ, ζ)} e^{-φ(λ+ζ)} K(z, λ+ζ)
                    let moved = lam + zeta;
                    let phase = Complex64::new(0.0, q(alpha, moved, zeta).im);
                    let rhs = c * (phase - phi(moved) + alpha * z * moved.conj() - phi(z)).exp();
                    (lhs - rhs).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);

    Ok(TranslationReport {
        identity_error,
        covariance_error,
        grid_points: grid.len(),
        kernel_sections: lambdas.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::disk_grid;
    use crate::random::{complex_gaussian_vector, seeded_rng};

    #[test]
    fn constant_function_unit_shift() {
        let w = Weight::standard();
        let one = [Complex64::new(1.0, 0.0)];
        let r = gaussian_translation_check(&w, Point::new(1.0, 0.0), &one, &[Point::new(1.0, 0.0)]).unwrap();
        assert!(r.identity_error < 1e-12);
        // both sides at z = 1 equal 1 for f ≡ 1 (e_0 = 1 when α = π)
        let lhs = (q(PI, Point::new(1.0, 0.0), Point::new(1.0, 0.0)).exp()).norm() * (-PI / 2.0).exp();
        assert!((lhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_shift_is_identity() {
        let mut rng = seeded_rng(2);
        let f: Vec<Complex64> = complex_gaussian_vector(&mut rng, 6).iter().cloned().collect();
        let r = gaussian_translation_check(&Weight::standard(), Point::new(0.0, 0.0), &f, &disk_grid(9, 3.0)).unwrap();
        assert_eq!(r.identity_error, 0.0);
        assert!(r.covariance_error < 1e-12);
    }

    #[test]
    fn random_degree_ten() {
        let mut rng = seeded_rng(3);
        let f: Vec<Complex64> = complex_gaussian_vector(&mut rng, 11).iter().cloned().collect();
        let r = gaussian_translation_check(&Weight::standard(), Point::new(0.7, 0.3), &f, &disk_grid(25, 3.0)).unwrap();
        assert!(r.identity_error <= 1e-10);
        assert!(r.covariance_error <= 1e-10);
    }

    #[test]
    fn rejects_non_gaussian() {
        let w = Weight::perturbed_gaussian(PI, 0.3).unwrap();
        assert!(gaussian_translation_check(&w, Point::new(0.1, 0.0), &[Complex64::new(1.0, 0.0)], &[Point::new(0.0, 0.0)]).is_err());
    }
}
