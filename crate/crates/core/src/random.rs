//! Seeded randomness for probes; every randomized routine takes an explicit seed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type ProbeRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> ProbeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian sample (independent real and imaginary parts).
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn complex_gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn complex_gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    // column-major draw order
    let mut m = DMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Random coefficient vector normalised to unit Euclidean norm.
pub fn unit_coefficients<R: Rng>(rng: &mut R, n: usize) -> DVector<Complex64> {
    let v = complex_gaussian_vector(rng, n);
    let nrm = v.norm();
    v / Complex64::new(nrm, 0.0)
}
