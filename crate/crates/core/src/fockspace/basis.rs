use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg::{householder_r, CMatrix};
use crate::quadrature::{build_quadrature, QuadratureKind, QuadratureRule};
use crate::weights::Weight;

/// Orthonormal basis `e_0, …, e_{N-1}` of the polynomials of degree `< N` in
/// `L²(e^{-2φ} dm)`.
///
/// `e_k = ∑_{j ≤ k} T[j, k]·m_j` where `m_j(z) = z^j / s_j` and
/// `s_j = sqrt(π j! / β^{j+1})` is the norm of `z^j` for the Gaussian weight of
/// curvature `β` (the reference curvature of the weight).
#[derive(Clone, Debug)]
pub struct OrthoBasis {
    weight: Weight,
    degree: usize,
    transform: CMatrix,
    diagonal: bool,
    triangular: bool,
    ln_scale: Vec<f64>,
    quad: QuadratureRule,
}

fn ln_factorial(j: usize) -> f64 {
    (1..=j).map(|i| (i as f64).ln()).sum()
}

/// Normalising coefficient of `z^k` in the closed-form orthonormal basis for `α|z|²/2`:
/// `sqrt(α^{k+1} / (π k!))`.
pub fn gaussian_closed_form_coefficient(alpha: f64, k: usize) -> f64 {
    (0.5 * ((k as f64 + 1.0) * alpha.ln() - PI.ln() - ln_factorial(k))).exp()
}

impl OrthoBasis {
    pub fn new(weight: &Weight, degree: usize) -> Result<Self> {
        let q = build_quadrature(weight, degree)?;
        orthonormal_basis(weight, degree, q)
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn transform(&self) -> &CMatrix {
        &self.transform
    }

    /// Per-degree conditioning scales `s_j`.
    pub fn scaling(&self) -> Vec<f64> {
        self.ln_scale.iter().map(|l| l.exp()).collect()
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quad
    }

    pub fn bulk_radius(&self) -> f64 {
        self.weight.bulk_radius(self.degree)
    }

    pub fn support_radius(&self) -> f64 {
        self.weight.support_radius(self.degree)
    }

    /// `m_j(z) e^{-φ(z)}` for `j < N`, evaluated through logarithms of the moduli.
    pub fn weighted_monomials(&self, z: Point) -> Vec<Complex64> {
        weighted_monomials(&self.weight, &self.ln_scale, z)
    }

    /// `ẽ_k(z) = e_k(z) e^{-φ(z)}` for `k < N`.
    pub fn eval_weighted(&self, z: Point) -> Vec<Complex64> {
        let m = self.weighted_monomials(z);
        self.apply_transform(&m)
    }

    fn apply_transform(&self, m: &[Complex64]) -> Vec<Complex64> {
        let n = self.degree;
        if self.diagonal {
            return (0..n).map(|k| m[k] * self.transform[(k, k)]).collect();
        }
        (0..n)
            .map(|k| {
                let col = self.transform.column(k);
                let top = if self.triangular { k + 1 } else { n };
                (0..top).map(|j| m[j] * col[j]).sum()
            })
            .collect()
    }

    /// Unweighted values `e_k(z)`.
    pub fn eval(&self, z: Point) -> Vec<Complex64> {
        let scale = self.weight.phi(z).exp();
        self.eval_weighted(z).into_iter().map(|v| v * scale).collect()
    }

    /// Weighted collocation matrix `M[j][k] = ẽ_k(points[j])`.
    pub fn weighted_collocation(&self, points: &[Point]) -> CMatrix {
        let rows: Vec<Vec<Complex64>> = points.par_iter().map(|&z| self.eval_weighted(z)).collect();
        CMatrix::from_fn(points.len(), self.degree, |i, k| rows[i][k])
    }

    /// `f(z) e^{-φ(z)}` for `f = ∑ a_k e_k`.
    pub fn eval_function_weighted(&self, coeffs: &DVector<Complex64>, z: Point) -> Complex64 {
        self.eval_weighted(z)
            .iter()
            .zip(coeffs.iter())
            .map(|(e, a)| e * a)
            .sum()
    }

    /// Gram matrix `⟨e_j, e_k⟩` under the basis' own quadrature.
    pub fn discrete_gram(&self) -> CMatrix {
        gram_under(self, &self.quad)
    }

    /// Same basis with the functions reordered: new `e_i` is old `e_{perm[i]}`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.degree;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation of the basis indices".into()));
        }
        // a permuted basis is no longer degree graded
        let mut out = self.clone();
        out.transform = CMatrix::from_fn(n, n, |j, i| self.transform[(j, perm[i])]);
        out.diagonal = false;
        out.triangular = false;
        Ok(out)
    }
}

fn weighted_monomials(w: &Weight, ln_scale: &[f64], z: Point) -> Vec<Complex64> {
    let n = ln_scale.len();
    let phi = w.phi(z);
    let r = z.norm();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if r == 0.0 {
        out[0] = Complex64::new((-ln_scale[0] - phi).exp(), 0.0);
        return out;
    }
    let lr = r.ln();
    let theta = z.arg();
    for (j, slot) in out.iter_mut().enumerate() {
        let ln_mag = j as f64 * lr - ln_scale[j] - phi;
        *slot = Complex64::from_polar(ln_mag.exp(), j as f64 * theta);
    }
    out
}

pub(crate) fn gram_under(basis: &OrthoBasis, q: &QuadratureRule) -> CMatrix {
    let n = basis.degree;
    let mut g = CMatrix::zeros(n, n);
    for (&z, &w) in q.nodes.iter().zip(&q.weights) {
        let e = basis.eval_weighted(z);
        for j in 0..n {
            let ej = e[j] * w;
            for k in 0..n {
                g[(j, k)] += ej * e[k].conj();
            }
        }
    }
    g
}

/// Orthonormalises `1, z, …, z^{N-1}` against the discrete measure of `q`.
///
/// For radial weights on a polar rule the angular sums are evaluated exactly, which makes
/// the discrete Gram matrix diagonal; otherwise the weighted monomial collocation on the
/// quadrature nodes is reduced by Householder QR and the basis is `m R^{-1}`.
pub fn orthonormal_basis(w: &Weight, n: usize, q: QuadratureRule) -> Result<OrthoBasis> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree N must be ≥ 1".into()));
    }
    if q.resolved_degree < 2 * (n - 1) {
        return Err(Error::InvalidParameter(format!(
            "quadrature resolves degree {} but N = {n} needs {}",
            q.resolved_degree,
            2 * (n - 1)
        )));
    }
    let beta = w.reference_alpha();
    let ln_scale: Vec<f64> = (0..n)
        .map(|j| 0.5 * (PI.ln() + ln_factorial(j) - (j as f64 + 1.0) * beta.ln()))
        .collect();

    let radial_layout = match (&q.polar, q.kind) {
        (Some(p), QuadratureKind::RadialPolar) if w.is_radial() && p.center == Point::new(0.0, 0.0) => {
            Some(p)
        }
        _ => None,
    };

    let (transform, diagonal) = if let Some(layout) = radial_layout {
        let mut t = CMatrix::zeros(n, n);
        for k in 0..n {
            let mut g = 0.0;
            for (&r, &wr) in layout.radii.iter().zip(&layout.radial_weights) {
                let v = weighted_monomials(w, &ln_scale, Point::new(r, 0.0))[k].re;
                g += wr * v * v;
            }
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Singular(format!("diagonal Gram entry {k} is {g}")));
            }
            t[(k, k)] = Complex64::new(1.0 / g.sqrt(), 0.0);
        }
        (t, true)
    } else {
        let rows: Vec<Vec<Complex64>> = q
            .nodes
            .par_iter()
            .zip(q.weights.par_iter())
            .map(|(&z, &wt)| {
                let s = wt.sqrt();
                weighted_monomials(w, &ln_scale, z).into_iter().map(|v| v * s).collect()
            })
            .collect();
        let v = CMatrix::from_fn(q.nodes.len(), n, |i, j| rows[i][j]);
        let r = householder_r(v);
        let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].re).collect();
        let top = diag.iter().cloned().fold(0.0, f64::max);
        let low = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(low > 1e-12 * top) {
            return Err(Error::Singular(format!(
                "discrete Gram is numerically singular (R diagonal range {low:e}..{top:e}); N too large for the quadrature"
            )));
        }
        (invert_upper(&r), false)
    };

    Ok(OrthoBasis {
        weight: w.clone(),
        degree: n,
        transform,
        diagonal,
        triangular: true,
        ln_scale,
        quad: q,
    })
}

fn invert_upper(r: &CMatrix) -> CMatrix {
    let n = r.nrows();
    let mut inv = CMatrix::zeros(n, n);
    for col in 0..n {
        inv[(col, col)] = Complex64::new(1.0, 0.0) / r[(col, col)];
        for i in (0..col).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for k in (i + 1)..=col {
                s += r[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = -s / r[(i, i)];
        }
    }
    inv
}
