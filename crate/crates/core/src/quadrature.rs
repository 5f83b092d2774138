//! Discretizations of the measure `e^{-2φ} dm` and of disks and square cells.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::weights::Weight;

/// Relative tail mass allowed beyond the extent of a rule.
const TAIL_TOLERANCE: f64 = 1e-16;
/// Hard cap on the extent search.
pub const EXTENT_CAP: f64 = 200.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels of `p` nodes.
pub fn composite_gauss_legendre(a: f64, b: f64, panels: usize, p: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(p);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * p);
    let mut weights = Vec::with_capacity(panels * p);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + (xi + 1.0) * h / 2.0);
            weights.push(wi * h / 2.0);
        }
    }
    (nodes, weights)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    RadialPolar,
    TensorSquare,
}

/// Radial × uniform angular structure of a polar rule.
///
/// Node `i * n_theta + j` sits at `radii[i]·e^{2πij/n_theta}` with weight
/// `radial_weights[i] / n_theta`, where `radial_weights[i]` already contains
/// the `2π r dr` factor.
#[derive(Clone, Debug)]
pub struct PolarLayout {
    pub center: Point,
    pub radii: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub n_theta: usize,
}

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
    /// Outer radius (polar) or half side (tensor).
    pub extent: f64,
    /// Highest total degree `j + k` for which `z^j conj(z)^k` moments are resolved.
    pub resolved_degree: usize,
    pub polar: Option<PolarLayout>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∑ w_i f(z_i)`.
    pub fn integrate<F: Fn(Point) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| w * f(z)).sum()
    }

    /// Polar rule on the disk `B_radius(center)` (plain Lebesgue measure).
    pub fn disk(center: Point, radius: f64, panel_width: f64, p: usize, n_theta: usize) -> Self {
        if radius <= 0.0 {
            return QuadratureRule {
                nodes: Vec::new(),
                weights: Vec::new(),
                kind: QuadratureKind::RadialPolar,
                extent: 0.0,
                resolved_degree: 0,
                polar: None,
            };
        }
        let panels = ((radius / panel_width).ceil() as usize).max(1);
        polar_rule(center, radius, panels, p, n_theta)
    }

    /// Default disk resolution used for Bergman masses and local integrals.
    pub fn disk_default(center: Point, radius: f64) -> Self {
        let n_theta = ((40.0 * radius).ceil() as usize).max(64);
        Self::disk(center, radius, 0.5, 12, n_theta)
    }

    /// `p × p` Gauss–Legendre rule on the axis-parallel square of side `side` centred at `center`.
    pub fn square_cell(center: Point, side: f64, p: usize) -> Self {
        let half = side / 2.0;
        let (x, w) = composite_gauss_legendre(-half, half, 1, p);
        let mut nodes = Vec::with_capacity(p * p);
        let mut weights = Vec::with_capacity(p * p);
        for (yj, wj) in x.iter().zip(&w) {
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(center + Point::new(*xi, *yj));
                weights.push(wi * wj);
            }
        }
        QuadratureRule {
            nodes,
            weights,
            kind: QuadratureKind::TensorSquare,
            extent: half,
            resolved_degree: 2 * p - 1,
            polar: None,
        }
    }
}

fn polar_rule(center: Point, radius: f64, panels: usize, p: usize, n_theta: usize) -> QuadratureRule {
    let (r, wr) = composite_gauss_legendre(0.0, radius, panels, p);
    let radial_weights: Vec<f64> = r.iter().zip(&wr).map(|(ri, wi)| 2.0 * PI * ri * wi).collect();
    let mut nodes = Vec::with_capacity(r.len() * n_theta);
    let mut weights = Vec::with_capacity(r.len() * n_theta);
    let unit: Vec<Point> = (0..n_theta)
        .map(|j| Point::from_polar(1.0, 2.0 * PI * j as f64 / n_theta as f64))
        .collect();
    for (ri, wi) in r.iter().zip(&radial_weights) {
        for u in &unit {
            nodes.push(center + u * ri);
            weights.push(wi / n_theta as f64);
        }
    }
    QuadratureRule {
        nodes,
        weights,
        kind: QuadratureKind::RadialPolar,
        extent: radius,
        resolved_degree: n_theta.saturating_sub(1),
        polar: Some(PolarLayout {
            center,
            radii: r,
            radial_weights,
            n_theta,
        }),
    }
}

/// `ln Q(n, x)`, the regularized upper incomplete gamma function for integer `n ≥ 1`.
fn ln_upper_gamma_q(n: usize, x: f64) -> f64 {
    // Q(n, x) = e^{-x} ∑_{j<n} x^j / j!
    let mut terms = Vec::with_capacity(n);
    let mut ln_term = 0.0;
    let lx = x.ln();
    for j in 0..n {
        if j > 0 {
            ln_term += lx - (j as f64).ln();
        }
        terms.push(ln_term);
    }
    let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    -x + top + s.ln()
}

/// Smallest extent `L` (on a 0.05 lattice) such that `|z|^{2(N-1)} e^{-2φ}` has relative
/// mass below `1e-16` outside `B_L(0)`, bounded through the Gaussian envelope of `φ`.
pub fn extent_for(w: &Weight, n: usize) -> Result<f64> {
    let (beta, c) = w.radial_envelope();
    if !(beta > 0.0) {
        return Err(Error::ExtentCap { cap: EXTENT_CAP });
    }
    let target = TAIL_TOLERANCE.ln() - 4.0 * c;
    let mut l: f64 = 1.0;
    while l <= EXTENT_CAP {
        if ln_upper_gamma_q(n, beta * l * l) < target {
            return Ok(l);
        }
        l += 0.05;
    }
    Err(Error::ExtentCap { cap: EXTENT_CAP })
}

/// Quadrature rule for the degree-`N` model of `w`.
pub fn build_quadrature(w: &Weight, n: usize) -> Result<QuadratureRule> {
    build_quadrature_refined(w, n, 1)
}

/// As [`build_quadrature`] with `refine` times as many nodes per radial/axial panel.
pub fn build_quadrature_refined(w: &Weight, n: usize, refine: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree N must be ≥ 1".into()));
    }
    if refine == 0 {
        return Err(Error::InvalidParameter("refinement factor must be ≥ 1".into()));
    }
    w.check_params()?;
    let extent = extent_for(w, n)?;
    let (beta, _) = w.radial_envelope();
    let panel = 0.75 / beta.sqrt();
    let panels = (extent / panel).ceil() as usize;
    if w.is_radial() {
        // uniform angles integrate e^{i(j-k)θ} exactly for |j-k| < n_theta
        let n_theta = (2 * n + 2) * refine;
        let mut rule = polar_rule(Point::new(0.0, 0.0), extent, panels, 16 * refine, n_theta);
        rule.resolved_degree = n_theta - 1;
        Ok(rule)
    } else {
        let (x, wx) = composite_gauss_legendre(-extent, extent, 2 * panels, 12 * refine);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (yj, wj) in x.iter().zip(&wx) {
            for (xi, wi) in x.iter().zip(&wx) {
                let z = Point::new(*xi, *yj);
                if z.norm() <= extent {
                    nodes.push(z);
                    weights.push(wi * wj);
                }
            }
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            kind: QuadratureKind::TensorSquare,
            extent,
            resolved_degree: 2 * (n - 1),
            polar: None,
        })
    }
}
