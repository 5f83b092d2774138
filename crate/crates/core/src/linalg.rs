//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Euclidean norm of a slice with scaling against under/overflow.
pub fn scaled_norm(v: impl Iterator<Item = Complex64> + Clone) -> f64 {
    let top = v.clone().map(|c| c.norm()).fold(0.0, f64::max);
    if top == 0.0 || !top.is_finite() {
        return top;
    }
    let s: f64 = v.map(|c| (c / top).norm_sqr()).sum();
    top * s.sqrt()
}

/// Householder reduction of a tall matrix; returns the `n × n` factor `R` of `A = QR`
/// with a real non-negative diagonal.
pub fn householder_r(mut a: CMatrix) -> CMatrix {
    let (rows, cols) = a.shape();
    let n = cols.min(rows);
    for k in 0..n {
        apply_householder_step(&mut a, k, k);
    }
    let mut r = CMatrix::zeros(cols, cols);
    for j in 0..cols {
        for i in 0..=j.min(rows - 1) {
            r[(i, j)] = a[(i, j)];
        }
    }
    // unimodular row scaling makes the diagonal real and non-negative
    for i in 0..n {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            let phase = d.conj() / d.norm();
            for j in i..cols {
                r[(i, j)] *= phase;
            }
        }
    }
    r
}

/// Reflects column `col` of `a` below row `k` onto `e_k` and applies the reflector
/// to all columns right of `col`.
fn apply_householder_step(a: &mut CMatrix, k: usize, col: usize) {
    let rows = a.nrows();
    let alpha = scaled_norm((k..rows).map(|i| a[(i, col)]));
    if alpha == 0.0 {
        return;
    }
    let x0 = a[(k, col)];
    let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
    let mut v: Vec<Complex64> = (k..rows).map(|i| a[(i, col)]).collect();
    v[0] += phase * alpha;
    let vnorm = scaled_norm(v.iter().cloned());
    for c in v.iter_mut() {
        *c /= vnorm;
    }
    for j in col..a.ncols() {
        let mut dot = Complex64::new(0.0, 0.0);
        {
            let column = a.column(j);
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * column[k + i];
            }
        }
        let two_dot = dot * 2.0;
        let mut column = a.column_mut(j);
        for (i, vi) in v.iter().enumerate() {
            column[k + i] -= vi * two_dot;
        }
    }
}

/// Greedy column selection by pivoted Householder QR.
///
/// At step `k` the column with the largest residual norm (orthogonal to the span of the
/// columns already chosen) is selected; norms within a relative `1e-12` of the best
/// count as ties, which go to the lowest original index. Returns the chosen
/// column indices and the residual norms at selection (the moduli of `R`'s diagonal).
/// Residuals below `1e-13` of the largest column norm count as zero.
pub fn greedy_pivoted_columns(mut a: CMatrix, count: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    let (rows, cols) = a.shape();
    if count > rows.min(cols) {
        return Err(Error::InvalidParameter(format!(
            "cannot select {count} pivots from a {rows}×{cols} matrix"
        )));
    }
    // perm[c] = original index of the column currently stored at position c
    let mut perm: Vec<usize> = (0..cols).collect();
    let mut chosen = Vec::with_capacity(count);
    let mut pivots = Vec::with_capacity(count);
    let scale = (0..cols)
        .map(|c| scaled_norm((0..rows).map(|i| a[(i, c)])))
        .fold(0.0, f64::max);
    for k in 0..count {
        let mut best = (f64::NEG_INFINITY, usize::MAX, usize::MAX);
        for c in k..cols {
            let nrm = scaled_norm((k..rows).map(|i| a[(i, c)]));
            let tie = (nrm - best.0).abs() <= 1e-12 * best.0.abs();
            if (nrm > best.0 && !tie) || (tie && perm[c] < best.2) {
                best = (nrm, c, perm[c]);
            }
        }
        let (nrm, c, orig) = best;
        if !(nrm > 1e-13 * scale) || !nrm.is_finite() {
            return Err(Error::Singular(format!(
                "only {k} nonzero pivots found, {count} required"
            )));
        }
        chosen.push(orig);
        pivots.push(nrm);
        a.swap_columns(k, c);
        perm.swap(k, c);
        apply_householder_step(&mut a, k, k);
    }
    Ok((chosen, pivots))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// `ln |det M|` via LU; `-∞` for an exactly singular matrix.
pub fn log_abs_det(m: &CMatrix) -> f64 {
    let lu = m.clone().lu();
    let u = lu.u();
    (0..u.nrows()).map(|i| u[(i, i)].norm().ln()).sum()
}
