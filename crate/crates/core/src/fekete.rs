//! Approximate Fekete configurations for the weighted determinant
//! `Δ(x_1, …, x_N) = |det ẽ_k(x_j)|` and their Lagrange functions.
//!
//! Extraction runs in two stages. A greedy column-pivoted QR of the transposed
//! collocation matrix picks `N` candidate-grid points. [`refine`] then alternates
//! exchange moves, which relocate a point to any verification-grid node where its
//! Lagrange function exceeds one in modulus, with a cyclic compass search. Moving
//! `x_j` to `z` multiplies `Δ` by `|l_j(z)|`, so both stages only ever raise `Δ`,
//! and `sup |l_j| ≤ 1` on the verification grid certifies a grid-level maximizer.

use nalgebra::LU;
use nalgebra::{Dyn, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fockspace::OrthoBasis;
use crate::geometry::{hex_disk_grid, Point};
use crate::linalg::{greedy_pivoted_columns, log_abs_det, CMatrix};
use crate::pointsets::{Generator, PointSet};
use crate::weights::Weight;

const MOVE_TOL: f64 = 1e-13;
const STEP_FLOOR: f64 = 1e-6;

/// Weighted collocation matrix `M[j][k] = ẽ_k(x_j)`.
pub fn collocation_matrix(basis: &OrthoBasis, points: &[Point]) -> CMatrix {
    basis.weighted_collocation(points)
}

/// Hexagonal candidate grid on a closed disk.
#[derive(Clone, Debug, Serialize)]
pub struct CandidateGrid {
    pub points: Vec<Point>,
    pub spacing: f64,
    pub radius: f64,
}

impl CandidateGrid {
    pub fn hex(radius: f64, spacing: f64) -> Result<Self> {
        if !(radius > 0.0 && spacing > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "candidate grid needs radius, spacing > 0 (got {radius}, {spacing})"
            )));
        }
        Ok(CandidateGrid {
            points: hex_disk_grid(radius, spacing),
            spacing,
            radius,
        })
    }

    /// Default grid for a basis: radius `sqrt(N/(2m)) + 1.5`, spacing `radius/(3√N)`,
    /// shrunk until the grid holds at least `4N` points.
    pub fn for_basis(basis: &OrthoBasis) -> Result<Self> {
        let n = basis.degree();
        let radius = basis.support_radius() + 1.5;
        let mut spacing = radius / (3.0 * (n as f64).sqrt());
        loop {
            let g = Self::hex(radius, spacing)?;
            if g.points.len() >= 4 * n {
                return Ok(g);
            }
            spacing *= 0.8;
        }
    }

    /// Same disk at half the spacing.
    pub fn verification(&self) -> Self {
        CandidateGrid {
            points: hex_disk_grid(self.radius, self.spacing / 2.0),
            spacing: self.spacing / 2.0,
            radius: self.radius,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FeketeResult {
    points: PointSet,
    basis: Arc<OrthoBasis>,
    log_abs_det: f64,
    grid: CandidateGrid,
    refined: bool,
    accepted_moves: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisDescriptor {
    pub weight: Weight,
    pub degree: usize,
}

/// Serializable view of a [`FeketeResult`].
#[derive(Clone, Debug, Serialize)]
pub struct FeketeSummary {
    pub points: Vec<Point>,
    pub log_abs_det: f64,
    pub sup_norm_residual: f64,
    pub separation: f64,
    pub grid_spacing: f64,
    pub grid_radius: f64,
    pub refined: bool,
    pub accepted_moves: usize,
    pub basis: BasisDescriptor,
}

impl FeketeResult {
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn basis(&self) -> &OrthoBasis {
        &self.basis
    }

    pub fn log_abs_det(&self) -> f64 {
        self.log_abs_det
    }

    pub fn grid_spacing(&self) -> f64 {
        self.grid.spacing
    }

    pub fn grid(&self) -> &CandidateGrid {
        &self.grid
    }

    pub fn refined(&self) -> bool {
        self.refined
    }

    pub fn accepted_moves(&self) -> usize {
        self.accepted_moves
    }

    pub fn collocation(&self) -> CMatrix {
        collocation_matrix(&self.basis, self.points.points())
    }

    pub fn lagrange(&self) -> Result<Lagrange> {
        Lagrange::new(&self.basis, self.points.points())
    }

    /// Minimum pairwise distance; `∞` for a single point.
    pub fn separation(&self) -> f64 {
        self.points.separation().unwrap_or(f64::INFINITY)
    }

    /// `max_z max_λ |l_λ(z)|` over the verification grid.
    pub fn sup_norm_residual(&self) -> Result<f64> {
        let v = self.grid.verification();
        self.lagrange()?.sup_norm(&self.basis, &v.points)
    }

    pub fn summary(&self) -> Result<FeketeSummary> {
        Ok(FeketeSummary {
            points: self.points.points().to_vec(),
            log_abs_det: self.log_abs_det,
            sup_norm_residual: self.sup_norm_residual()?,
            separation: self.separation(),
            grid_spacing: self.grid.spacing,
            grid_radius: self.grid.radius,
            refined: self.refined,
            accepted_moves: self.accepted_moves,
            basis: BasisDescriptor {
                weight: self.basis.weight().clone(),
                degree: self.basis.degree(),
            },
        })
    }
}

/// LU factors of the transposed collocation matrix at a configuration.
pub struct Lagrange {
    lu: LU<Complex64, Dyn, Dyn>,
    n: usize,
}

impl Lagrange {
    pub fn new(basis: &OrthoBasis, points: &[Point]) -> Result<Self> {
        let n = basis.degree();
        if points.len() != n {
            return Err(Error::InvalidParameter(format!(
                "Lagrange system needs {n} points, got {}",
                points.len()
            )));
        }
        let c = collocation_matrix(basis, points);
        let lu = c.transpose().lu();
        if !lu.is_invertible() {
            return Err(Error::Singular("collocation matrix is singular".into()));
        }
        let u = lu.u();
        let diag: Vec<f64> = (0..n).map(|i| u[(i, i)].norm()).collect();
        let top = diag.iter().cloned().fold(0.0, f64::max);
        if diag.iter().any(|d| !(*d > 1e-14 * top)) {
            return Err(Error::Singular("collocation matrix is numerically singular".into()));
        }
        Ok(Lagrange { lu, n })
    }

    /// `(l_λ(z))_λ` from the weighted basis vector `ẽ(z)`.
    pub fn from_weighted(&self, e: Vec<Complex64>) -> Vec<Complex64> {
        let rhs = DVector::from_vec(e);
        let sol = self.lu.solve(&rhs).expect("factorization checked invertible");
        sol.iter().cloned().collect()
    }

    pub fn eval(&self, basis: &OrthoBasis, z: Point) -> Vec<Complex64> {
        self.from_weighted(basis.eval_weighted(z))
    }

    /// Matrix `L[i][j] = l_j(z_i)`.
    pub fn eval_many(&self, basis: &OrthoBasis, zs: &[Point]) -> CMatrix {
        let e = collocation_matrix(basis, zs);
        let sol = self
            .lu
            .solve(&e.transpose())
            .expect("factorization checked invertible");
        sol.transpose()
    }

    pub fn sup_norm(&self, basis: &OrthoBasis, zs: &[Point]) -> Result<f64> {
        if zs.is_empty() {
            return Err(Error::InvalidParameter("empty verification grid".into()));
        }
        let l = self.eval_many(basis, zs);
        Ok(l.iter().map(|c| c.norm()).fold(0.0, f64::max))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// `(l_λ(z))_λ` at the configuration of `f`.
pub fn lagrange_eval(f: &FeketeResult, z: Point) -> Result<Vec<Complex64>> {
    Ok(f.lagrange()?.eval(&f.basis, z))
}

fn fekete_pointset(points: Vec<Point>, radius: f64, degree: usize) -> PointSet {
    PointSet::new_degenerate(points, radius).with_generator(Generator::Fekete { degree })
}

/// Greedy volume maximisation over the candidate grid.
pub fn approx_fekete(basis: impl Into<Arc<OrthoBasis>>, grid: &CandidateGrid) -> Result<FeketeResult> {
    let basis = basis.into();
    let n = basis.degree();
    if grid.points.len() < 4 * n {
        return Err(Error::InvalidParameter(format!(
            "candidate grid has {} points, at least 4N = {} required",
            grid.points.len(),
            4 * n
        )));
    }
    let m = collocation_matrix(&basis, &grid.points).transpose();
    let (idx, _) = greedy_pivoted_columns(m, n)?;
    let points: Vec<Point> = idx.iter().map(|&i| grid.points[i]).collect();
    let lad = log_abs_det(&collocation_matrix(&basis, &points));
    Ok(FeketeResult {
        points: fekete_pointset(points, grid.radius, n),
        basis,
        log_abs_det: lad,
        grid: grid.clone(),
        refined: false,
        accepted_moves: 0,
    })
}

/// Inverse of the transposed collocation matrix, kept current under single-point moves.
struct MovingInverse {
    inv: CMatrix,
}

impl MovingInverse {
    fn new(basis: &OrthoBasis, pts: &[Point]) -> Result<Self> {
        Lagrange::new(basis, pts)?;
        let inv = collocation_matrix(basis, pts)
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::Singular("collocation matrix is singular".into()))?;
        Ok(MovingInverse { inv })
    }

    fn lagrange(&self, e: &[Complex64]) -> DVector<Complex64> {
        &self.inv * DVector::from_column_slice(e)
    }

    /// Rank-one update after replacing point `j` by a point with Lagrange vector `l`.
    /// Returns the row factor applied, `(l - e_j) / l_j`, for updating dependent tables.
    fn replace(&mut self, j: usize, l: &DVector<Complex64>) -> DVector<Complex64> {
        let mut u = l.clone();
        u[j] -= Complex64::new(1.0, 0.0);
        u /= l[j];
        let row = self.inv.row(j).clone_owned();
        self.inv -= &u * row;
        u
    }
}

/// Local ascent of `log Δ`: up to `steps` sweeps of exchange moves over the
/// verification grid followed by a compass search per point (initial step the grid
/// spacing, halved on failure down to `1e-6`). Stops early once a sweep moves nothing.
pub fn refine(f: &FeketeResult, steps: usize) -> Result<FeketeResult> {
    let basis = f.basis.clone();
    let n = basis.degree();
    let mut pts = f.points.points().to_vec();
    let verify = f.grid.verification();
    let e_verify_t = collocation_matrix(&basis, &verify.points).transpose();
    let mut accepted = 0usize;

    for _ in 0..steps {
        let mut moved = false;
        let mut state = MovingInverse::new(&basis, &pts)?;

        let mut table = &state.inv * &e_verify_t;
        for j in 0..n {
            let (best_i, best) = (0..verify.points.len())
                .map(|i| (i, table[(j, i)].norm()))
                .fold((usize::MAX, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best > 1.0 + MOVE_TOL {
                let l = table.column(best_i).clone_owned();
                let u = state.replace(j, &l);
                let row = table.row(j).clone_owned();
                table -= &u * row;
                pts[j] = verify.points[best_i];
                accepted += 1;
                moved = true;
            }
        }

        for j in 0..n {
            let mut step = f.grid.spacing;
            while step >= STEP_FLOOR {
                let mut improved = false;
                for d in [
                    Point::new(step, 0.0),
                    Point::new(-step, 0.0),
                    Point::new(0.0, step),
                    Point::new(0.0, -step),
                ] {
                    let z = pts[j] + d;
                    let l = state.lagrange(&basis.eval_weighted(z));
                    if l[j].norm() > 1.0 + MOVE_TOL {
                        state.replace(j, &l);
                        pts[j] = z;
                        accepted += 1;
                        moved = true;
                        improved = true;
                        break;
                    }
                }
                if !improved {
                    step /= 2.0;
                }
            }
        }

        if !moved {
            break;
        }
    }

    let lad = log_abs_det(&collocation_matrix(&basis, &pts));
    let (pts, lad) = if lad >= f.log_abs_det {
        (pts, lad)
    } else {
        (f.points.points().to_vec(), f.log_abs_det)
    };
    let radius = f.points.clip_radius().max(crate::geometry::max_norm(&pts));
    Ok(FeketeResult {
        points: fekete_pointset(pts, radius, n),
        basis,
        log_abs_det: lad,
        grid: f.grid.clone(),
        refined: true,
        accepted_moves: accepted,
    })
}

pub const DEFAULT_REFINE_STEPS: usize = 100;

/// Greedy selection on the default candidate grid followed by default refinement.
pub fn fekete(basis: impl Into<Arc<OrthoBasis>>) -> Result<FeketeResult> {
    let basis = basis.into();
    let grid = CandidateGrid::for_basis(&basis)?;
    let greedy = approx_fekete(basis, &grid)?;
    refine(&greedy, DEFAULT_REFINE_STEPS)
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendRow {
    #[serde(rename = "N")]
    pub n: usize,
    /// `∞` (serialized as `null`) when `N = 1`.
    pub separation: f64,
    pub sup_norm_residual: f64,
    pub log_abs_det: f64,
    pub bulk_radius: f64,
}

/// Refined Fekete sets for each degree in `degrees` (strictly increasing).
pub fn fekete_separation_trend(w: &Weight, degrees: &[usize]) -> Result<Vec<TrendRow>> {
    if degrees.is_empty() || degrees.windows(2).any(|p| p[0] >= p[1]) || degrees[0] == 0 {
        return Err(Error::InvalidParameter("degree list must be positive and increasing".into()));
    }
    degrees
        .par_iter()
        .map(|&n| {
            let f = fekete(OrthoBasis::new(w, n)?)?;
            Ok(TrendRow {
                n,
                separation: f.separation(),
                sup_norm_residual: f.sup_norm_residual()?,
                log_abs_det: f.log_abs_det,
                bulk_radius: w.bulk_radius(n),
            })
        })
        .collect()
}
