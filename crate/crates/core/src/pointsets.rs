//! Point configurations, separation statistics, weighted Beurling densities
//! and the deformations used by the strictness experiments.
//!
//! Balls are closed everywhere. Densities are finite-scale estimates: the
//! asymptotic `lim sup`/`lim inf` over radii is replaced by the max/min over
//! the supplied `(r, center)` family.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::fockspace::{bergman_mass, KernelEvaluator};
use crate::geometry::{max_norm, Point};
use crate::quadrature::QuadratureRule;
use crate::weights::Weight;

const BALL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Lattice { a: f64, b: f64 },
    Fekete { degree: usize },
    /// Image of another configuration under `z ↦ A z` (row-major 2×2 real matrix).
    Linear { matrix: [[f64; 2]; 2], source: Box<Generator> },
    Explicit,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointSet {
    points: Vec<Point>,
    generator: Option<Generator>,
    clip_radius: f64,
    degenerate: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DensityRecord {
    pub r: f64,
    pub center: Point,
    pub count: usize,
    pub mass: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityEstimate {
    /// Smallest ratio over the family (estimate of the lower density).
    pub d_minus: f64,
    /// Largest ratio over the family (estimate of the upper density).
    pub d_plus: f64,
    pub records: Vec<DensityRecord>,
}

impl PointSet {
    /// Set generated inside the closed disk of radius `clip_radius`; rejects exact duplicates.
    pub fn new(points: Vec<Point>, clip_radius: f64) -> Result<Self> {
        if let Some(dup) = first_duplicate(&points) {
            return Err(Error::Degenerate(format!("duplicate point ({}, {})", dup.re, dup.im)));
        }
        Ok(PointSet {
            points,
            generator: Some(Generator::Explicit),
            clip_radius,
            degenerate: false,
        })
    }

    /// Set that is allowed to contain coincident points.
    pub fn new_degenerate(points: Vec<Point>, clip_radius: f64) -> Self {
        PointSet {
            points,
            generator: Some(Generator::Explicit),
            clip_radius,
            degenerate: true,
        }
    }

    /// Explicit points; the clip radius is the largest point modulus.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        let clip = max_norm(&points);
        Self::new(points, clip)
    }

    pub fn with_generator(mut self, generator: Generator) -> Self {
        self.generator = Some(generator);
        self
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn clip_radius(&self) -> f64 {
        self.clip_radius
    }

    pub fn generator(&self) -> Option<&Generator> {
        self.generator.as_ref()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Points inside the closed disk `B_radius(0)`, keeping the order.
    pub fn restricted_to_disk(&self, radius: f64) -> Vec<Point> {
        self.points
            .iter()
            .cloned()
            .filter(|z| z.norm() <= radius * (1.0 + BALL_TOL))
            .collect()
    }

    /// `#(S ∩ closed B_r(center))`.
    pub fn count_in_ball(&self, center: Point, r: f64) -> usize {
        let lim = r * (1.0 + BALL_TOL) + BALL_TOL;
        self.points.iter().filter(|z| (**z - center).norm() <= lim).count()
    }

    /// Minimum pairwise distance.
    pub fn separation(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::Degenerate("separation needs at least two points".into()));
        }
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                if pts[j].re - pts[i].re >= best {
                    break;
                }
                best = best.min((pts[j] - pts[i]).norm());
            }
        }
        Ok(best)
    }

    /// `max_c #(S ∩ closed B_1(c))` over the points and the midpoints of pairs closer than 2.
    pub fn relative_separation(&self) -> usize {
        if self.points.is_empty() {
            return 0;
        }
        let hash = SpatialHash::new(&self.points, 1.0);
        let mut best = 0;
        for (i, &p) in self.points.iter().enumerate() {
            best = best.max(hash.count_within(&self.points, p, 1.0));
            for j in hash.neighbours(p, 2.0) {
                if j <= i {
                    continue;
                }
                let q = self.points[j];
                if (p - q).norm() < 2.0 {
                    best = best.max(hash.count_within(&self.points, (p + q) / 2.0, 1.0));
                }
            }
        }
        best
    }

    /// `a·S`.
    pub fn dilate(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("dilation factor must be > 0, got {a}")));
        }
        self.linear_map([[a, 0.0], [0.0, a]])
    }

    /// Image under the real linear map `(x, y) ↦ A (x, y)`.
    ///
    /// The clip radius becomes `σ_min(A)·R`, the largest disk covered by the image of
    /// the generating disk.
    pub fn linear_map(&self, a: [[f64; 2]; 2]) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let fro2 = a.iter().flatten().map(|v| v * v).sum::<f64>();
        if !(det.abs() > 1e-14 * fro2) || !det.is_finite() {
            return Err(Error::InvalidParameter(format!("singular linear map (det = {det})")));
        }
        // singular values of a 2×2 matrix from its Frobenius norm and determinant
        let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
        let sigma_min = ((fro2 - disc) / 2.0).max(0.0).sqrt();
        let points = self
            .points
            .iter()
            .map(|z| Point::new(a[0][0] * z.re + a[0][1] * z.im, a[1][0] * z.re + a[1][1] * z.im))
            .collect();
        let source = self.generator.clone().unwrap_or(Generator::Explicit);
        Ok(PointSet {
            points,
            generator: Some(Generator::Linear {
                matrix: a,
                source: Box::new(source),
            }),
            clip_radius: self.clip_radius * sigma_min,
            degenerate: self.degenerate,
        })
    }

    fn check_balls(&self, radii: &[f64], centers: &[Point]) -> Result<()> {
        if radii.is_empty() || centers.is_empty() {
            return Err(Error::InvalidParameter("empty radius or center family".into()));
        }
        for &r in radii {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("radius must be > 0, got {r}")));
            }
            for &c in centers {
                if c.norm() + r > self.clip_radius * (1.0 + BALL_TOL) {
                    return Err(Error::RegionEscape {
                        center: c,
                        radius: r,
                        clip: self.clip_radius,
                    });
                }
            }
        }
        Ok(())
    }

    /// Finite-scale weighted Beurling densities: `#(S ∩ B_r(z)) / ∫_{B_r(z)} K̃(w, w) dm(w)`.
    pub fn beurling_density(
        &self,
        k: &KernelEvaluator,
        radii: &[f64],
        centers: &[Point],
    ) -> Result<DensityEstimate> {
        self.check_balls(radii, centers)?;
        let mut records = Vec::new();
        for &r in radii {
            for &c in centers {
                let mass = bergman_mass(k, c, r)?;
                let count = self.count_in_ball(c, r);
                records.push(DensityRecord {
                    r,
                    center: c,
                    count,
                    mass,
                    ratio: count as f64 / mass,
                });
            }
        }
        Ok(summarize(records))
    }

    /// Densities against the curvature mass `∫_{B_r(z)} Δφ/2 dm`.
    pub fn curvature_density(
        &self,
        w: &Weight,
        radii: &[f64],
        centers: &[Point],
    ) -> Result<DensityEstimate> {
        self.check_balls(radii, centers)?;
        let mut records = Vec::new();
        for &r in radii {
            for &c in centers {
                let q = QuadratureRule::disk_default(c, r);
                let mass: f64 = q
                    .nodes
                    .par_iter()
                    .zip(q.weights.par_iter())
                    .map(|(&z, &wt)| wt * w.laplacian(z) / 2.0)
                    .sum();
                let count = self.count_in_ball(c, r);
                records.push(DensityRecord {
                    r,
                    center: c,
                    count,
                    mass,
                    ratio: count as f64 / mass,
                });
            }
        }
        Ok(summarize(records))
    }

    /// `x,y` per line with a header, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y")?;
        for z in &self.points {
            writeln!(out, "{:.16e},{:.16e}", z.re, z.im)?;
        }
        Ok(())
    }

    /// Reads `x,y` lines; a non-numeric first line is treated as a header.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::InvalidParameter(format!("reading point CSV: {e}")))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',').map(str::trim);
            let (x, y) = match (fields.next(), fields.next(), fields.next()) {
                (Some(x), Some(y), None) => (x.parse::<f64>(), y.parse::<f64>()),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "line {}: expected two comma-separated values",
                        lineno + 1
                    )))
                }
            };
            match (x, y) {
                (Ok(x), Ok(y)) => points.push(Point::new(x, y)),
                _ if points.is_empty() && lineno == 0 => continue,
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "line {}: values are not numbers",
                        lineno + 1
                    )))
                }
            }
        }
        Self::from_points(points)
    }
}

fn summarize(records: Vec<DensityRecord>) -> DensityEstimate {
    let d_minus = records.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let d_plus = records.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    DensityEstimate {
        d_minus,
        d_plus,
        records,
    }
}

pub(crate) fn first_duplicate(points: &[Point]) -> Option<Point> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    sorted.windows(2).find(|w| w[0] == w[1]).map(|w| w[0])
}

/// Rectangular lattice `{(ja, kb)} ∩ closed B_R(0)`.
pub fn lattice(a: f64, b: f64, radius: f64) -> Result<PointSet> {
    if !(a > 0.0 && b > 0.0 && radius > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lattice needs a, b, R > 0 (got {a}, {b}, {radius})"
        )));
    }
    let nj = (radius / a).floor() as i64;
    let nk = (radius / b).floor() as i64;
    let mut points = Vec::new();
    for k in -nk..=nk {
        for j in -nj..=nj {
            let z = Point::new(j as f64 * a, k as f64 * b);
            if z.norm() <= radius * (1.0 + BALL_TOL) {
                points.push(z);
            }
        }
    }
    Ok(PointSet {
        points,
        generator: Some(Generator::Lattice { a, b }),
        clip_radius: radius,
        degenerate: false,
    })
}

/// Uniform bucket grid for neighbourhood queries.
struct SpatialHash {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SpatialHash {
    fn new(points: &[Point], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, z) in points.iter().enumerate() {
            buckets.entry(Self::key(cell, *z)).or_default().push(i);
        }
        SpatialHash { cell, buckets }
    }

    fn key(cell: f64, z: Point) -> (i64, i64) {
        ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)
    }

    fn neighbours(&self, c: Point, r: f64) -> Vec<usize> {
        let reach = (r / self.cell).ceil() as i64;
        let (kx, ky) = Self::key(self.cell, c);
        let mut out = Vec::new();
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                if let Some(v) = self.buckets.get(&(kx + dx, ky + dy)) {
                    out.extend_from_slice(v);
                }
            }
        }
        out
    }

    fn count_within(&self, points: &[Point], c: Point, r: f64) -> usize {
        let lim = r * (1.0 + BALL_TOL) + BALL_TOL;
        self.neighbours(c, r)
            .into_iter()
            .filter(|&i| (points[i] - c).norm() <= lim)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn small_lattices() {
        let s = lattice(1.0, 1.0, 1.0).unwrap();
        assert_eq!(s.len(), 5);
        for z in [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            assert!(s.points().contains(&Point::new(z.0, z.1)));
        }
        assert_eq!(lattice(2.0, 2.0, 1.0).unwrap().len(), 1);
    }

    #[test]
    fn lattice_count_matches_area() {
        let s = lattice(0.8, 0.8, 20.0).unwrap();
        let expected = PI * 400.0 / 0.64;
        assert!((s.len() as f64 / expected - 1.0).abs() < 0.02);
    }

    #[test]
    fn separation_examples() {
        let s = lattice(0.8, 0.8, 5.0).unwrap();
        assert!((s.separation().unwrap() - 0.8).abs() < 1e-15);
        let two = PointSet::from_points(vec![Point::new(0.3, 0.0), Point::new(0.3 + 1e-6, 0.0)]).unwrap();
        assert!((two.separation().unwrap() - 1e-6).abs() < 1e-15);
        assert!(PointSet::from_points(vec![Point::new(0.0, 0.0)]).unwrap().separation().is_err());
    }

    #[test]
    fn duplicates_rejected_unless_flagged() {
        let pts = vec![Point::new(1.0, 1.0), Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        assert!(PointSet::from_points(pts.clone()).is_err());
        let d = PointSet::new_degenerate(pts, 2.0);
        assert!(d.is_degenerate());
        assert_eq!(d.separation().unwrap(), 0.0);
    }

    /// Brute-force `max_c #(S ∩ closed B_1(c))` over a fine grid of centers.
    fn brute_rel(s: &PointSet, half: f64, n: usize) -> usize {
        let step = 2.0 * half / n as f64;
        let mut best = 0;
        for i in 0..=n {
            for j in 0..=n {
                let c = Point::new(-half + i as f64 * step, -half + j as f64 * step);
                best = best.max(s.count_in_ball(c, 1.0));
            }
        }
        best
    }

    #[test]
    fn relative_separation_examples() {
        assert_eq!(lattice(2.0, 2.0, 10.0).unwrap().relative_separation(), 1);
        assert_eq!(PointSet::from_points(vec![]).unwrap().relative_separation(), 0);
        let s = lattice(0.9, 0.9, 10.0).unwrap();
        assert_eq!(s.relative_separation(), 5);
        // one lattice period suffices for the brute-force oracle
        assert_eq!(brute_rel(&s, 0.9, 180), 5);
    }

    #[test]
    fn density_calibration() {
        let k = KernelEvaluator::closed_form(&Weight::standard()).unwrap();
        let s = lattice(1.0, 1.0, 21.0).unwrap();
        let d = s.beurling_density(&k, &[20.0], &[Point::new(0.0, 0.0)]).unwrap();
        assert!((d.d_plus - 1.0).abs() < 0.05);
        let s2 = lattice(2.0, 2.0, 21.0).unwrap();
        let d2 = s2.beurling_density(&k, &[20.0], &[Point::new(0.0, 0.0)]).unwrap();
        assert!((d2.d_plus - 0.25).abs() < 0.05 * 0.25);
        let k2 = KernelEvaluator::closed_form(&Weight::gaussian(2.0 * PI).unwrap()).unwrap();
        let d3 = s.beurling_density(&k2, &[20.0], &[Point::new(0.0, 0.0)]).unwrap();
        assert!((d3.d_plus - 0.5).abs() < 0.05 * 0.5);
    }

    #[test]
    fn density_rejects_escaping_balls() {
        let k = KernelEvaluator::closed_form(&Weight::standard()).unwrap();
        let s = lattice(1.0, 1.0, 10.0).unwrap();
        assert!(matches!(
            s.beurling_density(&k, &[8.0], &[Point::new(5.0, 0.0)]),
            Err(Error::RegionEscape { .. })
        ));
    }

    #[test]
    fn curvature_density_examples() {
        let s = lattice(1.0, 1.0, 21.0).unwrap();
        let w = Weight::standard();
        let c = s.curvature_density(&w, &[20.0], &[Point::new(0.0, 0.0)]).unwrap();
        assert!((c.d_plus - 1.0 / PI).abs() < 0.05 / PI);
        let k = KernelEvaluator::closed_form(&w).unwrap();
        let d = s.beurling_density(&k, &[20.0], &[Point::new(0.0, 0.0)]).unwrap();
        assert!((d.d_plus / c.d_plus - PI).abs() < 1e-9);
        let c2 = s
            .curvature_density(&Weight::gaussian(2.0 * PI).unwrap(), &[20.0], &[Point::new(0.0, 0.0)])
            .unwrap();
        assert!((c2.d_plus - 1.0 / (2.0 * PI)).abs() < 0.05 / (2.0 * PI));
        assert!(s.curvature_density(&w, &[0.0], &[Point::new(0.0, 0.0)]).is_err());
    }

    #[test]
    fn dilation_examples() {
        let s = lattice(1.0, 1.0, 6.0).unwrap();
        assert_eq!(s.dilate(1.0).unwrap().points(), s.points());
        let mut d: Vec<(i64, i64)> = s
            .dilate(2.0)
            .unwrap()
            .points()
            .iter()
            .map(|z| (z.re.round() as i64, z.im.round() as i64))
            .collect();
        let mut l: Vec<(i64, i64)> = lattice(2.0, 2.0, 12.0)
            .unwrap()
            .points()
            .iter()
            .map(|z| (z.re.round() as i64, z.im.round() as i64))
            .collect();
        d.sort();
        l.sort();
        assert_eq!(d, l);
        assert_eq!(s.dilate(2.0).unwrap().clip_radius(), 12.0);
        assert!(s.dilate(0.0).is_err());
    }

    #[test]
    fn density_scales_under_dilation() {
        let k = KernelEvaluator::closed_form(&Weight::standard()).unwrap();
        let s = lattice(1.0, 1.0, 21.0).unwrap();
        let big = s.dilate(2.0).unwrap();
        let d1 = s.beurling_density(&k, &[20.0], &[Point::new(0.0, 0.0)]).unwrap().d_plus;
        let d2 = big.beurling_density(&k, &[20.0], &[Point::new(0.0, 0.0)]).unwrap().d_plus;
        assert!((d2 / (d1 / 4.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn linear_maps() {
        let s = lattice(1.0, 1.0, 5.0).unwrap();
        assert_eq!(s.linear_map([[1.0, 0.0], [0.0, 1.0]]).unwrap().points(), s.points());
        let a = s.linear_map([[1.1, 0.0], [0.0, 1.1]]).unwrap();
        let b = s.dilate(1.1).unwrap();
        assert_eq!(a.points(), b.points());
        let (c, sn) = ((PI / 6.0).cos(), (PI / 6.0).sin());
        let r = s.linear_map([[c, -sn], [sn, c]]).unwrap();
        assert!((r.separation().unwrap() - 1.0).abs() < 1e-14);
        assert!((r.clip_radius() - 5.0).abs() < 1e-12);
        assert!(s.linear_map([[1.0, 2.0], [2.0, 4.0]]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = PointSet::from_points(vec![Point::new(0.1, -2.5), Point::new(1.0 / 3.0, 7.0)]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = PointSet::read_csv(&buf[..]).unwrap();
        assert_eq!(back.points(), s.points());
        assert!(PointSet::read_csv(&b"x,y\n1,2\nfoo,3\n"[..]).is_err());
        assert!(PointSet::read_csv(&b"1,2,3\n"[..]).is_err());
    }

    proptest! {
        #[test]
        fn separation_invariant_under_rigid_motion(seed in 0u64..1000, angle in 0.0f64..6.3,
                                                   tx in -5.0f64..5.0, ty in -5.0f64..5.0) {
            let mut rng = crate::random::seeded_rng(seed);
            let pts: Vec<Point> = (0..40).map(|_| crate::random::complex_gaussian(&mut rng) * 2.0).collect();
            let s = PointSet::from_points(pts.clone()).unwrap();
            let moved = PointSet::from_points(
                pts.iter().map(|z| crate::geometry::rotate(*z, angle) + Point::new(tx, ty)).collect()
            ).unwrap();
            prop_assert!((s.separation().unwrap() - moved.separation().unwrap()).abs() < 1e-12);
        }

        #[test]
        fn relative_separation_packing_bound(seed in 0u64..500, spread in 1.0f64..4.0) {
            let mut rng = crate::random::seeded_rng(seed);
            let pts: Vec<Point> = (0..30).map(|_| crate::random::complex_gaussian(&mut rng) * spread).collect();
            let s = PointSet::from_points(pts).unwrap();
            let rel = s.relative_separation();
            let sep = s.separation().unwrap();
            prop_assert!(rel >= 1);
            prop_assert!(rel as f64 <= (1.0 + 2.0 / sep).powi(2));
        }

        #[test]
        fn relative_separation_invariant_under_lattice_rotation(angle in 0.0f64..6.3, a in 0.5f64..2.5) {
            let s = lattice(a, a, 6.0).unwrap();
            let (c, sn) = (angle.cos(), angle.sin());
            let r = s.linear_map([[c, -sn], [sn, c]]).unwrap();
            prop_assert_eq!(s.relative_separation(), r.relative_separation());
        }
    }
}
