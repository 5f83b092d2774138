//! Planar points and the sampling grids used throughout the crate.

use num_complex::Complex64;

/// A point of the complex plane.
pub type Point = Complex64;

/// `n × n` uniform grid over the square `[-half, half]²`.
pub fn square_grid(n: usize, half: f64) -> Vec<Point> {
    square_grid_centered(n, half, Point::new(0.0, 0.0))
}

pub fn square_grid_centered(n: usize, half: f64, center: Point) -> Vec<Point> {
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![center];
    }
    let step = 2.0 * half / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            out.push(center + Point::new(-half + i as f64 * step, -half + j as f64 * step));
        }
    }
    out
}

/// Points of an `n × n` square grid over `[-radius, radius]²` that lie in the closed disk.
pub fn disk_grid(n: usize, radius: f64) -> Vec<Point> {
    square_grid(n, radius)
        .into_iter()
        .filter(|z| z.norm() <= radius * (1.0 + 1e-12))
        .collect()
}

/// Hexagonal packing of the closed disk `B_radius(0)` with nearest-neighbour spacing `h`.
///
/// Rows are emitted bottom to top, each left to right.
pub fn hex_disk_grid(radius: f64, h: f64) -> Vec<Point> {
    assert!(h > 0.0 && radius >= 0.0);
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = (radius / dy).floor() as i64;
    let cols = (radius / h).ceil() as i64 + 1;
    let mut out = Vec::new();
    for j in -rows..=rows {
        let offset = if j.rem_euclid(2) == 1 { h / 2.0 } else { 0.0 };
        for i in -cols..=cols {
            let z = Point::new(i as f64 * h + offset, j as f64 * dy);
            if z.norm() <= radius * (1.0 + 1e-12) {
                out.push(z);
            }
        }
    }
    out
}

/// Rotation by `angle` radians about the origin.
pub fn rotate(z: Point, angle: f64) -> Point {
    z * Point::from_polar(1.0, angle)
}

pub fn max_norm(points: &[Point]) -> f64 {
    points.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_grid_corners() {
        let g = square_grid(3, 1.0);
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], Point::new(-1.0, -1.0));
        assert_eq!(g[8], Point::new(1.0, 1.0));
        assert_eq!(g[4], Point::new(0.0, 0.0));
    }

    #[test]
    fn hex_grid_spacing_and_containment() {
        let g = hex_disk_grid(2.0, 0.5);
        assert!(g.iter().all(|z| z.norm() <= 2.0 + 1e-12));
        let mut sep = f64::INFINITY;
        for i in 0..g.len() {
            for j in 0..i {
                sep = sep.min((g[i] - g[j]).norm());
            }
        }
        assert!((sep - 0.5).abs() < 1e-12);
        // roughly area / cell area
        let expected = std::f64::consts::PI * 4.0 / (0.25 * 3f64.sqrt() / 2.0);
        assert!((g.len() as f64 / expected - 1.0).abs() < 0.15);
    }
}
