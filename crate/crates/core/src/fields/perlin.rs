//! 2D gradient (Perlin) noise.
//!
//! Lattice gradients are unit vectors whose angle is hashed from the lattice
//! coordinates and the seed, so the noise never repeats. Interpolation uses
//! the quintic fade `6t^5 - 15t^4 + 10t^3`. The value is exactly zero at
//! every lattice node and bounded by `sqrt(2) / 2` in magnitude.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::ScalarField;
use crate::seed::splitmix64;

#[inline]
fn fade(t: f64) -> f64 {
    t * t * t * (t * (t * 6.0 - 15.0) + 10.0)
}

#[inline]
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

#[inline]
fn gradient(ix: i64, iy: i64, seed: u64) -> (f64, f64) {
    let h = splitmix64(splitmix64(splitmix64(seed) ^ ix as u64) ^ iy as u64);
    let angle = (h >> 11) as f64 * (TAU / (1u64 << 53) as f64);
    let (s, c) = angle.sin_cos();
    (c, s)
}

/// Noise value at lattice-space position `(x, y)`.
pub fn perlin(x: f64, y: f64, seed: u64) -> f64 {
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let (ix, iy) = (x0 as i64, y0 as i64);
    let corner = |dx: i64, dy: i64| {
        let (gx, gy) = gradient(ix + dx, iy + dy, seed);
        gx * (fx - dx as f64) + gy * (fy - dy as f64)
    };
    let (u, v) = (fade(fx), fade(fy));
    let top = lerp(corner(0, 0), corner(1, 0), u);
    let bottom = lerp(corner(0, 1), corner(1, 1), u);
    lerp(top, bottom, v)
}

/// Noise sampled at `(x / scale, y / scale)` for every pixel.
pub fn sample_perlin(width: usize, height: usize, scale: f64, seed: u64) -> Result<ScalarField> {
    if !(scale >= 1.0 && scale.is_finite()) {
        return Err(Error::param("scale", format!("must be at least 1 pixel, got {scale}")));
    }
    let mut values = vec![0.0; width * height];
    values.par_chunks_mut(width.max(1)).enumerate().for_each(|(y, row)| {
        for (x, v) in row.iter_mut().enumerate() {
            *v = perlin(x as f64 / scale, y as f64 / scale, seed);
        }
    });
    ScalarField::new(width, height, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    #[test]
    fn zero_at_lattice_nodes() {
        let f = sample_perlin(65, 33, 8.0, 3).unwrap();
        for y in (0..33).step_by(8) {
            for x in (0..65).step_by(8) {
                assert_eq!(f.get(x, y), 0.0);
            }
        }
        assert!(f.values().iter().any(|&v| v != 0.0));
    }

    #[test]
    fn deterministic() {
        assert_eq!(sample_perlin(20, 10, 4.0, 9).unwrap(), sample_perlin(20, 10, 4.0, 9).unwrap());
        assert_ne!(sample_perlin(20, 10, 4.0, 9).unwrap(), sample_perlin(20, 10, 4.0, 10).unwrap());
    }

    #[test]
    fn bounded_by_one() {
        let mut rng = rng_from_seed(2024);
        let mut max = 0.0f64;
        for _ in 0..1_000_000 {
            let x = rng.random_range(-500.0..500.0);
            let y = rng.random_range(-500.0..500.0);
            max = max.max(perlin(x, y, 77).abs());
        }
        assert!(max <= 1.0, "max |noise| = {max}");
        assert!(max > 0.3, "suspiciously flat noise: {max}");
    }

    #[test]
    fn continuous_across_cells() {
        for &(x, y) in &[(3.0, 2.5), (1.5, 7.0), (4.0, 4.0)] {
            let eps = 1e-9;
            let a = perlin(x - eps, y - eps, 1);
            let b = perlin(x + eps, y + eps, 1);
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn scale_below_one_rejected() {
        assert!(sample_perlin(4, 4, 0.5, 0).is_err());
    }
}
