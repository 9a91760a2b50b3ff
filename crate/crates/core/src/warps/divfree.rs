//! Incompressible (divergence-free) warps from a stream function.
//!
//! `u = d(psi)/dy`, `v = -d(psi)/dx`, differentiated with central
//! differences (one-sided at the border). On the interior the discrete
//! divergence of the result, again by central differences, cancels term by
//! term, so it is zero up to floating-point rounding. The velocity is then
//! rescaled so its largest magnitude equals `alpha`.

use rayon::prelude::*;

use crate::error::Result;
use crate::fields::grf::{GrfParams, GrfSampler};
use crate::raster::{ScalarField, UVField};

use super::check_alpha;

/// Central difference along one axis of a row-major grid, one-sided at the
/// ends. `n` is the axis length, `at(i)` reads sample `i` along it.
#[inline]
fn diff(n: usize, i: usize, at: impl Fn(usize) -> f64) -> f64 {
    if n < 2 {
        0.0
    } else if i == 0 {
        at(1) - at(0)
    } else if i == n - 1 {
        at(n - 1) - at(n - 2)
    } else {
        0.5 * (at(i + 1) - at(i - 1))
    }
}

/// Rotated gradient `(d psi/dy, -d psi/dx)` of a stream function.
pub fn stream_velocity(psi: &ScalarField) -> Result<UVField> {
    let (w, h) = psi.dims();
    let n = w * h;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    u.par_chunks_mut(w)
        .zip(v.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (urow, vrow))| {
            for x in 0..w {
                urow[x] = diff(h, y, |j| psi.get(x, j)) + 0.0;
                vrow[x] = -diff(w, x, |i| psi.get(i, y)) + 0.0;
            }
        });
    UVField::new(w, h, u, v)
}

/// Velocity of `psi`, rescaled to a peak magnitude of `alpha` pixels.
pub fn divergence_free_from_stream(psi: &ScalarField, alpha: f64) -> Result<UVField> {
    check_alpha(alpha)?;
    let velocity = stream_velocity(psi)?;
    let peak = velocity.max_magnitude();
    if alpha == 0.0 || peak == 0.0 {
        return UVField::zeros(psi.width(), psi.height());
    }
    velocity.scaled(alpha / peak)
}

/// Stream function drawn as a Gaussian random field of correlation length
/// `correlation_length`.
pub fn divergence_free_uv(width: usize, height: usize, correlation_length: f64, alpha: f64, seed: u64) -> Result<UVField> {
    divergence_free_uv_with(width, height, &GrfParams::new(correlation_length), alpha, seed)
}

/// As [`divergence_free_uv`] with explicit stream-function parameters.
pub fn divergence_free_uv_with(width: usize, height: usize, params: &GrfParams, alpha: f64, seed: u64) -> Result<UVField> {
    check_alpha(alpha)?;
    params.validate()?;
    if alpha == 0.0 {
        return UVField::zeros(width, height);
    }
    let sampler = GrfSampler::new(width, height, *params)?;
    let psi = sampler.sample(seed)?;
    divergence_free_from_stream(&psi, alpha)
}

/// Largest `|du/dx + dv/dy|` over pixels at least one pixel from the border,
/// by central differences. Zero for fields narrower than 3 pixels.
pub fn max_interior_divergence(field: &UVField) -> f64 {
    let (w, h) = field.dims();
    if w < 3 || h < 3 {
        return 0.0;
    }
    let (u, v) = (field.u(), field.v());
    (1..h - 1)
        .into_par_iter()
        .map(|y| {
            (1..w - 1)
                .map(|x| {
                    let du = 0.5 * (u[y * w + x + 1] - u[y * w + x - 1]);
                    let dv = 0.5 * (v[(y + 1) * w + x] - v[(y - 1) * w + x]);
                    (du + dv).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}
