//! Numerical inversion of a backward-sampling displacement field.
//!
//! If `warped = remap(clean, f)`, the restoring field `g` must satisfy
//! `g(p) + f(p + g(p)) = 0`. It is found by the fixed-point iteration
//! `g_0 = 0`, `g_{k+1}(p) = -f(p + g_k(p))`, with `f` sampled bilinearly.
//! The iteration converges wherever the warp is locally contractive
//! (`|grad f| < 1`), which holds for smooth fields whose displacement is
//! small next to their correlation length.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::UVField;
use crate::sample::sample_uv;

/// Outcome of [`invert_uv_with_stats`].
#[derive(Debug, Clone, PartialEq)]
pub struct Inversion {
    pub field: UVField,
    pub iterations: usize,
    /// Largest per-pixel update in the final iteration.
    pub last_update: f64,
}

pub fn invert_uv(field: &UVField, iterations: usize, tol: f64) -> Result<UVField> {
    invert_uv_with_stats(field, iterations, tol).map(|inv| inv.field)
}

pub fn invert_uv_with_stats(field: &UVField, iterations: usize, tol: f64) -> Result<Inversion> {
    if iterations == 0 {
        return Err(Error::param("iterations", "must be at least 1"));
    }
    if !(tol >= 0.0) {
        return Err(Error::param("tol", format!("must be non-negative, got {tol}")));
    }
    let (w, h) = field.dims();
    let n = w * h;
    let mut gu = vec![0.0; n];
    let mut gv = vec![0.0; n];
    let mut last_update = f64::INFINITY;
    let mut done = 0;
    for _ in 0..iterations {
        let (next_u, next_v): (Vec<f64>, Vec<f64>) = (0..n)
            .into_par_iter()
            .map(|i| {
                let (x, y) = ((i % w) as f64, (i / w) as f64);
                let (fu, fv) = sample_uv(field, x + gu[i], y + gv[i]);
                (-fu + 0.0, -fv + 0.0)
            })
            .unzip();
        last_update = (0..n)
            .into_par_iter()
            .map(|i| (next_u[i] - gu[i]).abs().max((next_v[i] - gv[i]).abs()))
            .reduce(|| 0.0, f64::max);
        gu = next_u;
        gv = next_v;
        done += 1;
        if last_update < tol {
            break;
        }
    }
    Ok(Inversion {
        field: UVField::new(w, h, gu, gv)?,
        iterations: done,
        last_update,
    })
}

/// `g(p) + f(p + g(p))`: zero everywhere when `inverse` exactly undoes `forward`.
pub fn composition_residual(forward: &UVField, inverse: &UVField) -> Result<UVField> {
    if forward.dims() != inverse.dims() {
        return Err(Error::SizeMismatch {
            expected: forward.dims(),
            actual: inverse.dims(),
        });
    }
    let (w, h) = forward.dims();
    UVField::from_fn(w, h, |x, y| {
        let (gu, gv) = inverse.get(x, y);
        let (fu, fv) = sample_uv(forward, x as f64 + gu, y as f64 + gv);
        (gu + fu, gv + fv)
    })
}
