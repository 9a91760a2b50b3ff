//! Additive Gaussian lens flare.
//!
//! `m(x, y) = exp(-0.5 (d_f / r)^2)` with `r = rho * sqrt(W^2 + H^2)` and
//! `d_f` the distance to the flare centre; the frame becomes
//! `clip(I + beta * 255 * m, 0, 255)` on every channel.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ImageBuffer, ScalarField};
use crate::sample::quantize;
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlareParams {
    /// Flare radius as a fraction of the image diagonal.
    pub rho: f64,
    /// Peak intensity as a fraction of full scale.
    pub beta: f64,
    /// Flare centre in pixels; sampled from the seed when absent.
    pub center: Option<[f64; 2]>,
}

impl FlareParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::param("rho", format!("must be positive, got {}", self.rho)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::param("beta", format!("must lie in [0, 1], got {}", self.beta)));
        }
        if let Some(c) = self.center {
            if !c.iter().all(|v| v.is_finite()) {
                return Err(Error::param("center", "must be finite"));
            }
        }
        Ok(())
    }
}

/// `c_x ~ U(0.3 W, 0.7 W)`, `c_y ~ U(0, 0.3 H)`.
pub fn sample_center(width: usize, height: usize, seed: u64) -> [f64; 2] {
    let mut rng = rng_from_seed(seed);
    let (w, h) = (width as f64, height as f64);
    let cx = rng.random_range(0.3 * w..=0.7 * w);
    let cy = rng.random_range(0.0..=0.3 * h);
    [cx, cy]
}

#[derive(Debug, Clone, PartialEq)]
pub struct LensFlare {
    pub image: ImageBuffer,
    pub mask: ScalarField,
    pub center: [f64; 2],
    /// Flare radius in pixels.
    pub radius: f64,
}

pub fn lens_flare(img: &ImageBuffer, params: &FlareParams, seed: u64) -> Result<LensFlare> {
    params.validate()?;
    let (w, h) = img.dims();
    let center = params.center.unwrap_or_else(|| sample_center(w, h, seed));
    let radius = params.rho * (w as f64).hypot(h as f64);
    let mask = ScalarField::from_fn(w, h, |x, y| {
        let d = (x as f64 - center[0]).hypot(y as f64 - center[1]);
        (-0.5 * (d / radius).powi(2)).exp()
    })?;
    let gain = params.beta * 255.0;
    let mut data = img.as_raw().to_vec();
    data.par_chunks_exact_mut(3).zip(mask.values().par_iter()).for_each(|(px, &m)| {
        let add = gain * m;
        for c in px.iter_mut() {
            *c = quantize(*c as f64 + add);
        }
    });
    Ok(LensFlare {
        image: ImageBuffer::new(w, h, data)?,
        mask,
        center,
        radius,
    })
}
