//! Koschmieder fog with uniform or noise-modulated extinction.
//!
//! Depth is a linear ramp `d(x, y) = (1 - y / H) D_max`, transmission is
//! `t = exp(-k d)` and every channel is blended towards the atmospheric
//! light: `I_fog = I t + A (1 - t)`. The blend runs in `f64` on the 0..255
//! scale and is rounded once.
//!
//! The base extinction defaults to the literal `k0 = 0.0375` per metre.
//! [`Extinction::Visibility`] derives it from a visibility distance instead,
//! `k0 = -ln(0.05) / V`; note that `V = 100 m` gives `0.02996`, not `0.0375`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::octave::{multiscale_perlin, OctaveSpec};
use crate::raster::{ImageBuffer, ScalarField};
use crate::sample::quantize;
use crate::seed::{rng_from_seed, subseed, PurposeTag};

pub const DEFAULT_K0: f64 = 0.0375;
/// Contrast threshold defining visibility distance.
pub const VISIBILITY_CONTRAST: f64 = 0.05;
pub const DEFAULT_MAX_DEPTH: f64 = 160.0;
pub const DEFAULT_AIRLIGHT: [f64; 3] = [220.0, 220.0, 235.0];
/// Largest allowed relative extinction jitter.
pub const MAX_JITTER: f64 = 0.05;

pub fn k0_from_visibility(visibility_m: f64) -> f64 {
    -VISIBILITY_CONTRAST.ln() / visibility_m
}

/// Source of the mean extinction coefficient `k0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extinction {
    /// `k0` per metre, used as given.
    Coefficient(f64),
    /// Visibility distance in metres.
    Visibility(f64),
}

impl Default for Extinction {
    fn default() -> Self {
        Extinction::Coefficient(DEFAULT_K0)
    }
}

impl Extinction {
    pub fn k0(&self) -> f64 {
        match *self {
            Extinction::Coefficient(k) => k,
            Extinction::Visibility(v) => k0_from_visibility(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FogParams {
    pub extinction: Extinction,
    /// Scene depth at the top row, metres.
    pub max_depth: f64,
    /// Atmospheric light, RGB on 0..255.
    pub airlight: [f64; 3],
    /// Half-width of the uniform jitter on `k0`; `0` disables it.
    pub jitter: f64,
}

impl Default for FogParams {
    fn default() -> Self {
        Self {
            extinction: Extinction::default(),
            max_depth: DEFAULT_MAX_DEPTH,
            airlight: DEFAULT_AIRLIGHT,
            jitter: MAX_JITTER,
        }
    }
}

impl FogParams {
    pub fn validate(&self) -> Result<()> {
        match self.extinction {
            Extinction::Coefficient(k) if !(k >= 0.0 && k.is_finite()) => {
                return Err(Error::param("k0", format!("must be non-negative, got {k}")));
            }
            Extinction::Visibility(v) if !(v > 0.0 && v.is_finite()) => {
                return Err(Error::param("visibility", format!("must be positive, got {v}")));
            }
            _ => {}
        }
        if !(self.max_depth > 0.0 && self.max_depth.is_finite()) {
            return Err(Error::param("max_depth", format!("must be positive, got {}", self.max_depth)));
        }
        if !self.airlight.iter().all(|a| (0.0..=255.0).contains(a)) {
            return Err(Error::param("airlight", format!("channels must lie in [0, 255], got {:?}", self.airlight)));
        }
        if !(0.0..=MAX_JITTER).contains(&self.jitter) {
            return Err(Error::param("jitter", format!("must lie in [0, {MAX_JITTER}], got {}", self.jitter)));
        }
        Ok(())
    }

    pub fn k0(&self) -> f64 {
        self.extinction.k0()
    }

    /// Relative jitter `delta ~ U(-jitter, jitter)`, drawn once per image.
    pub fn sample_delta(&self, seed: u64) -> f64 {
        if self.jitter == 0.0 {
            return 0.0;
        }
        rng_from_seed(seed).random_range(-self.jitter..=self.jitter)
    }
}

/// Linear depth ramp: `D_max` on row 0 falling towards 0 at `y = H`.
pub fn depth_map(width: usize, height: usize, max_depth: f64) -> Result<ScalarField> {
    if !(max_depth > 0.0 && max_depth.is_finite()) {
        return Err(Error::param("max_depth", format!("must be positive, got {max_depth}")));
    }
    let h = height as f64;
    ScalarField::from_fn(width, height, |_, y| (1.0 - y as f64 / h) * max_depth)
}

/// Extinction coefficient, constant or per pixel.
#[derive(Debug, Clone, Copy)]
pub enum ExtinctionField<'a> {
    Uniform(f64),
    Map(&'a ScalarField),
}

impl ExtinctionField<'_> {
    #[inline]
    fn at(&self, i: usize) -> f64 {
        match self {
            ExtinctionField::Uniform(k) => *k,
            ExtinctionField::Map(m) => m.values()[i],
        }
    }
}

/// `I t + A (1 - t)` for one channel, evaluated as `A + t (I - A)` so the
/// rounded result never leaves `[min(I, A), max(I, A)]`.
#[inline]
pub fn blend(clean: f64, airlight: f64, t: f64) -> f64 {
    airlight + t * (clean - airlight)
}

/// Blends `img` towards `airlight` with `t = exp(-k d)` and returns the fogged
/// frame with its transmission map.
pub fn apply_koschmieder(
    img: &ImageBuffer,
    k: ExtinctionField<'_>,
    depth: &ScalarField,
    airlight: [f64; 3],
) -> Result<(ImageBuffer, ScalarField)> {
    if depth.dims() != img.dims() {
        return Err(Error::SizeMismatch {
            expected: img.dims(),
            actual: depth.dims(),
        });
    }
    match k {
        ExtinctionField::Uniform(k) if !(k >= 0.0) => {
            return Err(Error::param("k", format!("extinction must be non-negative, got {k}")));
        }
        ExtinctionField::Map(m) => {
            if m.dims() != img.dims() {
                return Err(Error::SizeMismatch {
                    expected: img.dims(),
                    actual: m.dims(),
                });
            }
            if let Some(k) = m.values().iter().find(|k| !(**k >= 0.0)) {
                return Err(Error::param("k", format!("extinction must be non-negative, got {k}")));
            }
        }
        _ => {}
    }
    if let Some(d) = depth.values().iter().find(|d| !(**d >= 0.0)) {
        return Err(Error::param("depth", format!("must be non-negative, got {d}")));
    }

    let transmission: Vec<f64> = (0..depth.values().len())
        .into_par_iter()
        .map(|i| (-k.at(i) * depth.values()[i]).exp())
        .collect();
    let mut data = img.as_raw().to_vec();
    data.par_chunks_exact_mut(3).zip(transmission.par_iter()).for_each(|(px, &t)| {
        for c in 0..3 {
            px[c] = quantize(blend(px[c] as f64, airlight[c], t));
        }
    });
    let (w, h) = img.dims();
    Ok((ImageBuffer::new(w, h, data)?, ScalarField::new(w, h, transmission)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformFog {
    pub image: ImageBuffer,
    pub transmission: ScalarField,
    /// Extinction actually applied, `k0 (1 + delta)`.
    pub k: f64,
    pub delta: f64,
}

/// Homogeneous fog with `k = k0 (1 + delta)`; `delta` comes from
/// `subseed(seed, 0, Jitter)`.
pub fn uniform_fog(img: &ImageBuffer, params: &FogParams, seed: u64) -> Result<UniformFog> {
    params.validate()?;
    let delta = params.sample_delta(subseed(seed, 0, PurposeTag::Jitter));
    let k = params.k0() * (1.0 + delta);
    let depth = depth_map(img.width(), img.height(), params.max_depth)?;
    let (image, transmission) = apply_koschmieder(img, ExtinctionField::Uniform(k), &depth, params.airlight)?;
    Ok(UniformFog {
        image,
        transmission,
        k,
        delta,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeteroFog {
    pub image: ImageBuffer,
    pub k_map: ScalarField,
    pub transmission: ScalarField,
    pub delta: f64,
}

/// Heterogeneous fog: `k(x, y) = k0 P(x, y) / mean(P) (1 + delta)` where `P`
/// is multi-scale noise from `subseed(seed, 0, Noise)` and `delta` comes from
/// `subseed(seed, 0, Jitter)`.
pub fn hetero_fog(img: &ImageBuffer, params: &FogParams, octaves: &OctaveSpec, seed: u64) -> Result<HeteroFog> {
    params.validate()?;
    let noise = multiscale_perlin(img.width(), img.height(), octaves, subseed(seed, 0, PurposeTag::Noise))?;
    let delta = params.sample_delta(subseed(seed, 0, PurposeTag::Jitter));
    hetero_fog_from_noise(img, params, &noise, delta)
}

/// Heterogeneous fog from an explicit noise field and jitter.
pub fn hetero_fog_from_noise(img: &ImageBuffer, params: &FogParams, noise: &ScalarField, delta: f64) -> Result<HeteroFog> {
    params.validate()?;
    if noise.dims() != img.dims() {
        return Err(Error::SizeMismatch {
            expected: img.dims(),
            actual: noise.dims(),
        });
    }
    let (lo, hi) = noise.min_max();
    if hi <= lo {
        return Err(Error::DegenerateRange { value: lo });
    }
    if lo < 0.0 {
        return Err(Error::param("noise", format!("must be non-negative, got minimum {lo}")));
    }
    let scale = params.k0() * (1.0 + delta) / noise.mean();
    let k_map = noise.map(|p| p * scale)?;
    let depth = depth_map(img.width(), img.height(), params.max_depth)?;
    let (image, transmission) = apply_koschmieder(img, ExtinctionField::Map(&k_map), &depth, params.airlight)?;
    Ok(HeteroFog {
        image,
        k_map,
        transmission,
        delta,
    })
}
