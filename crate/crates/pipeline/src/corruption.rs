//! Parameter sampling and application for the seven corruptions.
//!
//! Sampling turns config ranges into a fully materialised
//! [`CorruptionParams`]. Application is a pure function of those parameters,
//! the clean image and the record's field seed, and is the only code path
//! used by generation, replay and the checkerboard probes.

use distortkit_core::fields::{GrfParams, OctaveSpec};
use distortkit_core::seed::{rng_from_seed, subseed, PurposeTag};
use distortkit_core::viz::{visualize_scalar, visualize_uv};
use distortkit_core::warps::{
    brown_conrady_uv, divergence_free_uv_with, grf_warp_uv_with, jittered_grid, tps_fit, tps_uv, CameraIntrinsics,
    LensParams, TpsControlSet,
};
use distortkit_core::weather::fog::{apply_koschmieder, depth_map, ExtinctionField};
use distortkit_core::weather::{hetero_fog_from_noise, lens_flare, sample_center, FlareParams, FogParams};
use distortkit_core::fields::multiscale_perlin;
use distortkit_core::{remap, BorderPolicy, ImageBuffer, ScalarField, UVField};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Corruption, FlowSection, GenerationConfig};
use crate::error::Result;

/// Everything needed to replay one corruption, apart from the field seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "corruption", content = "params", rename_all = "snake_case")]
pub enum CorruptionParams {
    BrownConrady {
        intrinsics: CameraIntrinsics,
        lens: LensParams,
    },
    GrfTurbulence {
        correlation_length: f64,
        alpha: f64,
        inner_scale: f64,
    },
    Tps {
        grid: [usize; 2],
        jitter: f64,
        controls: TpsControlSet,
    },
    DivergenceFree {
        correlation_length: f64,
        alpha: f64,
        inner_scale: f64,
    },
    UniformFog {
        fog: FogParams,
        delta: f64,
        /// Extinction actually applied.
        k: f64,
    },
    HeteroFog {
        fog: FogParams,
        octaves: OctaveSpec,
        delta: f64,
    },
    LensFlare {
        rho: f64,
        beta: f64,
        center: [f64; 2],
        radius: f64,
    },
}

impl CorruptionParams {
    pub fn corruption(&self) -> Corruption {
        match self {
            CorruptionParams::BrownConrady { .. } => Corruption::BrownConrady,
            CorruptionParams::GrfTurbulence { .. } => Corruption::GrfTurbulence,
            CorruptionParams::Tps { .. } => Corruption::Tps,
            CorruptionParams::DivergenceFree { .. } => Corruption::DivergenceFree,
            CorruptionParams::UniformFog { .. } => Corruption::UniformFog,
            CorruptionParams::HeteroFog { .. } => Corruption::HeteroFog,
            CorruptionParams::LensFlare { .. } => Corruption::LensFlare,
        }
    }
}

/// Ground truth of one corrupted frame.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundTruth {
    /// Backward-sampling displacement, written as UVF.
    Flow(UVField),
    /// Extinction map or flare mask, written as KMF.
    Map(ScalarField),
}

impl GroundTruth {
    pub fn extension(&self) -> &'static str {
        match self {
            GroundTruth::Flow(_) => "uvf",
            GroundTruth::Map(_) => "kmf",
        }
    }

    pub fn visualize(&self) -> Result<ImageBuffer> {
        Ok(match self {
            GroundTruth::Flow(f) => {
                let peak = f.max_magnitude();
                visualize_uv(f, if peak > 0.0 { peak } else { 1.0 })?
            }
            GroundTruth::Map(m) => visualize_scalar(m)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub image: ImageBuffer,
    pub truth: GroundTruth,
    /// Fog transmission map.
    pub transmission: Option<ScalarField>,
}

fn sample_flow<R: Rng + ?Sized>(section: &FlowSection, rng: &mut R) -> (f64, f64, f64) {
    let l = section.correlation_length.sample(rng);
    let alpha = section.alpha.sample(rng);
    (l, alpha, l * section.inner_scale_ratio)
}

/// Draws parameters for `corruption` on a `width x height` frame. Range draws
/// come from `rng`; seeded geometry (TPS jitter, flare centre, fog jitter)
/// from `field_seed`.
pub fn sample_params<R: Rng + ?Sized>(
    cfg: &GenerationConfig,
    corruption: Corruption,
    width: usize,
    height: usize,
    rng: &mut R,
    field_seed: u64,
) -> Result<CorruptionParams> {
    Ok(match corruption {
        Corruption::BrownConrady => {
            let section = &cfg.brown_conrady;
            let c = section.ranges().map(|(_, r)| r.sample(rng));
            let lens = LensParams {
                k: [c[0], c[1], c[2], c[3], c[4], c[5]],
                p: [c[6], c[7]],
                s: [c[8], c[9], c[10], c[11]],
            };
            let intrinsics = section
                .intrinsics
                .map(CameraIntrinsics::from)
                .unwrap_or_else(|| CameraIntrinsics::centered(width, height));
            CorruptionParams::BrownConrady { intrinsics, lens }
        }
        Corruption::GrfTurbulence => {
            let (correlation_length, alpha, inner_scale) = sample_flow(&cfg.grf_turbulence, rng);
            CorruptionParams::GrfTurbulence {
                correlation_length,
                alpha,
                inner_scale,
            }
        }
        Corruption::DivergenceFree => {
            let (correlation_length, alpha, inner_scale) = sample_flow(&cfg.divergence_free, rng);
            CorruptionParams::DivergenceFree {
                correlation_length,
                alpha,
                inner_scale,
            }
        }
        Corruption::Tps => {
            let [nx, ny] = cfg.tps.grid;
            let jitter = cfg.tps.jitter.sample(rng);
            let controls = jittered_grid(width, height, nx, ny, jitter, &mut rng_from_seed(field_seed))?;
            CorruptionParams::Tps {
                grid: cfg.tps.grid,
                jitter,
                controls,
            }
        }
        Corruption::UniformFog => {
            let fog = cfg.fog.params()?;
            let delta = fog.sample_delta(subseed(field_seed, 0, PurposeTag::Jitter));
            CorruptionParams::UniformFog {
                fog,
                delta,
                k: fog.k0() * (1.0 + delta),
            }
        }
        Corruption::HeteroFog => {
            let fog = cfg.fog.params()?;
            let delta = fog.sample_delta(subseed(field_seed, 0, PurposeTag::Jitter));
            CorruptionParams::HeteroFog {
                fog,
                octaves: cfg.hetero_fog.spec()?,
                delta,
            }
        }
        Corruption::LensFlare => {
            let rho = cfg.lens_flare.rho.sample(rng);
            let beta = cfg.lens_flare.beta.sample(rng);
            CorruptionParams::LensFlare {
                rho,
                beta,
                center: sample_center(width, height, field_seed),
                radius: rho * (width as f64).hypot(height as f64),
            }
        }
    })
}

fn grf(correlation_length: f64, inner_scale: f64) -> GrfParams {
    GrfParams {
        inner_scale,
        ..GrfParams::new(correlation_length)
    }
}

/// Builds just the displacement field of a refractive corruption.
pub fn flow_field(params: &CorruptionParams, width: usize, height: usize, field_seed: u64) -> Result<Option<UVField>> {
    Ok(Some(match params {
        CorruptionParams::BrownConrady { intrinsics, lens } => brown_conrady_uv(width, height, intrinsics, lens)?,
        CorruptionParams::GrfTurbulence {
            correlation_length,
            alpha,
            inner_scale,
        } => grf_warp_uv_with(width, height, &grf(*correlation_length, *inner_scale), *alpha, field_seed)?,
        CorruptionParams::DivergenceFree {
            correlation_length,
            alpha,
            inner_scale,
        } => divergence_free_uv_with(width, height, &grf(*correlation_length, *inner_scale), *alpha, field_seed)?,
        CorruptionParams::Tps { controls, .. } => tps_uv(&tps_fit(controls)?, width, height)?,
        _ => return Ok(None),
    }))
}

/// Corrupts `img`. Deterministic in `(params, img, field_seed)`.
pub fn apply(params: &CorruptionParams, img: &ImageBuffer, field_seed: u64) -> Result<Outcome> {
    let (w, h) = img.dims();
    if let Some(field) = flow_field(params, w, h, field_seed)? {
        return Ok(Outcome {
            image: remap(img, &field, BorderPolicy::Clamp)?,
            truth: GroundTruth::Flow(field),
            transmission: None,
        });
    }
    Ok(match params {
        CorruptionParams::UniformFog { fog, k, .. } => {
            let depth = depth_map(w, h, fog.max_depth)?;
            let (image, t) = apply_koschmieder(img, ExtinctionField::Uniform(*k), &depth, fog.airlight)?;
            Outcome {
                image,
                truth: GroundTruth::Map(ScalarField::constant(w, h, *k)?),
                transmission: Some(t),
            }
        }
        CorruptionParams::HeteroFog { fog, octaves, delta } => {
            let noise = multiscale_perlin(w, h, octaves, subseed(field_seed, 0, PurposeTag::Noise))?;
            let fogged = hetero_fog_from_noise(img, fog, &noise, *delta)?;
            Outcome {
                image: fogged.image,
                truth: GroundTruth::Map(fogged.k_map),
                transmission: Some(fogged.transmission),
            }
        }
        CorruptionParams::LensFlare { rho, beta, center, .. } => {
            let flare = lens_flare(
                img,
                &FlareParams {
                    rho: *rho,
                    beta: *beta,
                    center: Some(*center),
                },
                field_seed,
            )?;
            Outcome {
                image: flare.image,
                truth: GroundTruth::Map(flare.mask),
                transmission: None,
            }
        }
        _ => unreachable!("refractive corruptions are handled by flow_field"),
    })
}
