//! Heat-shimmer turbulence from a pair of Gaussian random fields.

use crate::error::Result;
use crate::fields::grf::{GrfParams, GrfSampler};
use crate::raster::UVField;
use crate::seed::{subseed, PurposeTag};

use super::check_alpha;

/// `u = alpha R_u`, `v = alpha R_v` with `R_u`, `R_v` independent unit-variance
/// fields of correlation length `correlation_length`.
pub fn grf_warp_uv(width: usize, height: usize, correlation_length: f64, alpha: f64, seed: u64) -> Result<UVField> {
    grf_warp_uv_with(width, height, &GrfParams::new(correlation_length), alpha, seed)
}

/// As [`grf_warp_uv`] with explicit field parameters. The target variance of
/// `params` is ignored; components are always unit variance before scaling.
pub fn grf_warp_uv_with(width: usize, height: usize, params: &GrfParams, alpha: f64, seed: u64) -> Result<UVField> {
    check_alpha(alpha)?;
    let params = GrfParams {
        target_variance: 1.0,
        ..*params
    };
    params.validate()?;
    if alpha == 0.0 {
        return UVField::zeros(width, height);
    }
    let sampler = GrfSampler::new(width, height, params)?;
    let ru = sampler.sample(subseed(seed, 0, PurposeTag::AxisU))?;
    let rv = sampler.sample(subseed(seed, 0, PurposeTag::AxisV))?;
    let u = ru.into_values().into_iter().map(|r| alpha * r).collect();
    let v = rv.into_values().into_iter().map(|r| alpha * r).collect();
    UVField::new(width, height, u, v)
}
