//! Refractive displacement fields.
//!
//! | corruption        | builder                   | random source                  |
//! |-------------------|---------------------------|--------------------------------|
//! | Brown-Conrady     | [`brown_conrady_uv`]      | none (coefficients are inputs) |
//! | GRF turbulence    | [`grf_warp_uv`]           | two exponential-covariance GRFs |
//! | thin-plate spline | [`tps_fit`] + [`tps_uv`]  | jittered control grid          |
//! | divergence-free   | [`divergence_free_uv`]    | GRF stream function            |
//!
//! Note that the turbulence warp is driven by Gaussian random fields, not
//! lattice noise; lattice noise is used only by heterogeneous fog.
//!
//! Every builder returns a backward-sampling [`UVField`](crate::UVField):
//! the corrupted frame is `remap(clean, field)`. [`invert_uv`] produces the
//! field that undoes it.

pub mod divfree;
pub mod invert;
pub mod lens;
pub mod tps;
pub mod turbulence;

pub use divfree::{divergence_free_from_stream, divergence_free_uv, divergence_free_uv_with, max_interior_divergence, stream_velocity};
pub use invert::{composition_residual, invert_uv, invert_uv_with_stats, Inversion};
pub use lens::{brown_conrady_uv, CameraIntrinsics, LensParams};
pub use tps::{jittered_grid, tps_fit, tps_uv, TpsControlSet, TpsModel};
pub use turbulence::{grf_warp_uv, grf_warp_uv_with};

use crate::error::{Error, Result};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("must be non-negative, got {alpha}")))
    }
}
