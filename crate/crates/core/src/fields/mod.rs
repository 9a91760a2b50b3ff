//! Correlated random scalar fields.
//!
//! * [`grf`]: Gaussian random fields with an exponential covariance, used by
//!   the turbulence and divergence-free warps.
//! * [`perlin`]: lattice gradient noise, used for heterogeneous fog.
//! * [`octave`]: range normalisation and the weighted multi-scale stack.

pub mod grf;
pub mod octave;
pub mod perlin;

pub use grf::{sample_grf, GrfParams, GrfSampler, DEFAULT_INNER_SCALE_RATIO};
pub use octave::{combine_octaves, multiscale_perlin, normalize_01, OctaveSpec};
pub use perlin::{perlin, sample_perlin};
