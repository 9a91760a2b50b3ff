//! Photometric corruptions. None of them move pixels; each returns the
//! corrupted frame together with its ground-truth map.

pub mod flare;
pub mod fog;

pub use flare::{lens_flare, sample_center, FlareParams, LensFlare};
pub use fog::{
    apply_koschmieder, depth_map, hetero_fog, hetero_fog_from_noise, k0_from_visibility, uniform_fog, Extinction,
    ExtinctionField, FogParams, HeteroFog, UniformFog,
};
