//! Procedural corruption of clean RGB frames with paired ground truth.
//!
//! The crate is organised bottom-up:
//!
//! * [`raster`], [`seed`], [`sample`], [`viz`], [`format`], [`io`]: shared
//!   raster and field types, deterministic seeding, bilinear resampling,
//!   visual probes and the `UVF1`/`KMF1` binary field formats.
//! * [`fields`]: correlated random scalar fields (Gaussian random fields and
//!   gradient noise).
//! * [`warps`]: the four refractive displacement families and numerical
//!   inversion of a displacement field.
//! * [`weather`]: fog and lens flare corruptions with their ground-truth maps.
//! * [`metrics`]: PSNR and endpoint error.
//!
//! Displacement fields use the backward-sampling convention throughout:
//! `out(x, y) = in(x + u(x, y), y + v(x, y))`.

// NaN-rejecting checks are written `!(x >= 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fields;
pub mod format;
pub mod io;
pub mod metrics;
pub mod raster;
pub mod sample;
pub mod seed;
pub mod viz;
pub mod warps;
pub mod weather;

pub use error::{Error, Result};
pub use raster::{ImageBuffer, Rgb, ScalarField, UVField};
pub use sample::{bilinear_sample, remap, BorderPolicy};
pub use seed::{derive_seed, PurposeTag, SeedSpec};
