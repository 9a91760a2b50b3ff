//! Config-driven batch generation of corrupted/clean frame pairs with ground
//! truth, plus the inspection, scoring and checkerboard tools behind the
//! `distortkit` binary.

pub mod checkerboard;
pub mod config;
pub mod corruption;
pub mod error;
pub mod evaluate;
pub mod generate;
pub mod inspect;

pub use config::{Corruption, GenerationConfig, Range, Selection};
pub use corruption::{apply, CorruptionParams, GroundTruth, Outcome};
pub use error::{PipelineError, Result};
pub use generate::{read_manifest, replay, run_generate, GenerateReport, GenerationRecord, MANIFEST_NAME};

/// Process exit statuses of the CLI.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG_OR_INPUT: i32 = 1;
    pub const PARTIAL_FAILURE: i32 = 2;
    pub const MISSING_PAIRS: i32 = 3;
}
