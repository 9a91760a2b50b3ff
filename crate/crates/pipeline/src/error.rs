use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = PipelineError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Invalid configuration; `path` is the dotted key path of the offending field.
    #[error("config: {path}: {reason}")]
    Config { path: String, reason: String },

    #[error("cannot parse {file}: {reason}")]
    ConfigSyntax { file: PathBuf, reason: String },

    #[error("no PNG images found in {0}")]
    NoInputs(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest {path}, line {line}: {reason}")]
    Manifest { path: PathBuf, line: usize, reason: String },

    #[error("{path}: {source}")]
    Core {
        path: PathBuf,
        #[source]
        source: distortkit_core::Error,
    },

    #[error(transparent)]
    Compute(#[from] distortkit_core::Error),
}

impl PipelineError {
    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        PipelineError::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn core(path: impl Into<PathBuf>, source: distortkit_core::Error) -> Self {
        PipelineError::Core {
            path: path.into(),
            source,
        }
    }
}
