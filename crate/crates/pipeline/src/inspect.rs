//! Summary statistics and a visualisation of a UVF or KMF file.

use std::path::{Path, PathBuf};

use distortkit_core::format::{decode_kmf, decode_uvf, sniff, FieldKind};
use distortkit_core::io::save_png;
use distortkit_core::viz::{visualize_scalar, visualize_uv};
use serde::Serialize;

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelStats {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl ChannelStats {
    fn of(name: &'static str, values: &[f64]) -> Self {
        let (min, max) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        Self {
            name,
            min,
            max,
            mean: values.iter().sum::<f64>() / values.len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InspectReport {
    pub file: PathBuf,
    pub format: &'static str,
    pub width: usize,
    pub height: usize,
    pub channels: Vec<ChannelStats>,
    pub visualization: PathBuf,
}

/// Default visualisation path: the input path with `.png` appended.
pub fn default_visualization_path(file: &Path) -> PathBuf {
    let mut s = file.as_os_str().to_owned();
    s.push(".png");
    PathBuf::from(s)
}

/// UV fields are drawn with the symmetric red/green encoding at the field's
/// own peak magnitude; maps are stretched to grey.
pub fn run_inspect(file: &Path, output: Option<&Path>) -> Result<InspectReport> {
    let bytes = std::fs::read(file).map_err(|e| PipelineError::io(file, e))?;
    let fail = |e: distortkit_core::Error| PipelineError::core(file, e);
    let kind = sniff(&bytes).map_err(|e| fail(e.into()))?;
    let (format, dims, channels, image) = match kind {
        FieldKind::Uvf => {
            let f = decode_uvf(&bytes).map_err(fail)?;
            let peak = f.max_magnitude();
            let img = visualize_uv(&f, if peak > 0.0 { peak } else { 1.0 }).map_err(fail)?;
            let stats = vec![ChannelStats::of("u", f.u()), ChannelStats::of("v", f.v())];
            ("UVF1", f.dims(), stats, img)
        }
        FieldKind::Kmf => {
            let m = decode_kmf(&bytes).map_err(fail)?;
            let img = visualize_scalar(&m).map_err(fail)?;
            ("KMF1", m.dims(), vec![ChannelStats::of("value", m.values())], img)
        }
    };
    let visualization = output.map_or_else(|| default_visualization_path(file), Path::to_path_buf);
    save_png(&visualization, &image).map_err(|e| PipelineError::core(&visualization, e))?;
    Ok(InspectReport {
        file: file.to_path_buf(),
        format,
        width: dims.0,
        height: dims.1,
        channels,
        visualization,
    })
}
