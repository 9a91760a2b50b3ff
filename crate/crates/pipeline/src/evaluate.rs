//! Scores a directory of restored frames against a generated manifest.
//!
//! Each record's prediction is the file named like its corrupted output
//! (`<stem>.<corruption>.png`) inside the prediction directory; it is compared
//! with the record's clean input. A prediction UVF of the same stem is
//! optional and, for refractive records, scored against the ground-truth
//! field by endpoint error.

use std::io::Write;
use std::path::{Path, PathBuf};

use distortkit_core::format::read_uvf;
use distortkit_core::io::load_png;
use distortkit_core::metrics::{epe, psnr, MetricSummary, PairMetrics};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PipelineError, Result};
use crate::generate::{read_manifest, GenerationRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub pairs: Vec<PairMetrics>,
    pub summary: MetricSummary,
    /// Expected prediction files that do not exist.
    pub missing: Vec<PathBuf>,
}

fn score(record: &GenerationRecord, pred_dir: &Path, gt_dir: &Path) -> Result<PairMetrics> {
    let pred_path = pred_dir.join(&record.outputs.image);
    let pred = load_png(&pred_path).map_err(|e| PipelineError::core(&pred_path, e))?;
    let clean = load_png(&record.input).map_err(|e| PipelineError::core(&record.input, e))?;
    let psnr = psnr(&pred, &clean).map_err(|e| PipelineError::core(&pred_path, e))?;

    let epe = if record.corruption().is_refractive() {
        let flow_path = pred_dir.join(&record.outputs.ground_truth);
        if flow_path.is_file() {
            let gt_path = gt_dir.join(&record.outputs.ground_truth);
            let gt = read_uvf(&gt_path).map_err(|e| PipelineError::core(&gt_path, e))?;
            let pred_flow = read_uvf(&flow_path).map_err(|e| PipelineError::core(&flow_path, e))?;
            Some(epe(&pred_flow, &gt).map_err(|e| PipelineError::core(&flow_path, e))?)
        } else {
            None
        }
    } else {
        None
    };
    Ok(PairMetrics {
        id: record.outputs.image.clone(),
        psnr,
        epe,
    })
}

/// Scores every record that has a prediction; missing predictions are
/// collected, not fatal.
pub fn run_metrics(pred_dir: &Path, manifest: &Path) -> Result<MetricsReport> {
    let records = read_manifest(manifest)?;
    let gt_dir = manifest.parent().unwrap_or(Path::new(""));
    let missing: Vec<PathBuf> = records
        .iter()
        .map(|r| pred_dir.join(&r.outputs.image))
        .filter(|p| !p.is_file())
        .collect();
    let present: Vec<&GenerationRecord> = records
        .iter()
        .filter(|r| pred_dir.join(&r.outputs.image).is_file())
        .collect();
    let pairs = present
        .par_iter()
        .map(|r| score(r, pred_dir, gt_dir))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricsReport {
        summary: MetricSummary::from_pairs(&pairs),
        pairs,
        missing,
    })
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a MetricSummary,
}

/// One JSON line per pair followed by a `{"summary": ...}` line.
pub fn write_report(report: &MetricsReport, mut out: impl Write) -> std::io::Result<()> {
    for p in &report.pairs {
        writeln!(out, "{}", serde_json::to_string(p).expect("metrics serialise"))?;
    }
    let summary = SummaryLine {
        summary: &report.summary,
    };
    writeln!(out, "{}", serde_json::to_string(&summary).expect("metrics serialise"))
}
