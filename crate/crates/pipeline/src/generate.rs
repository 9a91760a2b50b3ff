//! Batch generation over a directory of clean PNG frames.
//!
//! Inputs are the `.png` files of the input directory in byte-wise filename
//! order; the position in that order is the stream id. Per input:
//!
//! * the corruption is one weighted draw from `derive_seed(g, i, Select)`,
//! * range parameters are drawn from `derive_seed(g, i, Params)`,
//! * random fields use `derive_seed(g, i, Field)`.
//!
//! Records are processed in parallel on a dedicated pool and the manifest is
//! written in stream order, so the worker count never changes any output.

use std::ffi::OsStr;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use distortkit_core::format::{write_kmf, write_uvf};
use distortkit_core::io::{load_png, save_png};
use distortkit_core::seed::{derive_seed, rng_from_seed, PurposeTag, SeedSpec};
use distortkit_core::ImageBuffer;
use log::{info, warn};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Corruption, GenerationConfig, Selection};
use crate::corruption::{apply, sample_params, CorruptionParams, GroundTruth, Outcome};
use crate::error::{PipelineError, Result};

pub const MANIFEST_NAME: &str = "manifest.jsonl";

/// Output file names, relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFiles {
    pub image: String,
    pub ground_truth: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visualization: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transmission: Option<String>,
}

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub stream_id: u64,
    /// Clean input frame.
    pub input: PathBuf,
    pub width: usize,
    pub height: usize,
    pub global_seed: u64,
    pub field_seed: u64,
    #[serde(flatten)]
    pub params: CorruptionParams,
    pub outputs: OutputFiles,
}

impl GenerationRecord {
    pub fn corruption(&self) -> Corruption {
        self.params.corruption()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedInput {
    pub input: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct GenerateReport {
    pub records: Vec<GenerationRecord>,
    pub skipped: Vec<SkippedInput>,
    pub manifest: PathBuf,
}

/// PNG files of `dir`, sorted by file name.
pub fn list_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| PipelineError::io(dir, e))?;
        let path = entry.path();
        let is_png = path
            .extension()
            .and_then(OsStr::to_str)
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            files.push(path);
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Corruption for stream `index`. A single corruption draws nothing.
pub fn select_corruption(selection: &Selection, global_seed: u64, index: u64) -> Corruption {
    match selection {
        Selection::Single(c) => *c,
        Selection::Mix(entries) => {
            let dist = WeightedIndex::new(entries.iter().map(|(_, w)| *w)).expect("validated mix weights");
            let mut rng = rng_from_seed(derive_seed(SeedSpec::new(global_seed, index, PurposeTag::Select)));
            entries[dist.sample(&mut rng)].0
        }
    }
}

/// Parameters and field seed for stream `index`.
pub fn plan(
    cfg: &GenerationConfig,
    corruption: Corruption,
    index: u64,
    width: usize,
    height: usize,
) -> Result<(CorruptionParams, u64)> {
    let g = cfg.seed;
    let field_seed = derive_seed(SeedSpec::new(g, index, PurposeTag::Field));
    let mut rng = rng_from_seed(derive_seed(SeedSpec::new(g, index, PurposeTag::Params)));
    let params = sample_params(cfg, corruption, width, height, &mut rng, field_seed)?;
    Ok((params, field_seed))
}

/// Re-runs a record on its clean frame.
pub fn replay(record: &GenerationRecord, clean: &ImageBuffer) -> Result<Outcome> {
    if clean.dims() != (record.width, record.height) {
        return Err(distortkit_core::Error::SizeMismatch {
            expected: (record.width, record.height),
            actual: clean.dims(),
        }
        .into());
    }
    apply(&record.params, clean, record.field_seed)
}

fn output_stem(input: &Path) -> String {
    input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Writes an outcome under `dir` as `<base>.png`, `<base>.uvf|kmf`, and
/// optionally `<base>.viz.png` and `<base>.t.kmf`.
pub fn write_outcome(dir: &Path, base: &str, outcome: &Outcome, viz: bool, transmission: bool) -> Result<OutputFiles> {
    let image = format!("{base}.png");
    let at = |name: &str| dir.join(name);
    save_png(at(&image), &outcome.image).map_err(|e| PipelineError::core(at(&image), e))?;

    let ground_truth = format!("{base}.{}", outcome.truth.extension());
    match &outcome.truth {
        GroundTruth::Flow(f) => write_uvf(at(&ground_truth), f),
        GroundTruth::Map(m) => write_kmf(at(&ground_truth), m),
    }
    .map_err(|e| PipelineError::core(at(&ground_truth), e))?;

    let visualization = if viz {
        let name = format!("{base}.viz.png");
        save_png(at(&name), &outcome.truth.visualize()?).map_err(|e| PipelineError::core(at(&name), e))?;
        Some(name)
    } else {
        None
    };

    let transmission = match (&outcome.transmission, transmission) {
        (Some(t), true) => {
            let name = format!("{base}.t.kmf");
            write_kmf(at(&name), t).map_err(|e| PipelineError::core(at(&name), e))?;
            Some(name)
        }
        _ => None,
    };

    Ok(OutputFiles {
        image,
        ground_truth,
        visualization,
        transmission,
    })
}

fn process(cfg: &GenerationConfig, selection: &Selection, out: &Path, index: u64, input: &Path) -> Result<GenerationRecord> {
    let clean = load_png(input).map_err(|e| PipelineError::core(input, e))?;
    let (w, h) = clean.dims();
    let corruption = select_corruption(selection, cfg.seed, index);
    let (params, field_seed) = plan(cfg, corruption, index, w, h)?;
    let outcome = apply(&params, &clean, field_seed).map_err(|e| match e {
        PipelineError::Compute(e) => PipelineError::core(input, e),
        other => other,
    })?;
    let base = format!("{}.{corruption}", output_stem(input));
    let outputs = write_outcome(out, &base, &outcome, cfg.emit_viz, cfg.emit_transmission)?;
    Ok(GenerationRecord {
        stream_id: index,
        input: input.to_path_buf(),
        width: w,
        height: h,
        global_seed: cfg.seed,
        field_seed,
        params,
        outputs,
    })
}

pub fn write_manifest(path: &Path, records: &[GenerationRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| PipelineError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("records always serialise");
        writeln!(w, "{line}").map_err(|e| PipelineError::io(path, e))?;
    }
    w.flush().map_err(|e| PipelineError::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Vec<GenerationRecord>> {
    let file = fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| PipelineError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| PipelineError::Manifest {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Runs the whole batch. Inputs that fail to decode or corrupt are logged
/// and listed in [`GenerateReport::skipped`].
pub fn run_generate(cfg: &GenerationConfig) -> Result<GenerateReport> {
    cfg.validate()?;
    let selection = cfg.selection()?;
    let input = cfg
        .input
        .as_deref()
        .ok_or_else(|| PipelineError::config("input", "missing input directory"))?;
    let output = cfg
        .output
        .as_deref()
        .ok_or_else(|| PipelineError::config("output", "missing output directory"))?;

    let inputs = list_inputs(input)?;
    if inputs.is_empty() {
        return Err(PipelineError::NoInputs(input.to_path_buf()));
    }
    fs::create_dir_all(output).map_err(|e| PipelineError::io(output, e))?;
    // Fail before doing any work if the output directory is not writable.
    let manifest = output.join(MANIFEST_NAME);
    write_manifest(&manifest, &[])?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build()
        .map_err(|e| PipelineError::config("workers", e.to_string()))?;
    info!("generating {} inputs on {} workers", inputs.len(), cfg.worker_count());
    let results: Vec<Result<GenerationRecord>> = pool.install(|| {
        inputs
            .par_iter()
            .enumerate()
            .map(|(i, path)| process(cfg, &selection, output, i as u64, path))
            .collect()
    });

    let mut records = Vec::with_capacity(results.len());
    let mut skipped = Vec::new();
    for (path, result) in inputs.iter().zip(results) {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                warn!("skipping {}: {e}", path.display());
                skipped.push(SkippedInput {
                    input: path.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }
    write_manifest(&manifest, &records)?;
    Ok(GenerateReport {
        records,
        skipped,
        manifest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_corruption_ignores_seed() {
        let sel = Selection::Single(Corruption::LensFlare);
        assert!((0..50).all(|i| select_corruption(&sel, 9, i) == Corruption::LensFlare));
    }

    #[test]
    fn equal_mix_is_balanced() {
        let sel = Selection::Mix(Corruption::ALL.iter().map(|&c| (c, 1.0)).collect());
        let mut totals = [0usize; 7];
        for g in 0..10u64 {
            let mut counts = [0usize; 7];
            for i in 0..70 {
                let c = select_corruption(&sel, g, i);
                counts[Corruption::ALL.iter().position(|&x| x == c).unwrap()] += 1;
            }
            assert_eq!(counts.iter().sum::<usize>(), 70);
            assert!(counts.iter().all(|&n| (1..=69).contains(&n)), "{counts:?}");
            for (t, n) in totals.iter_mut().zip(counts) {
                *t += n;
            }
        }
        for t in totals {
            let share = t as f64 / 700.0;
            assert!((share - 1.0 / 7.0).abs() <= 0.15, "{share}");
        }
    }

    #[test]
    fn record_round_trips_through_json() {
        let cfg = GenerationConfig::from_toml_str("corruption = \"tps\"", Path::new("t.toml")).unwrap();
        let (params, field_seed) = plan(&cfg, Corruption::Tps, 3, 40, 30).unwrap();
        let record = GenerationRecord {
            stream_id: 3,
            input: PathBuf::from("in/a.png"),
            width: 40,
            height: 30,
            global_seed: 0,
            field_seed,
            params,
            outputs: OutputFiles {
                image: "a.tps.png".into(),
                ground_truth: "a.tps.uvf".into(),
                visualization: None,
                transmission: None,
            },
        };
        let line = serde_json::to_string(&record).unwrap();
        assert!(line.contains("\"corruption\":\"tps\""));
        assert!(!line.contains("visualization"));
        assert_eq!(serde_json::from_str::<GenerationRecord>(&line).unwrap(), record);
    }
}
