//! Checkerboard probes: the refractive corruptions of a config applied to a
//! synthetic board, for eyeballing a warp.

use std::path::{Path, PathBuf};

use distortkit_core::io::save_png;
use distortkit_core::viz::render_checkerboard;

use crate::config::GenerationConfig;
use crate::corruption::apply;
use crate::error::{PipelineError, Result};
use crate::generate::{plan, write_outcome};

#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub corruption: crate::config::Corruption,
    pub image: PathBuf,
    pub visualization: PathBuf,
}

pub const BOARD_NAME: &str = "checkerboard.png";

/// Writes `checkerboard.png` plus `checkerboard.<corruption>.{png,uvf,viz.png}`
/// for each refractive corruption the config can select. Probe `i` uses
/// stream id `i` in canonical corruption order.
pub fn run_checkerboard(cfg: &GenerationConfig, output: &Path) -> Result<Vec<Probe>> {
    cfg.validate()?;
    let refractive: Vec<_> = cfg
        .selection()?
        .corruptions()
        .into_iter()
        .filter(|c| c.is_refractive())
        .collect();
    if refractive.is_empty() {
        return Err(PipelineError::config(
            "corruption",
            "checkerboard probes need at least one refractive corruption",
        ));
    }
    std::fs::create_dir_all(output).map_err(|e| PipelineError::io(output, e))?;
    let cb = cfg.checkerboard;
    let board = render_checkerboard(cb.width, cb.height, cb.cell)?;
    let board_path = output.join(BOARD_NAME);
    save_png(&board_path, &board).map_err(|e| PipelineError::core(&board_path, e))?;

    let mut probes = Vec::with_capacity(refractive.len());
    for (i, corruption) in refractive.into_iter().enumerate() {
        let (params, field_seed) = plan(cfg, corruption, i as u64, cb.width, cb.height)?;
        let outcome = apply(&params, &board, field_seed)?;
        let files = write_outcome(output, &format!("checkerboard.{corruption}"), &outcome, true, false)?;
        probes.push(Probe {
            corruption,
            image: output.join(files.image),
            visualization: output.join(files.visualization.expect("visualisation requested")),
        });
    }
    Ok(probes)
}
