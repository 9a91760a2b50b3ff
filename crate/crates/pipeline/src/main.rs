use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distortkit::checkerboard::run_checkerboard;
use distortkit::evaluate::{run_metrics, write_report};
use distortkit::exit;
use distortkit::inspect::run_inspect;
use distortkit::{run_generate, GenerationConfig, PipelineError};

#[derive(Parser)]
#[command(name = "distortkit", version, about = "Paired corruption dataset generator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corrupt every PNG of the input directory and write a manifest.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides the config's global seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write ground-truth visualisations.
        #[arg(long)]
        viz: bool,
    },
    /// Print statistics of a UVF or KMF file and render it to PNG.
    Inspect {
        file: PathBuf,
        /// Visualisation path; defaults to the file name with `.png` appended.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score restored frames against a manifest (PSNR, and EPE where a UVF is given).
    Metrics {
        /// Directory of predictions named like the corrupted outputs.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Report file; defaults to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Render checkerboard probes for the refractive corruptions of a config.
    Checkerboard {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<i32, PipelineError> {
    match cli.command {
        Command::Generate {
            config,
            input,
            output,
            seed,
            workers,
            viz,
        } => {
            let mut cfg = GenerationConfig::load(&config)?;
            cfg.input = input.or(cfg.input);
            cfg.output = output.or(cfg.output);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.workers = workers.or(cfg.workers);
            cfg.emit_viz |= viz;
            let report = run_generate(&cfg)?;
            println!(
                "wrote {} records to {} ({} skipped)",
                report.records.len(),
                report.manifest.display(),
                report.skipped.len()
            );
            for s in &report.skipped {
                eprintln!("skipped {}: {}", s.input.display(), s.reason);
            }
            Ok(if report.skipped.is_empty() {
                exit::SUCCESS
            } else {
                exit::PARTIAL_FAILURE
            })
        }
        Command::Inspect { file, output } => {
            let report = run_inspect(&file, output.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serialises"));
            Ok(exit::SUCCESS)
        }
        Command::Metrics {
            input,
            manifest,
            output,
        } => {
            let report = run_metrics(&input, &manifest)?;
            match &output {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|e| PipelineError::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    write_report(&report, std::io::BufWriter::new(file))
                }
                None => write_report(&report, std::io::stdout().lock()),
            }
            .map_err(|e| PipelineError::Io {
                path: output.unwrap_or_else(|| PathBuf::from("<stdout>")),
                source: e,
            })?;
            for m in &report.missing {
                eprintln!("missing prediction: {}", m.display());
            }
            Ok(if report.missing.is_empty() {
                exit::SUCCESS
            } else {
                exit::MISSING_PAIRS
            })
        }
        Command::Checkerboard { config, output, seed } => {
            let mut cfg = GenerationConfig::load(&config)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            let dir = output
                .or(cfg.output.clone())
                .ok_or_else(|| PipelineError::Config {
                    path: "output".into(),
                    reason: "missing output directory".into(),
                })?;
            for probe in run_checkerboard(&cfg, &dir)? {
                println!("{}: {}", probe.corruption, probe.image.display());
            }
            Ok(exit::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit::CONFIG_OR_INPUT
        }
    };
    ExitCode::from(code as u8)
}
