use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavelab::config::{ExperimentConfig, FilterSpec};
use wavelab::output::write_run;
use wavelab::presets::{preset, NAMES};
use wavelab::runner::{run, CurveData};
use wavelab_core::filters::make_filter;
use wavelab_core::grid::Numerology;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "wavelab", version, about = "Multicarrier waveform experiments: PAPR, spectrum and bit error rate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write CSV curves plus manifest.toml.
    Run {
        config: PathBuf,
        /// Worker threads for Monte Carlo trials; results do not depend on it.
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to `output_dir` from the config, then `results/<name>`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in config.
    Preset { name: String },
    /// Prototype filter utilities.
    Filters {
        #[command(subcommand)]
        command: FiltersCommand,
    },
}

#[derive(Subcommand)]
enum FiltersCommand {
    /// Write the taps of a prototype filter as CSV (index, value).
    Export {
        /// rectangular, hermite, phydyas, iota, rrc or egf
        kind: String,
        #[arg(long, default_value_t = 64)]
        subcarriers: usize,
        #[arg(long, default_value_t = 15e3)]
        spacing_hz: f64,
        #[arg(long, default_value_t = 4)]
        oversampling: usize,
        #[arg(long, default_value_t = 4)]
        overlap: usize,
        #[arg(long)]
        roll_off: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Failure with its exit code.
struct Failure(u8, String);

fn config_error(msg: impl Into<String>) -> Failure {
    Failure(EXIT_CONFIG, msg.into())
}

fn runtime_error(msg: impl ToString) -> Failure {
    Failure(EXIT_RUNTIME, msg.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, workers, seed, out } => run_command(&config, workers, seed, out),
        Command::Preset { name } => match preset(&name) {
            Some(text) => {
                print!("{text}");
                Ok(())
            }
            None => Err(config_error(format!(
                "unknown preset '{name}'; available presets: {}",
                NAMES.join(", ")
            ))),
        },
        Command::Filters { command: FiltersCommand::Export { kind, subcarriers, spacing_hz, oversampling, overlap, roll_off, alpha, out } } => {
            export_filter(&kind, subcarriers, spacing_hz, oversampling, overlap, roll_off, alpha, out.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run_command(path: &Path, workers: usize, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let source = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    let mut config = ExperimentConfig::parse(&source).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let dir = out
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| Path::new("results").join(&config.name));
    eprintln!(
        "running {} ({}, {} curves, {workers} workers)",
        config.name,
        config.experiment.name(),
        config.curves().len()
    );
    let result = run(&config, workers).map_err(runtime_error)?;
    for c in &result.curves {
        if let CurveData::Ber { cp_too_short: true, .. } = c.data {
            eprintln!("warning: {}: channel delay spread exceeded the cyclic prefix", c.spec.name);
        }
    }
    let files = write_run(&dir, &source, &config, &result).map_err(runtime_error)?;
    eprintln!("wrote {} files to {}", files.len(), dir.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn export_filter(
    kind: &str,
    subcarriers: usize,
    spacing_hz: f64,
    oversampling: usize,
    overlap: usize,
    roll_off: Option<f64>,
    alpha: Option<f64>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let spec = FilterSpec::new(kind, overlap, roll_off, alpha).map_err(config_error)?;
    let num = Numerology::new(subcarriers, spacing_hz, oversampling).map_err(|e| config_error(e.to_string()))?;
    let filter = make_filter(spec.kind, num, spec.overlap).map_err(|e| config_error(e.to_string()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_result: Result<(), csv::Error> = (|| {
        w.write_record(["index", "value"])?;
        for (i, v) in filter.taps().iter().enumerate() {
            w.write_record([i.to_string(), v.to_string()])?;
        }
        Ok(())
    })();
    csv_result.map_err(runtime_error)?;
    let bytes = w.into_inner().map_err(|e| runtime_error(e.into_error()))?;
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| runtime_error(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(&bytes).map_err(runtime_error),
    }
}
