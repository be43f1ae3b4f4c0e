//! `semcom` command line: seeded Monte Carlo experiments for the
//! shuffle-orthogonalized multi-user downlink, logistic curve fitting, and
//! Gaussianity diagnostics.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use semcom_cli::config::{parse_source_spec, ExperimentConfig};
use semcom_cli::metrics::{emit, OutputFormat};
use semcom_cli::runner::{bench_beamforming, run_correlated, run_uncorrelated};
use semcom_core::beamforming::fit_logistic;
use semcom_core::numerics::rng::RngStream;
use semcom_core::shuffle::gaussianization_report;
use semcom_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "semcom",
    version,
    about = "Latent-domain multi-user MISO semantic communication simulator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate the semantics-uncorrelated downlink scenario
    SimulateUncorrelated {
        /// Experiment config (JSON, strict schema)
        #[arg(long)]
        config: PathBuf,
        /// Output file for the metrics table
        #[arg(long)]
        out: PathBuf,
        /// Output format: csv or json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Simulate the semantics-correlated scenario (cooperative + baseline)
    SimulateCorrelated {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Fit the logistic quality curve to (gamma_db, score) CSV samples
    FitLogistic {
        /// CSV file with `gamma_db,score` rows (optional header)
        #[arg(long)]
        samples: PathBuf,
        /// Output JSON file for the fitted parameters
        #[arg(long)]
        out: PathBuf,
    },
    /// Gaussianity diagnostics of cross-demapped interference
    GaussianityReport {
        /// Source spec `structure:dim[:params]`, e.g. ar1:512:0.9
        #[arg(long)]
        source: String,
        /// Number of latent vectors to pool
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solver traces for the proposed beamformer across the config grid
    BenchBeamforming {
        #[arg(long)]
        config: PathBuf,
        /// Output JSON file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_samples_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let a = parts.next().unwrap_or("").trim();
        let b = parts.next().unwrap_or("").trim();
        if ln == 0 && a.parse::<f64>().is_err() {
            continue; // header line
        }
        let gamma_db: f64 = a.parse().map_err(|e| Error::Format {
            offset: ln as u64,
            what: format!("bad gamma_db '{a}': {e}"),
        })?;
        let score: f64 = b.parse().map_err(|e| Error::Format {
            offset: ln as u64,
            what: format!("bad score '{b}': {e}"),
        })?;
        out.push((gamma_db, score));
    }
    Ok(out)
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::NumericalFailure(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::SimulateUncorrelated { config, out, format } => {
            let format: OutputFormat = format.parse()?;
            let cfg = ExperimentConfig::load(config)?;
            let rows = run_uncorrelated(&cfg, None)?;
            emit(&rows, format, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Cmd::SimulateCorrelated { config, out, format } => {
            let format: OutputFormat = format.parse()?;
            let cfg = ExperimentConfig::load(config)?;
            let rows = run_correlated(&cfg, None)?;
            emit(&rows, format, &out)?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Cmd::FitLogistic { samples, out } => {
            let text = std::fs::read_to_string(&samples).map_err(|e| {
                Error::InvalidConfig(format!("cannot read {}: {e}", samples.display()))
            })?;
            let pairs = parse_samples_csv(&text)?;
            let fit = fit_logistic(&pairs)?;
            let doc = serde_json::json!({
                "a": fit.params.a,
                "b": fit.params.b,
                "c": fit.params.c,
                "d": fit.params.d,
                "e": fit.params.e,
                "residual_rmse": fit.residual_rmse,
            });
            let text = serde_json::to_string_pretty(&doc)
                .map_err(|e| Error::NumericalFailure(format!("json encode failed: {e}")))?;
            write_or_print(Some(&out), &text)?;
            eprintln!("fit written to {}", out.display());
            Ok(())
        }
        Cmd::GaussianityReport { source, samples, seed } => {
            let cfg = parse_source_spec(&source)?;
            let mut rng = RngStream::new(seed, 0x67617573);
            let report = gaussianization_report(&cfg, samples, &mut rng)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| Error::NumericalFailure(format!("json encode failed: {e}")))?;
            println!("{text}");
            Ok(())
        }
        Cmd::BenchBeamforming { config, out } => {
            let cfg = ExperimentConfig::load(config)?;
            let records = bench_beamforming(&cfg)?;
            let text = serde_json::to_string_pretty(&records)
                .map_err(|e| Error::NumericalFailure(format!("json encode failed: {e}")))?;
            write_or_print(out.as_ref(), &text)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
