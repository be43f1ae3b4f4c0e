//! Per-user metrics rows and their CSV/JSON serialization.
//!
//! Column order is fixed; floats are written with 17 significant digits so
//! a parsed value is bitwise equal to the value that was written.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use semcom_core::{Error, Result};

/// Which pipeline produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowMode {
    /// Uncorrelated scenario.
    Single,
    /// Correlated scenario, cooperative pipeline.
    Comp,
    /// Correlated scenario, non-cooperative baseline.
    NonComp,
}

impl RowMode {
    fn as_str(&self) -> &'static str {
        match self {
            RowMode::Single => "single",
            RowMode::Comp => "comp",
            RowMode::NonComp => "non-comp",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(RowMode::Single),
            "comp" => Ok(RowMode::Comp),
            "non-comp" => Ok(RowMode::NonComp),
            other => Err(Error::Format { offset: 0, what: format!("bad row mode '{other}'") }),
        }
    }
}

/// One user in one (seed, SNR) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub seed: u64,
    pub snr_db: f64,
    pub user: usize,
    /// MSE of the amplitude-equalized latent before denoising.
    pub latent_mse_pre: f64,
    /// MSE of the denoised latent (equals pre when denoising is off).
    pub latent_mse_post: f64,
    pub alpha: f64,
    pub tau: f64,
    pub gamma: f64,
    /// Cell objective (sum of logistic scores), repeated on each user row.
    pub objective: f64,
    pub group_id: usize,
    /// Pair phase residual; empty for singletons and uncorrelated rows.
    pub phase_residual: Option<f64>,
    pub mode: RowMode,
}

pub const COLUMNS: [&str; 12] = [
    "seed",
    "snr_db",
    "user",
    "latent_mse_pre",
    "latent_mse_post",
    "alpha",
    "tau",
    "gamma",
    "objective",
    "group_id",
    "phase_residual",
    "mode",
];

/// 17-significant-digit float formatting; round-trips f64 bitwise.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize rows to CSV with the fixed column order.
pub fn to_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::new();
    out.push_str(&COLUMNS.join(","));
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.seed,
            fmt_f64(r.snr_db),
            r.user,
            fmt_f64(r.latent_mse_pre),
            fmt_f64(r.latent_mse_post),
            fmt_f64(r.alpha),
            fmt_f64(r.tau),
            fmt_f64(r.gamma),
            fmt_f64(r.objective),
            r.group_id,
            r.phase_residual.map(fmt_f64).unwrap_or_default(),
            r.mode.as_str(),
        );
    }
    out
}

/// Parse CSV produced by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<MetricsRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or(Error::Format { offset: 0, what: "empty metrics file".into() })?;
    if header != COLUMNS.join(",") {
        return Err(Error::Format { offset: 0, what: format!("unexpected header '{header}'") });
    }
    let mut rows = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != COLUMNS.len() {
            return Err(Error::Format {
                offset: (ln + 1) as u64,
                what: format!("expected {} fields, got {}", COLUMNS.len(), f.len()),
            });
        }
        let bad = |what: String| Error::Format { offset: (ln + 1) as u64, what };
        let pf = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("bad float '{s}': {e}")));
        rows.push(MetricsRow {
            seed: f[0].parse().map_err(|e| bad(format!("bad seed: {e}")))?,
            snr_db: pf(f[1])?,
            user: f[2].parse().map_err(|e| bad(format!("bad user: {e}")))?,
            latent_mse_pre: pf(f[3])?,
            latent_mse_post: pf(f[4])?,
            alpha: pf(f[5])?,
            tau: pf(f[6])?,
            gamma: pf(f[7])?,
            objective: pf(f[8])?,
            group_id: f[9].parse().map_err(|e| bad(format!("bad group_id: {e}")))?,
            phase_residual: if f[10].is_empty() { None } else { Some(pf(f[10])?) },
            mode: RowMode::parse(f[11])?,
        });
    }
    Ok(rows)
}

/// Serialize rows to pretty JSON (an array of row objects).
pub fn to_json(rows: &[MetricsRow]) -> Result<String> {
    serde_json::to_string_pretty(rows)
        .map_err(|e| Error::NumericalFailure(format!("json encode failed: {e}")))
}

pub fn parse_json(text: &str) -> Result<Vec<MetricsRow>> {
    serde_json::from_str(text)
        .map_err(|e| Error::Format { offset: 0, what: format!("json parse failed: {e}") })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidConfig(format!("format must be csv or json, got {other}"))),
        }
    }
}

/// Write rows to `path` in the requested format.
pub fn emit<P: AsRef<Path>>(rows: &[MetricsRow], format: OutputFormat, path: P) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => to_csv(rows),
        OutputFormat::Json => to_json(rows)?,
    };
    std::fs::write(&path, text).map_err(|e| {
        Error::NumericalFailure(format!("cannot write {}: {e}", path.as_ref().display()))
    })
}
