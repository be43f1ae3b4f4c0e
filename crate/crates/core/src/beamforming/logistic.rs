//! Generalized logistic model of reconstruction quality versus SINR.
//!
//! `S(gamma) = a + b / (c + gamma^{-e})`, equivalently
//! `a + b / (c + exp(-d * gamma_dB))` with `e = 10 d / ln 10`. The curve is
//! monotone increasing for `b, c, e > 0` and saturates at `a + b/c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN10: f64 = std::f64::consts::LN_10;

/// Parameters of the reconstruction-quality curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// dB-domain slope; tied to `e` by `e = 10 d / ln 10`.
    pub d: f64,
    /// Linear-domain exponent.
    pub e: f64,
}

impl LogisticParams {
    /// Build from the linear form `(a, b, c, e)`; derives `d`.
    pub fn from_linear(a: f64, b: f64, c: f64, e: f64) -> Result<Self> {
        let p = LogisticParams { a, b, c, d: e * LN10 / 10.0, e };
        p.validate()?;
        Ok(p)
    }

    /// Build from the dB form `(a, b, c, d)`; derives `e`.
    pub fn from_db_slope(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = LogisticParams { a, b, c, d, e: 10.0 * d / LN10 };
        p.validate()?;
        Ok(p)
    }

    /// Accept explicit values for both slopes, enforcing consistency.
    pub fn new_checked(a: f64, b: f64, c: f64, d: f64, e: f64) -> Result<Self> {
        if (e - 10.0 * d / LN10).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "inconsistent slopes: e = {e} but 10 d / ln 10 = {}",
                10.0 * d / LN10
            )));
        }
        let p = LogisticParams { a, b, c, d, e };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.c > 0.0 && self.e > 0.0)
            || ![self.a, self.b, self.c, self.d, self.e].iter().all(|v| v.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "logistic params need finite values with b, c, e > 0: {self:?}"
            )));
        }
        Ok(())
    }

    /// Saturation value `a + b/c`.
    pub fn ceiling(&self) -> f64 {
        self.a + self.b / self.c
    }
}

/// Evaluate `S(gamma) = a + b / (c + gamma^{-e})` for `gamma > 0`.
pub fn logistic_score(gamma: f64, p: &LogisticParams) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "logistic score needs gamma > 0, got {gamma}"
        )));
    }
    Ok(p.a + p.b / (p.c + gamma.powf(-p.e)))
}

/// Least-squares fit of the logistic curve to `(gamma_dB, score)` samples.
#[derive(Debug, Clone, Copy)]
pub struct LogisticFit {
    pub params: LogisticParams,
    /// Root-mean-square residual of the fit.
    pub residual_rmse: f64,
}

/// Fit `(a, b, c, e)` by a coarse grid over `(c, e)` with closed-form
/// `(a, b)` per candidate, followed by local pattern-search refinement.
///
/// Needs at least 8 samples spanning at least 10 dB, and rejects data the
/// curve cannot describe (constant or decreasing scores force `b <= 0`).
pub fn fit_logistic(samples: &[(f64, f64)]) -> Result<LogisticFit> {
    if samples.len() < 8 {
        return Err(Error::InsufficientData { needed: 8, got: samples.len() });
    }
    let db_min = samples.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let db_max = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if !(db_max - db_min >= 10.0) {
        return Err(Error::InvalidConfig(format!(
            "samples must span at least 10 dB, got {:.3} dB",
            db_max - db_min
        )));
    }
    let scores: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let smean = scores.iter().sum::<f64>() / scores.len() as f64;
    let svar = scores.iter().map(|s| (s - smean) * (s - smean)).sum::<f64>();
    if svar < 1e-18 * (1.0 + smean * smean) {
        return Err(Error::FitFailed("scores are constant".into()));
    }
    let gammas: Vec<f64> = samples.iter().map(|s| 10f64.powf(s.0 / 10.0)).collect();

    // closed-form (a, b) and SSE for a fixed (c, e); None when b <= 0
    let eval = |log_c: f64, e: f64| -> Option<(f64, f64, f64)> {
        let c = log_c.exp();
        let u: Vec<f64> = gammas.iter().map(|g| 1.0 / (c + g.powf(-e))).collect();
        let um = u.iter().sum::<f64>() / u.len() as f64;
        let mut suu = 0.0;
        let mut sus = 0.0;
        for (ui, si) in u.iter().zip(&scores) {
            suu += (ui - um) * (ui - um);
            sus += (ui - um) * (si - smean);
        }
        if suu < 1e-18 {
            return None;
        }
        let b = sus / suu;
        if b <= 0.0 {
            return None;
        }
        let a = smean - b * um;
        let sse: f64 = u
            .iter()
            .zip(&scores)
            .map(|(ui, si)| {
                let r = a + b * ui - si;
                r * r
            })
            .sum();
        Some((a, b, sse))
    };

    let mut best: Option<(f64, f64, f64, f64, f64)> = None; // (log_c, e, a, b, sse)
    for ci in 0..25 {
        let log_c = -2.0 * LN10 + ci as f64 * (4.0 * LN10 / 24.0);
        for ei in 0..30 {
            let e = 0.05 + ei as f64 * (3.0 - 0.05) / 29.0;
            if let Some((a, b, sse)) = eval(log_c, e) {
                if best.map_or(true, |(_, _, _, _, s)| sse < s) {
                    best = Some((log_c, e, a, b, sse));
                }
            }
        }
    }
    let (mut log_c, mut e, mut a, mut b, mut sse) = best.ok_or_else(|| {
        Error::FitFailed("no candidate with b > 0; scores must increase with SINR".into())
    })?;

    // pattern search on (log c, e)
    let mut step_c = 0.25 * LN10;
    let mut step_e = 0.1;
    for _ in 0..60 {
        let mut improved = false;
        for (dc, de) in [
            (step_c, 0.0),
            (-step_c, 0.0),
            (0.0, step_e),
            (0.0, -step_e),
            (step_c, step_e),
            (step_c, -step_e),
            (-step_c, step_e),
            (-step_c, -step_e),
        ] {
            let ne = e + de;
            if ne <= 1e-3 {
                continue;
            }
            if let Some((na, nb, nsse)) = eval(log_c + dc, ne) {
                if nsse < sse {
                    log_c += dc;
                    e = ne;
                    a = na;
                    b = nb;
                    sse = nsse;
                    improved = true;
                }
            }
        }
        if !improved {
            step_c *= 0.5;
            step_e *= 0.5;
            if step_c < 1e-7 && step_e < 1e-7 {
                break;
            }
        }
    }

    let params = LogisticParams::from_linear(a, b, log_c.exp(), e)?;
    Ok(LogisticFit { params, residual_rmse: (sse / samples.len() as f64).sqrt() })
}
