//! Concave fractional surrogate of the logistic objective.
//!
//! At an anchor `G0` the logistic score `S(G) = a + b/(c + G^{-e})` is
//! minorized by
//!
//! ```text
//! zeta(G) = D + E * S_k / (F * S_k + G * I_k)
//! ```
//!
//! where `S_k` is the signal power, `I_k` the (power-normalized)
//! interference-plus-noise, and `G = S_k / I_k`. The coefficients depend on
//! the exponent branch:
//!
//! - `e <= 1`:  D = a, E = b, F = c + (1-e) G0^{-e}, G = e G0^{1-e}; the
//!   bound is global and for `e = 1` it is tight everywhere (F = c, G = 1).
//! - `e > 1`:   with `q = c (1-e) G0^e + 1`: D = a + b (1-e) G0^e / q,
//!   E = b e G0^{e-1} / q, F = c e G0^{e-1}, G = q. When `q < 0` the
//!   surrogate has a pole at `G = -G/F < G0` and minorizes only on the
//!   branch `F * S + G * I > 0` containing the anchor; evaluation outside
//!   that branch is reported as an error rather than returned.
//!
//! Both branches are tangent at the anchor: `zeta(G0) = S(G0)` exactly.

use crate::beamforming::logistic::LogisticParams;
use crate::error::{Error, Result};

/// Coefficients of the fractional surrogate at a fixed anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateCoeffs {
    /// Constant offset (the printed `D`).
    pub offset: f64,
    /// Numerator scale on the signal ratio (the printed `E`).
    pub scale: f64,
    /// Signal weight in the denominator (the printed `F`).
    pub sig_w: f64,
    /// Interference-plus-noise weight in the denominator (the printed `G`).
    pub noise_w: f64,
    /// The anchor `G0` the coefficients were computed at.
    pub anchor: f64,
}

/// Compute the branch-correct surrogate coefficients at anchor `gamma0`.
pub fn surrogate_coeffs(gamma0: f64, p: &LogisticParams) -> Result<SurrogateCoeffs> {
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(Error::DegenerateInput(format!(
            "surrogate anchor must be positive and finite, got {gamma0}"
        )));
    }
    let (a, b, c, e) = (p.a, p.b, p.c, p.e);
    if e <= 1.0 {
        Ok(SurrogateCoeffs {
            offset: a,
            scale: b,
            sig_w: c + (1.0 - e) * gamma0.powf(-e),
            noise_w: e * gamma0.powf(1.0 - e),
            anchor: gamma0,
        })
    } else {
        let q = c * (1.0 - e) * gamma0.powf(e) + 1.0;
        if q.abs() < 1e-9 {
            return Err(Error::AnchorSingularity { anchor: gamma0, denom: q });
        }
        Ok(SurrogateCoeffs {
            offset: a + b * (1.0 - e) * gamma0.powf(e) / q,
            scale: b * e * gamma0.powf(e - 1.0) / q,
            sig_w: c * e * gamma0.powf(e - 1.0),
            noise_w: q,
            anchor: gamma0,
        })
    }
}

/// Evaluate the surrogate at signal power `signal` and combined
/// interference-plus-noise `inplusnoise`.
///
/// Errors when the denominator `F * signal + G * inplusnoise` is not
/// positive: that configuration lies outside the surrogate's branch of
/// validity (possible only for `e > 1` anchors with `G < 0`).
pub fn zeta(signal: f64, inplusnoise: f64, coeffs: &SurrogateCoeffs) -> Result<f64> {
    if signal < 0.0 || inplusnoise < 0.0 {
        return Err(Error::DegenerateInput(
            "zeta needs nonnegative signal and interference-plus-noise".into(),
        ));
    }
    let den = coeffs.sig_w * signal + coeffs.noise_w * inplusnoise;
    if !(den > 0.0) {
        return Err(Error::NumericalFailure(format!(
            "surrogate denominator {den:.3e} is not positive (outside validity branch)"
        )));
    }
    Ok(coeffs.offset + coeffs.scale * signal / den)
}
