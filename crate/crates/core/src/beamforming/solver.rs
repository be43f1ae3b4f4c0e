//! Majorization-minimization beamformer with quadratic-transform updates.
//!
//! Maximizes the sum of logistic scores of the (optionally semantic-weighted)
//! equivalent SINRs under a total power budget. Each outer iteration:
//!
//! 1. refreshes the per-user surrogate anchors at the current SINRs,
//! 2. updates the quadratic-transform auxiliaries `r_k` in closed form,
//! 3. updates all beams by solving one Hermitian system per user,
//!
//! and is accepted only if the true objective did not decrease (slack 1e-9).
//! A rejected step refreshes the anchors with a small multiplicative
//! perturbation instead of being accepted, so the recorded objective trace
//! is nondecreasing by construction; rejections and diagonal-loading events
//! are reported rather than hidden. The cooperative variant additionally
//! phase-aligns each two-user group after power normalization.
//!
//! For exponents `e > 1` the fractional surrogate stops being a lower bound
//! once `c (1-e) anchor^e + 1` goes negative (it acquires a pole below the
//! anchor and the beam-update system turns indefinite), so anchors are
//! clamped to 0.9x the critical value `(1 / (c (e-1)))^{1/e}`. The clamped
//! surrogate is a valid global minorizer that is merely no longer tangent;
//! the acceptance check keeps the ascent honest.

use num_complex::Complex64;
use serde::Serialize;

use crate::beamforming::logistic::{logistic_score, LogisticParams};
use crate::beamforming::surrogate::{surrogate_coeffs, SurrogateCoeffs};
use crate::channel::{weighted_equivalent_sinr, BeamformerSet, ChannelSet};
use crate::error::{Error, Result};
use crate::grouping::{Grouping, WeightMatrix};
use crate::numerics::complex::{hermitian_solve, inner, CMat};

/// Knobs of the iterative solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Stop when the objective changes by less than this between accepted
    /// iterations.
    pub tol: f64,
    /// Outer iteration cap.
    pub max_iter: usize,
    /// Anchor perturbation retries after a singular anchor or a rejected
    /// (objective-decreasing) step.
    pub anchor_retries: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-6, max_iter: 100, anchor_retries: 5 }
    }
}

/// Outcome bookkeeping of one solver run.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Number of accepted outer iterations.
    pub iterations: usize,
    /// Objective after the initializer and after each accepted iteration.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    pub final_objective: f64,
    /// Times the v-update system needed diagonal loading.
    pub diag_loading_events: usize,
    /// Anchor refreshes forced by singular anchors or rejected steps.
    pub anchor_retries: usize,
    /// Candidate steps rejected for decreasing the objective.
    pub rejected_steps: usize,
}

/// Sum of logistic scores of the (weighted) equivalent SINRs — the quantity
/// every solver here maximizes and reports.
pub fn objective(
    ch: &ChannelSet,
    beams: &BeamformerSet,
    params: &LogisticParams,
    omega: Option<&WeightMatrix>,
) -> Result<f64> {
    let mut total = 0.0;
    for k in 0..ch.users() {
        let g = weighted_equivalent_sinr(ch, beams, k, omega.map(|w| w.row(k)));
        // a starved user (zero beam) scores the gamma -> 0 limit, a
        total += if g > 0.0 { logistic_score(g, params)? } else { params.a };
    }
    Ok(total)
}

/// Closed-form quadratic-transform auxiliaries at fixed beams:
/// `r_k = Re(h_k^H v_k) / (F_k |h_k^H v_k|^2 + G_k * I_k)` where `I_k` is
/// the weighted interference plus the power-normalized noise term.
pub fn update_r(
    ch: &ChannelSet,
    beams: &BeamformerSet,
    coeffs: &[SurrogateCoeffs],
    omega: Option<&WeightMatrix>,
) -> Result<Vec<f64>> {
    let k_users = ch.users();
    if coeffs.len() != k_users || beams.users() != k_users {
        return Err(Error::DimensionMismatch("coeffs/beams/users mismatch".into()));
    }
    let power_term = beams.total_power() / beams.p_t() * ch.sigma2();
    let mut r = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let h = ch.h(k);
        let own = inner(h, beams.v(k));
        let mut ipn = power_term;
        for m in 0..k_users {
            if m != k {
                let w = omega.map_or(1.0, |o| o.at(k, m));
                ipn += w * inner(h, beams.v(m)).norm_sqr();
            }
        }
        let den = coeffs[k].sig_w * own.norm_sqr() + coeffs[k].noise_w * ipn;
        if !(den.abs() > 1e-300) || !den.is_finite() {
            return Err(Error::NumericalFailure(format!(
                "auxiliary update denominator is degenerate for user {k}: {den:.3e}"
            )));
        }
        r.push(own.re / den);
    }
    Ok(r)
}

/// Beam update at fixed auxiliaries: each user solves
/// `M_k v_k = r_k E_k h_k` with
/// `M_k = r_k^2 E_k F_k h_k h_k^H + sum_{m != k} r_m^2 w_{m,k} E_m G_m h_m h_m^H
///        + (sum_j r_j^2 E_j G_j) (sigma2 / P_T) I`.
///
/// Returns the unnormalized beams and whether any system needed diagonal
/// loading to become positive definite (possible when an `e > 1` anchor
/// produced a negative `G`).
pub fn update_v(
    ch: &ChannelSet,
    r: &[f64],
    coeffs: &[SurrogateCoeffs],
    p_t: f64,
    omega: Option<&WeightMatrix>,
) -> Result<(BeamformerSet, bool)> {
    let k_users = ch.users();
    let n_t = ch.n_t();
    if r.len() != k_users || coeffs.len() != k_users {
        return Err(Error::DimensionMismatch("r/coeffs/users mismatch".into()));
    }
    let ridge_sum: f64 = (0..k_users)
        .map(|j| r[j] * r[j] * coeffs[j].scale * coeffs[j].noise_w)
        .sum();
    let mut loaded = false;
    let mut beams = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let mut m = CMat::zeros(n_t);
        m.add_scaled_outer(r[k] * r[k] * coeffs[k].scale * coeffs[k].sig_w, ch.h(k));
        for j in 0..k_users {
            if j != k {
                let w = omega.map_or(1.0, |o| o.at(j, k));
                m.add_scaled_outer(
                    r[j] * r[j] * w * coeffs[j].scale * coeffs[j].noise_w,
                    ch.h(j),
                );
            }
        }
        m.add_diag(ridge_sum * ch.sigma2() / p_t);
        let rhs: Vec<Complex64> = ch.h(k).iter().map(|x| r[k] * coeffs[k].scale * x).collect();
        // escalate until the factorization succeeds; an indefinite system
        // (negative G from an e > 1 anchor) needs loading on the order of
        // its spectral radius before it turns definite
        let mut load = 1e-9 * (m.trace_abs() / n_t as f64).max(f64::MIN_POSITIVE);
        let mut solved = None;
        for attempt in 0..9 {
            match hermitian_solve(&m, &rhs) {
                Ok(v) => {
                    solved = Some(v);
                    break;
                }
                Err(Error::NotPositiveDefinite { .. }) | Err(Error::SingularSystem { .. })
                    if attempt < 8 =>
                {
                    m.add_diag(load);
                    load *= 100.0;
                    loaded = true;
                }
                Err(e) => return Err(e),
            }
        }
        let v = solved.ok_or_else(|| {
            Error::NumericalFailure(format!(
                "beam update system for user {k} stayed indefinite after loading"
            ))
        })?;
        beams.push(v);
    }
    Ok((BeamformerSet::new(beams, p_t)?, loaded))
}

/// Largest anchor at which the `e > 1` surrogate still minorizes globally,
/// with a safety margin.
fn clamp_anchor(gamma0: f64, p: &LogisticParams) -> f64 {
    if p.e > 1.0 {
        let crit = (1.0 / (p.c * (p.e - 1.0))).powf(1.0 / p.e);
        gamma0.min(0.9 * crit)
    } else {
        gamma0
    }
}

struct StepOutcome {
    beams: BeamformerSet,
    objective: f64,
    loaded: bool,
}

fn attempt_step(
    ch: &ChannelSet,
    beams: &BeamformerSet,
    anchors: &[f64],
    params: &LogisticParams,
    omega: Option<&WeightMatrix>,
) -> Result<StepOutcome> {
    let coeffs: Vec<SurrogateCoeffs> = anchors
        .iter()
        .map(|&g0| surrogate_coeffs(g0.max(1e-12), params))
        .collect::<Result<_>>()?;
    let r = update_r(ch, beams, &coeffs, omega)?;
    let (cand, loaded) = update_v(ch, &r, &coeffs, beams.p_t(), omega)?;
    let objective = objective(ch, &cand, params, omega)?;
    Ok(StepOutcome { beams: cand, objective, loaded })
}

fn is_retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::AnchorSingularity { .. }
            | Error::NumericalFailure(_)
            | Error::NotPositiveDefinite { .. }
            | Error::SingularSystem { .. }
            | Error::DegenerateInput(_)
    )
}

/// Weighted MM loop shared by the plain and cooperative solvers. Returns
/// power-normalized, phase-canonicalized beams.
pub fn optimize_weighted(
    ch: &ChannelSet,
    p_t: f64,
    params: &LogisticParams,
    omega: Option<&WeightMatrix>,
    opts: &SolverOptions,
) -> Result<(BeamformerSet, SolveReport)> {
    params.validate()?;
    if let Some(w) = omega {
        if w.users() != ch.users() {
            return Err(Error::DimensionMismatch("weight matrix size != user count".into()));
        }
    }
    // initialize with the matched-filter directions v_k = h_k
    let mut beams = BeamformerSet::new(ch.channels().to_vec(), p_t)?;
    let mut obj = objective(ch, &beams, params, omega)?;
    let mut trace = vec![obj];
    let mut report = SolveReport {
        iterations: 0,
        objective_trace: Vec::new(),
        converged: false,
        final_objective: obj,
        diag_loading_events: 0,
        anchor_retries: 0,
        rejected_steps: 0,
    };
    'outer: while report.iterations < opts.max_iter {
        let anchors: Vec<f64> = (0..ch.users())
            .map(|k| {
                clamp_anchor(
                    weighted_equivalent_sinr(ch, &beams, k, omega.map(|w| w.row(k))),
                    params,
                )
            })
            .collect();
        let mut accepted = false;
        let mut perturb = 1.0f64;
        for attempt in 0..=opts.anchor_retries {
            let scaled: Vec<f64> = anchors.iter().map(|&a| a * perturb).collect();
            match attempt_step(ch, &beams, &scaled, params, omega) {
                Ok(step) => {
                    if step.loaded {
                        report.diag_loading_events += 1;
                    }
                    if step.objective >= obj - 1e-9 {
                        let delta = (step.objective - obj).abs();
                        beams = step.beams;
                        obj = step.objective;
                        trace.push(obj);
                        report.iterations += 1;
                        accepted = true;
                        if delta < opts.tol {
                            report.converged = true;
                            break 'outer;
                        }
                        break;
                    }
                    report.rejected_steps += 1;
                }
                Err(e) if is_retryable(&e) => {
                    if attempt == opts.anchor_retries {
                        return Err(e);
                    }
                }
                Err(e) => return Err(e),
            }
            report.anchor_retries += 1;
            // alternate outward perturbations: 1.01, 1/1.01, 1.01^2, ...
            let mag = 1.01f64.powi(attempt as i32 / 2 + 1);
            perturb = if attempt % 2 == 0 { mag } else { 1.0 / mag };
        }
        if !accepted {
            // no non-decreasing step exists near this point; stop here
            break;
        }
    }
    report.objective_trace = trace;
    report.final_objective = obj;
    beams.normalize_power();
    beams.canonicalize_phases(ch);
    Ok((beams, report))
}

/// Beamformer for semantics-uncorrelated users: the unweighted MM loop.
pub fn optimize_uncorrelated(
    ch: &ChannelSet,
    p_t: f64,
    params: &LogisticParams,
    opts: &SolverOptions,
) -> Result<(BeamformerSet, SolveReport)> {
    optimize_weighted(ch, p_t, params, None, opts)
}

/// Cooperative beamforming outcome: final beams, per-user receive phases,
/// and the measured pair phase residual `arg(h_i^H v_j) + arg(h_j^H v_i)`.
#[derive(Debug, Clone)]
pub struct CorrelatedOutcome {
    pub beams: BeamformerSet,
    /// Phase each receiver applies to its observation (zero except for the
    /// second member of a pair).
    pub receive_phases: Vec<f64>,
    /// For each user in a pair group, the pair's residual phase; `None` for
    /// singletons. The alignment rule cancels it only when it is zero, so it
    /// is measured and reported, never assumed.
    pub pair_phase_residual: Vec<Option<f64>>,
    pub report: SolveReport,
}

/// Beamformer for semantics-correlated users: the weighted MM loop followed
/// by per-pair phase alignment. For each pair `{i, j}` (after normalizing
/// power and rotating every beam so its own gain is real-positive) the
/// second beam is rotated by `arg(h_j^H v_i)` and receiver `j` compensates
/// by `arg(h_i^H v_j)`; singletons are left untouched.
pub fn optimize_correlated(
    ch: &ChannelSet,
    p_t: f64,
    params: &LogisticParams,
    omega: &WeightMatrix,
    groups: &Grouping,
    opts: &SolverOptions,
) -> Result<CorrelatedOutcome> {
    if groups.users() != ch.users() {
        return Err(Error::DimensionMismatch("grouping size != user count".into()));
    }
    for g in groups.groups() {
        if g.len() > 2 {
            return Err(Error::GroupTooLarge { size: g.len(), limit: 2 });
        }
    }
    let (mut beams, report) = optimize_weighted(ch, p_t, params, Some(omega), opts)?;
    // beams are power-normalized and own-phase canonicalized here
    let users = ch.users();
    let mut receive_phases = vec![0.0f64; users];
    let mut pair_phase_residual = vec![None; users];
    for g in groups.groups() {
        if let [i, j] = g[..] {
            let phi_ij = inner(ch.h(i), beams.v(j)).arg();
            let phi_ji = inner(ch.h(j), beams.v(i)).arg();
            beams.rotate(j, phi_ji);
            receive_phases[j] = phi_ij;
            let residual = wrap_angle(phi_ij + phi_ji);
            pair_phase_residual[i] = Some(residual);
            pair_phase_residual[j] = Some(residual);
        }
    }
    Ok(CorrelatedOutcome { beams, receive_phases, pair_phase_residual, report })
}

/// Wrap an angle to `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta % two_pi;
    if t <= -std::f64::consts::PI {
        t += two_pi;
    } else if t > std::f64::consts::PI {
        t -= two_pi;
    }
    t
}
