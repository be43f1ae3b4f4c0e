//! Baseline beamformers: matched filter (MRT), zero forcing, and the
//! weighted-MMSE sum-rate solver. All use an equal per-user power split
//! (the budget policy for the baselines) and the crate's real-domain noise
//! convention, i.e. rates and MSE terms use noise power `sigma2`.

use num_complex::Complex64;

use crate::channel::{BeamformerSet, ChannelSet};
use crate::error::{Error, Result};
use crate::numerics::complex::{hermitian_solve, inner, norm_sq, CMat};

/// Matched-filter beams `v_k = sqrt(P_T/K) h_k / ||h_k||`.
pub fn mrt(ch: &ChannelSet, p_t: f64) -> Result<BeamformerSet> {
    let per_user = (p_t / ch.users() as f64).sqrt();
    let mut v = Vec::with_capacity(ch.users());
    for k in 0..ch.users() {
        let h = ch.h(k);
        let n = norm_sq(h).sqrt();
        if !(n > 0.0) {
            return Err(Error::DegenerateInput(format!("channel {k} is zero")));
        }
        v.push(h.iter().map(|x| x * (per_user / n)).collect());
    }
    BeamformerSet::new(v, p_t)
}

/// Zero-forcing beams: pseudo-inverse directions with equal power split,
/// so `h_k^H v_m = 0` for every `m != k`. Needs `K <= N_t` and linearly
/// independent channels.
pub fn zf(ch: &ChannelSet, p_t: f64) -> Result<BeamformerSet> {
    let k_users = ch.users();
    let n_t = ch.n_t();
    if k_users > n_t {
        return Err(Error::InvalidConfig(format!(
            "zero forcing needs K <= N_t, got K = {k_users}, N_t = {n_t}"
        )));
    }
    // Gram matrix G[i][j] = h_i^H h_j
    let mut gram = CMat::zeros(k_users);
    for i in 0..k_users {
        for j in 0..k_users {
            gram.set(i, j, inner(ch.h(i), ch.h(j)));
        }
    }
    let per_user = (p_t / k_users as f64).sqrt();
    let mut v = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let mut e_k = vec![Complex64::new(0.0, 0.0); k_users];
        e_k[k] = Complex64::new(1.0, 0.0);
        let w = hermitian_solve(&gram, &e_k).map_err(|e| match e {
            Error::NotPositiveDefinite { .. } | Error::SingularSystem { .. } => {
                Error::NumericalFailure(format!(
                    "zero forcing needs linearly independent channels: {e}"
                ))
            }
            other => other,
        })?;
        // direction d_k = sum_j w_j h_j
        let mut d = vec![Complex64::new(0.0, 0.0); n_t];
        for (j, wj) in w.iter().enumerate() {
            for (di, hj) in d.iter_mut().zip(ch.h(j)) {
                *di += wj * hj;
            }
        }
        let n = norm_sq(&d).sqrt();
        if !(n > 0.0) {
            return Err(Error::NumericalFailure(format!("zero-forcing direction {k} collapsed")));
        }
        v.push(d.iter().map(|x| x * (per_user / n)).collect());
    }
    BeamformerSet::new(v, p_t)
}

/// Sum rate `sum_k log2(1 + gamma_k)` of a beam set.
pub fn sum_rate(ch: &ChannelSet, beams: &BeamformerSet) -> f64 {
    (0..ch.users())
        .map(|k| (1.0 + crate::channel::sinr(ch, beams, k)).log2())
        .sum()
}

/// Weighted-MMSE sum-rate beamformer: alternate the MMSE receive scalars
/// `u_k`, the MSE weights `w_k = 1/e_k`, and the transmit update
/// `v_k = w_k u_k (sum_j w_j |u_j|^2 h_j h_j^H + mu I)^{-1} h_k` with `mu`
/// bisected to meet the power budget. Stops when the sum rate changes by
/// less than 1e-6.
pub fn wmmse(ch: &ChannelSet, p_t: f64) -> Result<BeamformerSet> {
    wmmse_with_trace(ch, p_t).map(|(beams, _)| beams)
}

/// [`wmmse`] plus the per-iteration sum-rate trace.
pub fn wmmse_with_trace(ch: &ChannelSet, p_t: f64) -> Result<(BeamformerSet, Vec<f64>)> {
    let k_users = ch.users();
    let n_t = ch.n_t();
    let sigma2 = ch.sigma2();
    let mut beams = mrt(ch, p_t)?;
    let mut rate = sum_rate(ch, &beams);
    let mut trace = vec![rate];
    for _ in 0..300 {
        // receive scalars and MSE weights at fixed beams
        let mut u = vec![Complex64::new(0.0, 0.0); k_users];
        let mut w = vec![0.0f64; k_users];
        for k in 0..k_users {
            let h = ch.h(k);
            let mut den = sigma2;
            for j in 0..k_users {
                den += inner(h, beams.v(j)).norm_sqr();
            }
            let own = inner(h, beams.v(k));
            u[k] = own / den;
            let mse = 1.0 - own.norm_sqr() / den;
            if !(mse > 0.0) {
                return Err(Error::NumericalFailure("WMMSE mse went non-positive".into()));
            }
            w[k] = 1.0 / mse;
        }
        // transmit update with power bisection
        let mut psi = CMat::zeros(n_t);
        for j in 0..k_users {
            psi.add_scaled_outer(w[j] * u[j].norm_sqr(), ch.h(j));
        }
        let solve_all = |mu: f64| -> Result<Vec<Vec<Complex64>>> {
            let mut m = psi.clone();
            m.add_diag(mu);
            (0..k_users)
                .map(|k| {
                    let rhs: Vec<Complex64> =
                        ch.h(k).iter().map(|x| w[k] * u[k] * x).collect();
                    hermitian_solve(&m, &rhs)
                })
                .collect()
        };
        let power_of = |v: &[Vec<Complex64>]| v.iter().map(|b| norm_sq(b)).sum::<f64>();
        // mu = 0 when the unconstrained update is feasible
        let unconstrained = solve_all(1e-12 * (1.0 + psi.trace_abs()));
        let v_new = match unconstrained {
            Ok(v) if power_of(&v) <= p_t => v,
            _ => {
                let mut lo = 0.0f64;
                let mut hi = 1e-6f64;
                while power_of(&solve_all(hi)?) > p_t {
                    hi *= 10.0;
                    if hi > 1e18 {
                        return Err(Error::NumericalFailure(
                            "WMMSE power bisection failed to bracket".into(),
                        ));
                    }
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if power_of(&solve_all(mid)?) > p_t {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                solve_all(hi)?
            }
        };
        beams = BeamformerSet::new(v_new, p_t)?;
        let new_rate = sum_rate(ch, &beams);
        let delta = new_rate - rate;
        rate = new_rate;
        trace.push(rate);
        if delta.abs() < 1e-6 {
            break;
        }
    }
    Ok((beams, trace))
}
