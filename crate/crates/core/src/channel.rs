//! Downlink multi-user MISO chain: precode, superpose, fade, add noise,
//! phase-compensate, demap — plus the SINR quantities and the effective
//! per-user link parameters `(alpha, tau)` of the equivalent scalar model
//! `f_hat = alpha * f + tau * n`.
//!
//! Noise convention: each *real latent element* receives noise of variance
//! `sigma2`, i.e. the complex channel noise has real and imaginary parts of
//! variance `sigma2` each, and SNR = 1/sigma2. This makes the demapped noise
//! exactly N(0, sigma2 I) in the real 2N-domain.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::complex::{inner, norm_sq};
use crate::numerics::rng::{draw_complex_gaussian, RngStream};
use crate::shuffle::{demap_c, ShufflePattern};

/// Per-user MISO channels plus the noise level of the cell.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    h: Vec<Vec<Complex64>>,
    sigma2: f64,
}

impl ChannelSet {
    pub fn new(h: Vec<Vec<Complex64>>, sigma2: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::InvalidConfig("need at least one user channel".into()));
        }
        let n_t = h[0].len();
        if n_t == 0 || h.iter().any(|v| v.len() != n_t) {
            return Err(Error::DimensionMismatch(
                "all channel vectors must share a nonzero antenna count".into(),
            ));
        }
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "sigma2 must be positive and finite, got {sigma2}"
            )));
        }
        if h.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidConfig("channel entries must be finite".into()));
        }
        Ok(ChannelSet { h, sigma2 })
    }

    pub fn users(&self) -> usize {
        self.h.len()
    }

    pub fn n_t(&self) -> usize {
        self.h[0].len()
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn h(&self, k: usize) -> &[Complex64] {
        &self.h[k]
    }

    pub fn channels(&self) -> &[Vec<Complex64>] {
        &self.h
    }
}

/// Per-user precoding vectors under a total power budget.
#[derive(Debug, Clone)]
pub struct BeamformerSet {
    v: Vec<Vec<Complex64>>,
    p_t: f64,
}

impl BeamformerSet {
    pub fn new(v: Vec<Vec<Complex64>>, p_t: f64) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidConfig("need at least one beamformer".into()));
        }
        let n_t = v[0].len();
        if n_t == 0 || v.iter().any(|b| b.len() != n_t) {
            return Err(Error::DimensionMismatch(
                "all beamformers must share a nonzero antenna count".into(),
            ));
        }
        if !(p_t > 0.0) || !p_t.is_finite() {
            return Err(Error::InvalidConfig(format!("P_T must be positive, got {p_t}")));
        }
        Ok(BeamformerSet { v, p_t })
    }

    pub fn users(&self) -> usize {
        self.v.len()
    }

    pub fn n_t(&self) -> usize {
        self.v[0].len()
    }

    pub fn p_t(&self) -> f64 {
        self.p_t
    }

    pub fn v(&self, k: usize) -> &[Complex64] {
        &self.v[k]
    }

    pub fn beams(&self) -> &[Vec<Complex64>] {
        &self.v
    }

    pub fn total_power(&self) -> f64 {
        self.v.iter().map(|b| norm_sq(b)).sum()
    }

    /// True when the power budget is met up to rounding slack.
    pub fn is_power_feasible(&self) -> bool {
        self.total_power() <= self.p_t * (1.0 + 1e-9)
    }

    /// Scale all beams so the total power equals `P_T` exactly.
    pub fn normalize_power(&mut self) {
        let s = (self.p_t / self.total_power()).sqrt();
        for b in &mut self.v {
            for x in b.iter_mut() {
                *x *= s;
            }
        }
    }

    /// Rotate each beam so its own-channel gain `h_k^H v_k` is real and
    /// non-negative. Leaves every SINR unchanged.
    pub fn canonicalize_phases(&mut self, ch: &ChannelSet) {
        for (k, b) in self.v.iter_mut().enumerate() {
            let g = inner(ch.h(k), b);
            if g.norm() > 0.0 {
                let rot = (g / g.norm()).conj();
                for x in b.iter_mut() {
                    *x *= rot;
                }
            }
        }
    }

    /// Multiply beam `k` by a unit phasor.
    pub fn rotate(&mut self, k: usize, theta: f64) {
        let rot = Complex64::from_polar(1.0, theta);
        for x in self.v[k].iter_mut() {
            *x *= rot;
        }
    }
}

/// Equivalent scalar link for one user: `f_hat = alpha * f + tau * n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveLink {
    /// Target amplitude `|h_k^H v_k|` (plus any coherent in-group gain).
    pub alpha: f64,
    /// Aggregate interference-plus-noise standard deviation.
    pub tau: f64,
}

/// Draw K i.i.d. Rayleigh channels `h_k ~ CN(0, I/N_t)` (per complex entry
/// variance `1/N_t`, so `E||h_k||^2 = 1`).
pub fn gen_channels(
    n_t: usize,
    users: usize,
    sigma2: f64,
    rng: &mut RngStream,
) -> Result<ChannelSet> {
    if n_t == 0 || users == 0 {
        return Err(Error::InvalidConfig("need n_t >= 1 and users >= 1".into()));
    }
    let var_per_component = 1.0 / (2.0 * n_t as f64);
    let h = (0..users)
        .map(|_| draw_complex_gaussian(n_t, var_per_component, rng))
        .collect::<Result<Vec<_>>>()?;
    ChannelSet::new(h, sigma2)
}

/// Precode and superpose: slot `n` of the transmit stream is the
/// `N_t`-vector `x_n = sum_k v_k z_k[n]`.
pub fn transmit(z: &[Vec<Complex64>], beams: &BeamformerSet) -> Result<Vec<Vec<Complex64>>> {
    if z.len() != beams.users() {
        return Err(Error::DimensionMismatch(format!(
            "{} symbol streams for {} beamformers",
            z.len(),
            beams.users()
        )));
    }
    let n = z.first().map(|s| s.len()).unwrap_or(0);
    if z.iter().any(|s| s.len() != n) {
        return Err(Error::DimensionMismatch("symbol streams must have equal length".into()));
    }
    let n_t = beams.n_t();
    let mut x = vec![vec![Complex64::new(0.0, 0.0); n_t]; n];
    for (k, stream) in z.iter().enumerate() {
        let v = beams.v(k);
        for (slot, &sym) in stream.iter().enumerate() {
            for (a, &vi) in x[slot].iter_mut().zip(v) {
                *a += vi * sym;
            }
        }
    }
    Ok(x)
}

/// Single-antenna receiver: `y_n = h_k^H x_n + sigma * (g1 + j g2)` with
/// `g1, g2 ~ N(0,1)`. `sigma2 = 0` gives the noiseless limit.
pub fn receive(
    x: &[Vec<Complex64>],
    h_k: &[Complex64],
    sigma2: f64,
    rng: &mut RngStream,
) -> Vec<Complex64> {
    let sd = sigma2.max(0.0).sqrt();
    x.iter()
        .map(|slot| {
            let s = inner(h_k, slot);
            s + Complex64::new(sd * rng.standard_normal(), sd * rng.standard_normal())
        })
        .collect()
}

/// Phase-compensate by the own-link phase and demap back to the latent
/// domain: `f_hat = demap(e^{-j arg(h_k^H v_k)} y, p_k)`.
pub fn compensate_demap(
    y: &[Complex64],
    h_k: &[Complex64],
    v_k: &[Complex64],
    p_k: &ShufflePattern,
) -> Result<Vec<f64>> {
    let g = inner(h_k, v_k);
    if g.norm() < 1e-12 {
        return Err(Error::DegenerateLink { gain: g.norm() });
    }
    let rot = (g / g.norm()).conj();
    let compensated: Vec<Complex64> = y.iter().map(|s| rot * s).collect();
    demap_c(&compensated, p_k)
}

/// Lemma-style effective link parameters for user `k`:
/// `alpha = |h_k^H v_k|`, `tau^2 = sum_{m != k} |h_k^H v_m|^2 + sigma2`.
pub fn effective_link(ch: &ChannelSet, beams: &BeamformerSet, k: usize) -> EffectiveLink {
    let h = ch.h(k);
    let alpha = inner(h, beams.v(k)).norm();
    let mut t2 = ch.sigma2();
    for m in 0..beams.users() {
        if m != k {
            t2 += inner(h, beams.v(m)).norm_sqr();
        }
    }
    EffectiveLink { alpha, tau: t2.sqrt() }
}

/// Plain SINR `gamma_k = |h_k^H v_k|^2 / (sigma2 + sum_{m != k} |h_k^H v_m|^2)`.
pub fn sinr(ch: &ChannelSet, beams: &BeamformerSet, k: usize) -> f64 {
    let h = ch.h(k);
    let sig = inner(h, beams.v(k)).norm_sqr();
    let mut den = ch.sigma2();
    for m in 0..beams.users() {
        if m != k {
            den += inner(h, beams.v(m)).norm_sqr();
        }
    }
    sig / den
}

/// Equivalent SINR with the total power constraint absorbed into the noise
/// term; invariant under common scaling of all beams and equal to `sinr`
/// when the power budget is met with equality.
pub fn equivalent_sinr(ch: &ChannelSet, beams: &BeamformerSet, k: usize) -> f64 {
    weighted_equivalent_sinr(ch, beams, k, None)
}

/// Semantic-weighted SINR: off-diagonal interference terms are discounted
/// by `omega_row[m]` (1 = full interference, 0 = ignored).
pub fn weighted_sinr(ch: &ChannelSet, beams: &BeamformerSet, k: usize, omega_row: &[f64]) -> f64 {
    let h = ch.h(k);
    let sig = inner(h, beams.v(k)).norm_sqr();
    let mut den = ch.sigma2();
    for m in 0..beams.users() {
        if m != k {
            den += omega_row[m] * inner(h, beams.v(m)).norm_sqr();
        }
    }
    sig / den
}

/// Weighted equivalent SINR (power constraint absorbed, interference
/// weighted). `omega_row = None` means all-ones weights.
pub fn weighted_equivalent_sinr(
    ch: &ChannelSet,
    beams: &BeamformerSet,
    k: usize,
    omega_row: Option<&[f64]>,
) -> f64 {
    let h = ch.h(k);
    let sig = inner(h, beams.v(k)).norm_sqr();
    let mut den = beams.total_power() / beams.p_t() * ch.sigma2();
    for m in 0..beams.users() {
        if m != k {
            let w = omega_row.map_or(1.0, |r| r[m]);
            den += w * inner(h, beams.v(m)).norm_sqr();
        }
    }
    sig / den
}

/// Effective link for a user in cooperative (pair-grouped) transmission.
///
/// The compensated own gain and, for a pair member, the similarity-weighted
/// share `(1 - omega)` of the compensated partner gain combine coherently:
/// the real part of the combined gain feeds `alpha`, its imaginary part is
/// counted as noise power, and the remaining `omega` share of the partner
/// power plus all out-of-group interference and channel noise form `tau^2`.
pub fn comp_effective_link(
    ch: &ChannelSet,
    beams: &BeamformerSet,
    k: usize,
    partner: Option<usize>,
    psi_k: f64,
    omega_to_partner: f64,
) -> EffectiveLink {
    let h = ch.h(k);
    let rot = Complex64::from_polar(1.0, psi_k);
    let own = rot * inner(h, beams.v(k));
    let mut combined = own;
    let mut t2 = ch.sigma2();
    for m in 0..beams.users() {
        if m == k {
            continue;
        }
        let g = rot * inner(h, beams.v(m));
        if partner == Some(m) {
            combined += (1.0 - omega_to_partner) * g;
            t2 += omega_to_partner * g.norm_sqr();
        } else {
            t2 += g.norm_sqr();
        }
    }
    t2 += combined.im * combined.im;
    EffectiveLink { alpha: combined.re, tau: t2.sqrt() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shuffle::{map_c, ShufflePattern};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn channel_energy_is_unit_on_average() {
        let mut rng = RngStream::new(51, 0);
        let mut acc = 0.0;
        let draws = 100_000;
        for _ in 0..draws {
            let h = draw_complex_gaussian(8, 1.0 / 16.0, &mut rng).unwrap();
            acc += norm_sq(&h);
        }
        let mean = acc / draws as f64;
        assert!((0.99..=1.01).contains(&mean), "mean ||h||^2 = {mean}");
    }

    #[test]
    fn gen_channels_is_deterministic() {
        let mut a = RngStream::new(52, 0);
        let mut b = RngStream::new(52, 0);
        let ca = gen_channels(4, 3, 0.1, &mut a).unwrap();
        let cb = gen_channels(4, 3, 0.1, &mut b).unwrap();
        assert_eq!(ca.channels(), cb.channels());
    }

    #[test]
    fn scalar_channels_have_unit_variance() {
        let mut rng = RngStream::new(53, 0);
        let mut acc = 0.0;
        let draws = 100_000;
        for _ in 0..draws {
            let ch = gen_channels(1, 1, 1.0, &mut rng).unwrap();
            acc += norm_sq(ch.h(0));
        }
        let mean = acc / draws as f64;
        assert!((0.99..=1.01).contains(&mean), "mean |h|^2 = {mean}");
    }

    #[test]
    fn transmit_single_user_basis_vector() {
        let beams =
            BeamformerSet::new(vec![vec![c(1.0, 0.0), c(0.0, 0.0)]], 1.0).unwrap();
        let z = vec![vec![c(1.0, 0.0); 3]];
        let x = transmit(&z, &beams).unwrap();
        for slot in &x {
            assert_eq!(slot, &vec![c(1.0, 0.0), c(0.0, 0.0)]);
        }
    }

    #[test]
    fn transmit_opposite_streams_cancel() {
        let v = vec![c(0.3, 0.1), c(-0.2, 0.7)];
        let beams = BeamformerSet::new(vec![v.clone(), v], 1.0).unwrap();
        let z1 = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        let z2: Vec<Complex64> = z1.iter().map(|s| -s).collect();
        let x = transmit(&[z1, z2].to_vec(), &beams).unwrap();
        for slot in &x {
            for e in slot {
                assert!(e.norm() < 1e-15);
            }
        }
    }

    #[test]
    fn transmit_matches_direct_summation() {
        let mut rng = RngStream::new(54, 0);
        let k = 3;
        let n_t = 4;
        let n = 16;
        let v: Vec<Vec<Complex64>> =
            (0..k).map(|_| draw_complex_gaussian(n_t, 0.5, &mut rng).unwrap()).collect();
        let z: Vec<Vec<Complex64>> =
            (0..k).map(|_| draw_complex_gaussian(n, 0.5, &mut rng).unwrap()).collect();
        let beams = BeamformerSet::new(v.clone(), 1.0).unwrap();
        let x = transmit(&z, &beams).unwrap();
        for slot in 0..n {
            for ant in 0..n_t {
                let mut s = c(0.0, 0.0);
                for u in 0..k {
                    s += v[u][ant] * z[u][slot];
                }
                assert!((x[slot][ant] - s).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn receive_noiseless_limit() {
        let mut rng = RngStream::new(55, 0);
        let h = draw_complex_gaussian(4, 0.5, &mut rng).unwrap();
        let x: Vec<Vec<Complex64>> =
            (0..8).map(|_| draw_complex_gaussian(4, 0.5, &mut rng).unwrap()).collect();
        let y = receive(&x, &h, 0.0, &mut rng);
        for (slot, yi) in x.iter().zip(&y) {
            assert!((inner(&h, slot) - yi).norm() < 1e-15);
        }
    }

    #[test]
    fn receive_noise_variance_per_component() {
        let mut rng = RngStream::new(56, 0);
        let h = vec![c(1.0, 0.0)];
        let x = vec![vec![c(0.0, 0.0)]; 100_000];
        let sigma2 = 0.37;
        let y = receive(&x, &h, sigma2, &mut rng);
        let n = y.len() as f64;
        let var_re = y.iter().map(|v| v.re * v.re).sum::<f64>() / n;
        let var_im = y.iter().map(|v| v.im * v.im).sum::<f64>() / n;
        assert!((var_re / sigma2 - 1.0).abs() < 0.02, "re var {var_re}");
        assert!((var_im / sigma2 - 1.0).abs() < 0.02, "im var {var_im}");
    }

    #[test]
    fn single_user_identity_chain() {
        let mut rng = RngStream::new(57, 0);
        let h = draw_complex_gaussian(4, 0.5, &mut rng).unwrap();
        let v = draw_complex_gaussian(4, 0.5, &mut rng).unwrap();
        let beams = BeamformerSet::new(vec![v.clone()], 1.0).unwrap();
        let z = draw_complex_gaussian(16, 0.5, &mut rng).unwrap();
        let x = transmit(&[z.clone()].to_vec(), &beams).unwrap();
        let y = receive(&x, &h, 0.0, &mut rng);
        let g = inner(&h, &v);
        for (yi, zi) in y.iter().zip(&z) {
            assert!((yi - g * zi).norm() < 1e-12);
        }
    }

    #[test]
    fn compensate_demap_noiseless_single_user() {
        let mut rng = RngStream::new(58, 0);
        let p = ShufflePattern::generate(3, 64).unwrap();
        let f = rng.normal_vec(64);
        let h = draw_complex_gaussian(4, 0.5, &mut rng).unwrap();
        let v = draw_complex_gaussian(4, 0.5, &mut rng).unwrap();
        let beams = BeamformerSet::new(vec![v.clone()], 1.0).unwrap();
        let z = map_c(&f, &p).unwrap();
        let x = transmit(&[z].to_vec(), &beams).unwrap();
        let y = receive(&x, &h, 0.0, &mut rng);
        let fhat = compensate_demap(&y, &h, &v, &p).unwrap();
        let alpha = inner(&h, &v).norm();
        for (fh, fi) in fhat.iter().zip(&f) {
            assert!((fh - alpha * fi).abs() < 1e-12);
        }
    }

    #[test]
    fn compensate_demap_zero_signal() {
        let p = ShufflePattern::identity(4).unwrap();
        let h = vec![c(1.0, 0.0)];
        let v = vec![c(1.0, 0.0)];
        let y = vec![c(0.0, 0.0); 2];
        let f = compensate_demap(&y, &h, &v, &p).unwrap();
        assert_eq!(f, vec![0.0; 4]);
    }

    #[test]
    fn compensate_demap_degenerate_link() {
        let p = ShufflePattern::identity(4).unwrap();
        let h = vec![c(1.0, 0.0)];
        let v = vec![c(0.0, 0.0)];
        let y = vec![c(0.0, 0.0); 2];
        assert!(matches!(
            compensate_demap(&y, &h, &v, &p),
            Err(Error::DegenerateLink { .. })
        ));
    }

    #[test]
    fn effective_link_special_cases() {
        let mut rng = RngStream::new(59, 0);
        let h1 = draw_complex_gaussian(4, 0.5, &mut rng).unwrap();
        let sigma2 = 0.2;
        let p_t: f64 = 2.0;
        // matched filter, single user: alpha = sqrt(P_T) ||h||, tau = sigma
        let nh = norm_sq(&h1).sqrt();
        let v1: Vec<Complex64> = h1.iter().map(|x| x * (p_t.sqrt() / nh)).collect();
        let ch = ChannelSet::new(vec![h1.clone()], sigma2).unwrap();
        let beams = BeamformerSet::new(vec![v1], p_t).unwrap();
        let link = effective_link(&ch, &beams, 0);
        assert!((link.alpha - p_t.sqrt() * nh).abs() < 1e-12);
        assert!((link.tau - sigma2.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn effective_link_orthogonal_interference_is_noise_only() {
        let sigma2 = 0.1;
        let h = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
        let v = h.clone(); // v_m is orthogonal to h_k for m != k
        let ch = ChannelSet::new(h, sigma2).unwrap();
        let beams = BeamformerSet::new(v, 2.0).unwrap();
        for k in 0..2 {
            let link = effective_link(&ch, &beams, k);
            assert!((link.tau - sigma2.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn effective_link_matches_brute_force() {
        let mut rng = RngStream::new(60, 0);
        let k = 5;
        let n_t = 4;
        let sigma2 = 0.3;
        let ch = gen_channels(n_t, k, sigma2, &mut rng).unwrap();
        let v: Vec<Vec<Complex64>> =
            (0..k).map(|_| draw_complex_gaussian(n_t, 0.5, &mut rng).unwrap()).collect();
        let beams = BeamformerSet::new(v, 1.0).unwrap();
        for u in 0..k {
            let link = effective_link(&ch, &beams, u);
            let mut t2 = sigma2;
            for m in 0..k {
                if m != u {
                    t2 += inner(ch.h(u), beams.v(m)).norm_sqr();
                }
            }
            assert!((link.tau * link.tau - t2).abs() < 1e-12);
            assert!((link.alpha - inner(ch.h(u), beams.v(u)).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn equivalent_sinr_reduces_at_full_power() {
        let mut rng = RngStream::new(61, 0);
        let ch = gen_channels(4, 3, 0.2, &mut rng).unwrap();
        let v: Vec<Vec<Complex64>> =
            (0..3).map(|_| draw_complex_gaussian(4, 0.5, &mut rng).unwrap()).collect();
        let mut beams = BeamformerSet::new(v, 1.5).unwrap();
        beams.normalize_power();
        for k in 0..3 {
            let g = sinr(&ch, &beams, k);
            let geq = equivalent_sinr(&ch, &beams, k);
            assert!((g - geq).abs() < 1e-12 * g.max(1.0));
        }
    }

    #[test]
    fn equivalent_sinr_is_scale_invariant() {
        let mut rng = RngStream::new(62, 0);
        let ch = gen_channels(4, 3, 0.2, &mut rng).unwrap();
        let v: Vec<Vec<Complex64>> =
            (0..3).map(|_| draw_complex_gaussian(4, 0.5, &mut rng).unwrap()).collect();
        let beams = BeamformerSet::new(v.clone(), 1.5).unwrap();
        let scaled: Vec<Vec<Complex64>> =
            v.iter().map(|b| b.iter().map(|x| 3.7 * x).collect()).collect();
        let beams_scaled = BeamformerSet::new(scaled, 1.5).unwrap();
        for k in 0..3 {
            let a = equivalent_sinr(&ch, &beams, k);
            let b = equivalent_sinr(&ch, &beams_scaled, k);
            assert!((a - b).abs() < 1e-12 * a.max(1.0), "k={k}: {a} vs {b}");
        }
    }

    #[test]
    fn two_user_scalar_hand_case() {
        let ch = ChannelSet::new(vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]], 1.0).unwrap();
        let beams =
            BeamformerSet::new(vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]], 2.0).unwrap();
        assert!((sinr(&ch, &beams, 0) - 0.5).abs() < 1e-15);
        assert!((equivalent_sinr(&ch, &beams, 0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weighted_sinr_limits() {
        let mut rng = RngStream::new(63, 0);
        let ch = gen_channels(4, 3, 0.2, &mut rng).unwrap();
        let v: Vec<Vec<Complex64>> =
            (0..3).map(|_| draw_complex_gaussian(4, 0.5, &mut rng).unwrap()).collect();
        let beams = BeamformerSet::new(v, 1.0).unwrap();
        for k in 0..3 {
            let all_ones = weighted_sinr(&ch, &beams, k, &[1.0, 1.0, 1.0]);
            assert!((all_ones - sinr(&ch, &beams, k)).abs() < 1e-12 * all_ones.max(1.0));
            let none = weighted_sinr(&ch, &beams, k, &[0.0, 0.0, 0.0]);
            let snr = inner(ch.h(k), beams.v(k)).norm_sqr() / ch.sigma2();
            assert!((none - snr).abs() < 1e-12 * snr.max(1.0));
        }
        // omega = 0.5 halves one known interference term
        let sig = inner(ch.h(0), beams.v(0)).norm_sqr();
        let i1 = inner(ch.h(0), beams.v(1)).norm_sqr();
        let i2 = inner(ch.h(0), beams.v(2)).norm_sqr();
        let got = weighted_sinr(&ch, &beams, 0, &[1.0, 0.5, 1.0]);
        let want = sig / (ch.sigma2() + 0.5 * i1 + i2);
        assert!((got - want).abs() < 1e-12 * want.max(1.0));
    }

    #[test]
    fn comp_link_reduces_for_singletons() {
        let mut rng = RngStream::new(64, 0);
        let ch = gen_channels(4, 3, 0.2, &mut rng).unwrap();
        let v: Vec<Vec<Complex64>> =
            (0..3).map(|_| draw_complex_gaussian(4, 0.5, &mut rng).unwrap()).collect();
        let mut beams = BeamformerSet::new(v, 1.0).unwrap();
        beams.canonicalize_phases(&ch);
        for k in 0..3 {
            let plain = effective_link(&ch, &beams, k);
            let comp = comp_effective_link(&ch, &beams, k, None, 0.0, 1.0);
            assert!((plain.alpha - comp.alpha).abs() < 1e-12);
            assert!((plain.tau - comp.tau).abs() < 1e-12);
        }
    }
}
