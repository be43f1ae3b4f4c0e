//! Shuffle-based real-to-complex symbol mapping.
//!
//! A latent vector `f` of length `2N` is packed into `N` complex channel
//! symbols in two stages: a per-user random permutation of the element
//! positions, then pairwise combination of the shuffled halves into real and
//! imaginary parts:
//!
//! ```text
//! map(f)[i]   = f[p[i]] + j f[p[i + N]]          i = 0..N
//! demap(y)[i] = [Re(y); Im(y)][inv[i]]           i = 0..2N
//! ```
//!
//! Demapping with the matching pattern restores `f` bit-exactly. Demapping
//! with a *different* pattern yields a re-shuffled version of `f`, which
//! destroys the serial structure of the source: cross-user interference
//! becomes statistically indistinguishable from white Gaussian noise when
//! the marginals are near-normal. The permutation doubles as an implicit
//! private key; [`gaussianization_report`] quantifies how Gaussian the
//! cross-demapped interference actually is for a configurable source.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::latent::{generate_latent, LatentSourceConfig};
use crate::numerics::rng::RngStream;
use crate::numerics::stats::{excess_kurtosis, ks_normal, sample_autocov, GaussianityReport};

/// Stream tag under which pattern keys expand to permutations.
const PATTERN_STREAM: u64 = 0x5348_5546_464C_4531; // "SHUFFLE1"

/// A user's shuffle pattern: a permutation of `{0..2N}`, its inverse, and
/// the 64-bit key it was derived from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShufflePattern {
    key: u64,
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl ShufflePattern {
    /// Expand a 64-bit key into a uniformly random permutation of `0..dim`
    /// (Fisher-Yates on a dedicated stream). The same key always yields the
    /// same pattern, so distributing a pattern to a user is a one-integer
    /// exchange.
    pub fn generate(key: u64, dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut rng = RngStream::new(key, PATTERN_STREAM);
        let mut perm: Vec<usize> = (0..dim).collect();
        for i in (1..dim).rev() {
            let j = rng.next_index(i + 1);
            perm.swap(i, j);
        }
        Ok(Self::from_parts(key, perm))
    }

    /// The identity pattern (the conventional non-shuffled mapping).
    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_parts(0, (0..dim).collect()))
    }

    /// Build a pattern from an explicit permutation of `0..dim`.
    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        check_dim(perm.len())?;
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || seen[p] {
                return Err(Error::InvalidConfig(
                    "permutation must be a bijection on 0..dim".into(),
                ));
            }
            seen[p] = true;
        }
        Ok(Self::from_parts(0, perm))
    }

    fn from_parts(key: u64, perm: Vec<usize>) -> Self {
        let mut inv = vec![0usize; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        ShufflePattern { key, perm, inv }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inv(&self) -> &[usize] {
        &self.inv
    }

    /// Shuffled copy of `f`: `out[i] = f[perm[i]]`.
    pub fn shuffle(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.dim());
        self.perm.iter().map(|&p| f[p]).collect()
    }

    /// Inverse of [`ShufflePattern::shuffle`]: `out[i] = g[inv[i]]`.
    pub fn unshuffle(&self, g: &[f64]) -> Vec<f64> {
        debug_assert_eq!(g.len(), self.dim());
        self.inv.iter().map(|&p| g[p]).collect()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    // dim = 2 is rejected: shuffling cannot decorrelate a 2-vector
    if dim < 4 || dim % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "pattern dim must be even and >= 4, got {dim}"
        )));
    }
    Ok(())
}

/// Alias for [`ShufflePattern::generate`].
pub fn gen_pattern(key: u64, dim: usize) -> Result<ShufflePattern> {
    ShufflePattern::generate(key, dim)
}

/// Shuffle-and-combine mapping of a real `2N` vector into `N` complex symbols.
pub fn map_c(f: &[f64], p: &ShufflePattern) -> Result<Vec<Complex64>> {
    if f.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "latent length {} != pattern dim {}",
            f.len(),
            p.dim()
        )));
    }
    let n = f.len() / 2;
    Ok((0..n)
        .map(|i| Complex64::new(f[p.perm[i]], f[p.perm[i + n]]))
        .collect())
}

/// Inverse mapping: stack `[Re(y); Im(y)]` and undo the shuffle.
pub fn demap_c(y: &[Complex64], p: &ShufflePattern) -> Result<Vec<f64>> {
    if y.len() * 2 != p.dim() {
        return Err(Error::DimensionMismatch(format!(
            "symbol length {} != pattern dim {} / 2",
            y.len(),
            p.dim()
        )));
    }
    let n = y.len();
    Ok(p.inv
        .iter()
        .map(|&j| if j < n { y[j].re } else { y[j - n].im })
        .collect())
}

/// The orthogonal block map `f -> (-f[N..2N], f[0..N])`.
///
/// In the shuffled domain this is exactly what multiplying the complex
/// symbols by `j` does to the packed real vector; applying it four times is
/// the identity and it preserves the norm.
pub fn quarter_rotation(f: &[f64]) -> Vec<f64> {
    assert!(f.len() % 2 == 0, "quarter_rotation needs an even-length vector");
    let n = f.len() / 2;
    let mut out = Vec::with_capacity(f.len());
    out.extend(f[n..].iter().map(|v| -v));
    out.extend_from_slice(&f[..n]);
    out
}

/// What user `dst` recovers when demapping a symbol stream that was mapped
/// with `src`'s pattern: a re-shuffled copy of `f`.
pub fn cross_demap_interference(
    f: &[f64],
    p_src: &ShufflePattern,
    p_dst: &ShufflePattern,
) -> Result<Vec<f64>> {
    if p_src.dim() != p_dst.dim() {
        return Err(Error::DimensionMismatch(format!(
            "pattern dims differ: {} vs {}",
            p_src.dim(),
            p_dst.dim()
        )));
    }
    demap_c(&map_c(f, p_src)?, p_dst)
}

/// Monte Carlo Gaussianity diagnostics of cross-demapped interference for a
/// given source configuration: draw `n_samples` latents, push each through
/// `map` with one random pattern and `demap` with another, and summarize the
/// pooled output against N(0,1).
pub fn gaussianization_report(
    cfg: &LatentSourceConfig,
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<GaussianityReport> {
    if n_samples < 100 {
        return Err(Error::InsufficientData { needed: 100, got: n_samples });
    }
    cfg.validate()?;
    use rand::RngCore;
    let max_lag = 10.min(cfg.dim / 10 - 1).max(1);
    let mut pooled = Vec::with_capacity(n_samples * cfg.dim);
    let mut autocov_acc = vec![0.0f64; max_lag];
    for _ in 0..n_samples {
        let f = generate_latent(cfg, rng)?;
        let key_src = rng.next_u64();
        let mut key_dst = rng.next_u64();
        while key_dst == key_src {
            key_dst = rng.next_u64();
        }
        let p_src = ShufflePattern::generate(key_src, cfg.dim)?;
        let p_dst = ShufflePattern::generate(key_dst, cfg.dim)?;
        let x = cross_demap_interference(&f, &p_src, &p_dst)?;
        for (acc, v) in autocov_acc.iter_mut().zip(sample_autocov(&x, max_lag)?) {
            *acc += v;
        }
        pooled.extend_from_slice(&x);
    }
    let max_abs_autocov = autocov_acc
        .iter()
        .map(|v| (v / n_samples as f64).abs())
        .fold(0.0f64, f64::max);
    Ok(GaussianityReport {
        ks_statistic: ks_normal(&pooled)?,
        max_abs_autocov,
        excess_kurtosis: excess_kurtosis(&pooled)?,
        sample_count: pooled.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::latent::LatentStructure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn same_key_gives_same_pattern() {
        let a = ShufflePattern::generate(123, 64).unwrap();
        let b = ShufflePattern::generate(123, 64).unwrap();
        assert_eq!(a, b);
        let c = ShufflePattern::generate(124, 64).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn identity_pattern_inverse_is_identity() {
        let p = ShufflePattern::identity(4).unwrap();
        assert_eq!(p.perm(), &[0, 1, 2, 3]);
        assert_eq!(p.inv(), &[0, 1, 2, 3]);
    }

    #[test]
    fn dim_validation() {
        assert!(ShufflePattern::generate(1, 2).is_err());
        assert!(ShufflePattern::generate(1, 5).is_err());
        assert!(ShufflePattern::from_perm(vec![0, 0, 1, 2]).is_err());
    }

    #[test]
    fn fixed_point_fraction_matches_uniform_theory() {
        // a uniform permutation of n elements has 1 fixed point on average
        let dim = 512;
        let trials = 10_000;
        let mut total = 0usize;
        for key in 0..trials {
            let p = ShufflePattern::generate(key as u64, dim).unwrap();
            total += p.perm().iter().enumerate().filter(|(i, &v)| *i == v).count();
        }
        let mean_fraction = total as f64 / (trials * dim) as f64;
        let expected = 1.0 / dim as f64;
        // std of the mean fraction is ~ 1/(dim sqrt(trials))
        let tol = 4.0 / (dim as f64 * (trials as f64).sqrt());
        assert!(
            (mean_fraction - expected).abs() < tol,
            "mean fraction {mean_fraction}, expected {expected}"
        );
    }

    #[test]
    fn map_identity_pattern() {
        let p = ShufflePattern::identity(4).unwrap();
        let y = map_c(&[1.0, 2.0, 3.0, 4.0], &p).unwrap();
        assert_eq!(y, vec![c(1.0, 3.0), c(2.0, 4.0)]);
    }

    #[test]
    fn map_explicit_pattern() {
        // permutation (2,1,4,3) in 1-based notation
        let p = ShufflePattern::from_perm(vec![1, 0, 3, 2]).unwrap();
        let y = map_c(&[1.0, 2.0, 3.0, 4.0], &p).unwrap();
        assert_eq!(y, vec![c(2.0, 4.0), c(1.0, 3.0)]);
    }

    #[test]
    fn map_zero_is_zero() {
        let p = ShufflePattern::generate(5, 8).unwrap();
        let y = map_c(&[0.0; 8], &p).unwrap();
        assert!(y.iter().all(|v| v.re == 0.0 && v.im == 0.0));
    }

    #[test]
    fn demap_hand_examples() {
        let p = ShufflePattern::from_perm(vec![1, 0, 3, 2]).unwrap();
        let f = demap_c(&[c(2.0, 4.0), c(1.0, 3.0)], &p).unwrap();
        assert_eq!(f, vec![1.0, 2.0, 3.0, 4.0]);
        let p = ShufflePattern::identity(4).unwrap();
        let f = demap_c(&[c(1.0, 3.0), c(2.0, 4.0)], &p).unwrap();
        assert_eq!(f, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn roundtrip_is_bitwise_exact() {
        let mut rng = RngStream::new(31, 0);
        for trial in 0..200 {
            let p = ShufflePattern::generate(trial, 128).unwrap();
            let f = rng.normal_vec(128);
            let back = demap_c(&map_c(&f, &p).unwrap(), &p).unwrap();
            assert_eq!(back, f); // bitwise
        }
    }

    #[test]
    fn demap_is_real_linear_bitwise() {
        let mut rng = RngStream::new(32, 0);
        let p = ShufflePattern::generate(77, 64).unwrap();
        let y1: Vec<Complex64> =
            (0..32).map(|_| c(rng.standard_normal(), rng.standard_normal())).collect();
        let y2: Vec<Complex64> =
            (0..32).map(|_| c(rng.standard_normal(), rng.standard_normal())).collect();
        let a = 1.75f64;
        let combo: Vec<Complex64> = y1.iter().zip(&y2).map(|(u, v)| a * u + v).collect();
        let lhs = demap_c(&combo, &p).unwrap();
        let d1 = demap_c(&y1, &p).unwrap();
        let d2 = demap_c(&y2, &p).unwrap();
        for i in 0..64 {
            // identical floating-point expressions on both sides
            assert_eq!(lhs[i], a * d1[i] + d2[i]);
        }
    }

    #[test]
    fn energy_is_preserved() {
        let mut rng = RngStream::new(33, 0);
        for trial in 0..100 {
            let p = ShufflePattern::generate(trial, 256).unwrap();
            let f = rng.normal_vec(256);
            let ef: f64 = f.iter().map(|v| v * v).sum();
            let ey: f64 = map_c(&f, &p).unwrap().iter().map(|v| v.norm_sqr()).sum();
            assert!((ef - ey).abs() <= 1e-13 * ef.max(1.0), "energy drift {}", ef - ey);
        }
    }

    #[test]
    fn quarter_rotation_examples() {
        assert_eq!(quarter_rotation(&[1.0, 2.0, 3.0, 4.0]), vec![-3.0, -4.0, 1.0, 2.0]);
        let f = vec![0.5, -1.0, 2.0, 7.0, -3.0, 0.25];
        let mut g = f.clone();
        for _ in 0..4 {
            g = quarter_rotation(&g);
        }
        assert_eq!(g, f);
        let nf: f64 = f.iter().map(|v| v * v).sum();
        let ng: f64 = quarter_rotation(&f).iter().map(|v| v * v).sum();
        assert_eq!(nf, ng);
    }

    #[test]
    fn rotation_identity_in_the_shuffled_domain() {
        // demap(j * map(f, p), p) == unshuffle(quarter_rotation(shuffle(f, p)))
        let mut rng = RngStream::new(34, 0);
        for trial in 0..50 {
            let p = ShufflePattern::generate(1000 + trial, 64).unwrap();
            let f = rng.normal_vec(64);
            let jy: Vec<Complex64> =
                map_c(&f, &p).unwrap().iter().map(|v| Complex64::new(0.0, 1.0) * v).collect();
            let lhs = demap_c(&jy, &p).unwrap();
            let rhs = p.unshuffle(&quarter_rotation(&p.shuffle(&f)));
            assert_eq!(lhs, rhs); // bitwise: index moves and sign flips only
        }
    }

    #[test]
    fn cross_demap_same_pattern_is_identity() {
        let mut rng = RngStream::new(35, 0);
        let p = ShufflePattern::generate(9, 64).unwrap();
        let f = rng.normal_vec(64);
        assert_eq!(cross_demap_interference(&f, &p, &p).unwrap(), f);
    }

    #[test]
    fn cross_demap_preserves_multiset() {
        let mut rng = RngStream::new(36, 0);
        let a = ShufflePattern::generate(1, 64).unwrap();
        let b = ShufflePattern::generate(2, 64).unwrap();
        let f = rng.normal_vec(64);
        let x = cross_demap_interference(&f, &a, &b).unwrap();
        let mut sf = f.clone();
        let mut sx = x.clone();
        sf.sort_by(|p, q| p.partial_cmp(q).unwrap());
        sx.sort_by(|p, q| p.partial_cmp(q).unwrap());
        assert_eq!(sf, sx);
    }

    #[test]
    fn cross_demap_decorrelates_ar1() {
        let cfg = LatentSourceConfig::new(512, LatentStructure::Ar1 { rho: 0.9 });
        let mut rng = RngStream::new(37, 0);
        let mut acc = vec![0.0f64; 1];
        let samples = 2000;
        use rand::RngCore;
        for _ in 0..samples {
            let f = generate_latent(&cfg, &mut rng).unwrap();
            let a = ShufflePattern::generate(rng.next_u64(), 512).unwrap();
            let b = ShufflePattern::generate(rng.next_u64(), 512).unwrap();
            let x = cross_demap_interference(&f, &a, &b).unwrap();
            acc[0] += sample_autocov(&x, 1).unwrap()[0];
        }
        let lag1 = (acc[0] / samples as f64).abs();
        assert!(lag1 < 0.05, "lag-1 autocov after shuffling {lag1}");
    }

    #[test]
    fn report_iid_gaussian_is_gaussian() {
        let cfg = LatentSourceConfig::new(512, LatentStructure::IidGaussian);
        let mut rng = RngStream::new(38, 0);
        let rep = gaussianization_report(&cfg, 200, &mut rng).unwrap();
        assert!(rep.sample_count >= 100_000);
        assert!(rep.ks_statistic < 0.01, "ks {}", rep.ks_statistic);
    }

    #[test]
    fn report_ar1_decorrelates() {
        let cfg = LatentSourceConfig::new(512, LatentStructure::Ar1 { rho: 0.9 });
        let mut rng = RngStream::new(39, 0);
        let rep = gaussianization_report(&cfg, 200, &mut rng).unwrap();
        assert!(rep.max_abs_autocov < 0.05, "autocov {}", rep.max_abs_autocov);
    }

    #[test]
    fn report_heavy_tail_keeps_kurtosis() {
        // marginal non-normality survives shuffling
        let cfg = LatentSourceConfig::new(512, LatentStructure::HeavyTail { dof: 3.0 });
        let mut rng = RngStream::new(40, 0);
        let rep = gaussianization_report(&cfg, 200, &mut rng).unwrap();
        assert!(rep.excess_kurtosis > 1.0, "kurtosis {}", rep.excess_kurtosis);
    }

    #[test]
    fn report_needs_samples() {
        let cfg = LatentSourceConfig::new(512, LatentStructure::IidGaussian);
        let mut rng = RngStream::new(41, 0);
        assert!(matches!(
            gaussianization_report(&cfg, 10, &mut rng),
            Err(Error::InsufficientData { .. })
        ));
    }
}
