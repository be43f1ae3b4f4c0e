//! Seeded random streams.
//!
//! Every stochastic quantity in the crate is drawn from an [`RngStream`]
//! identified by a `(seed, stream)` pair. Equal pairs reproduce the exact
//! same draw sequence; distinct streams are statistically independent, so
//! Monte Carlo cells can be generated in any order (or in parallel) without
//! coupling draw order between components.

use num_complex::Complex64;
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// One step of the splitmix64 sequence.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix two words into one; used to derive stream ids from composite tags.
pub fn mix64(a: u64, b: u64) -> u64 {
    let mut s = a ^ 0xA076_1D64_78BD_642F;
    let x = splitmix64(&mut s);
    s ^= b.wrapping_mul(0xE703_7ED1_A0B4_28DB);
    x ^ splitmix64(&mut s)
}

/// Counter-based seeded random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Create the stream identified by `(seed, stream)`.
    pub fn new(seed: u64, stream: u64) -> Self {
        // expand the pair into a 256-bit ChaCha key via splitmix64
        let mut state = seed ^ 0x6C62_272E_07BB_0142;
        let mut key = [0u8; 32];
        let mut words = [0u64; 4];
        words[0] = splitmix64(&mut state);
        state ^= stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        words[1] = splitmix64(&mut state);
        words[2] = splitmix64(&mut state);
        words[3] = splitmix64(&mut state);
        for (i, w) in words.iter().enumerate() {
            key[i * 8..(i + 1) * 8].copy_from_slice(&w.to_le_bytes());
        }
        RngStream { seed, stream, rng: ChaCha8Rng::from_seed(key) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// One standard normal draw.
    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// `n` i.i.d. standard normal draws.
    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.standard_normal()).collect()
    }

    /// Uniform draw in `[0, bound)`.
    pub fn next_index(&mut self, bound: usize) -> usize {
        use rand::Rng;
        self.rng.gen_range(0..bound)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Draw `n` circularly-symmetric complex Gaussians whose real and imaginary
/// parts each have variance `var_per_component`.
pub fn draw_complex_gaussian(
    n: usize,
    var_per_component: f64,
    rng: &mut RngStream,
) -> Result<Vec<Complex64>> {
    if !(var_per_component > 0.0) || !var_per_component.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "var_per_component must be positive and finite, got {var_per_component}"
        )));
    }
    let sd = var_per_component.sqrt();
    Ok((0..n)
        .map(|_| Complex64::new(sd * rng.standard_normal(), sd * rng.standard_normal()))
        .collect())
}
