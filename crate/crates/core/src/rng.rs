//! Deterministic pseudo-random streams.
//!
//! Every random quantity in the crate is drawn from [`Rng`], a SplitMix64
//! generator (Steele, Lea & Flood, 2014). The algorithm is pinned so a seed
//! replays the same stream, chunk and detector verdicts on any platform.
//! Independent sub-streams are obtained with [`Rng::derive`], keyed by a
//! domain tag and an index.

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output permutation (a bijection on `u64`).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Seed for the sub-stream identified by `(seed, tag, index)`.
///
/// Each step is a bijection, so for a fixed `(seed, tag)` distinct indices
/// always yield distinct generator states.
pub fn derive_seed(seed: u64, tag: &str, index: u64) -> u64 {
    let mut h = mix64(seed ^ 0x243F_6A88_85A3_08D3);
    h = mix64(h ^ fnv1a64(tag.as_bytes()));
    mix64(h ^ index)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rng {
    state: u64,
    spare_normal: Option<f64>,
}

impl Rng {
    /// Name of the generator algorithm backing every stream.
    pub const ALGORITHM: &'static str = "splitmix64";

    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_normal: None,
        }
    }

    pub fn derive(seed: u64, tag: &str, index: u64) -> Self {
        Self::new(derive_seed(seed, tag, index))
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform double in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` (Lemire's multiply-and-reject).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let mut m = u128::from(self.next_u64()) * u128::from(n);
        if (m as u64) < n {
            let threshold = n.wrapping_neg() % n;
            while (m as u64) < threshold {
                m = u128::from(self.next_u64()) * u128::from(n);
            }
        }
        (m >> 64) as usize
    }

    /// Standard normal draw via Box–Muller; the two outputs of each
    /// transform are returned in order (cosine branch first).
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn normal(&mut self, mean: f64, std: f64) -> f64 {
        mean + std * self.standard_normal()
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.next_f64()
    }
}

/// `n` draws from `N(mean, std²)`.
pub fn rng_normal(rng: &mut Rng, mean: f64, std: f64, n: usize) -> Result<Vec<f64>> {
    if !(std >= 0.0) || !std.is_finite() {
        return Err(Error::param(format!(
            "standard deviation must be >= 0, got {std}"
        )));
    }
    if !mean.is_finite() {
        return Err(Error::param(format!("mean must be finite, got {mean}")));
    }
    Ok((0..n).map(|_| rng.normal(mean, std)).collect())
}

/// `s` independent uniform picks from `values`.
pub fn sample_with_replacement(rng: &mut Rng, values: &[f64], s: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::param("cannot sample from an empty pool"));
    }
    if s == 0 {
        return Err(Error::param("sample size must be >= 1"));
    }
    let mut out = vec![0.0; s];
    fill_with_replacement(rng, values, &mut out);
    Ok(out)
}

/// Allocation-free variant of [`sample_with_replacement`]; `values` must be non-empty.
pub(crate) fn fill_with_replacement(rng: &mut Rng, values: &[f64], out: &mut [f64]) {
    for slot in out.iter_mut() {
        *slot = values[rng.below(values.len())];
    }
}
