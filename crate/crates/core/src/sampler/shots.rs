use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// One step of the SplitMix64 sequence.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Shots per Pauli term, number of repetitions and the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotPlan {
    pub shots: u64,
    pub repetitions: usize,
    pub master_seed: u64,
}

impl ShotPlan {
    pub fn new(shots: u64, repetitions: usize, master_seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::Domain(
                "a shot plan needs at least one shot per term".into(),
            ));
        }
        if repetitions == 0 {
            return Err(Error::Domain(
                "a shot plan needs at least one repetition".into(),
            ));
        }
        Ok(Self {
            shots,
            repetitions,
            master_seed,
        })
    }

    /// Seed of the RNG stream for `(stream, repetition, term)`.
    ///
    /// `stream` separates independent experiments sharing a master seed
    /// (e.g. grid points); `term` is the matrix-element index.
    pub fn derived_seed(&self, stream: u64, repetition: usize, term: usize) -> u64 {
        derive_seed(self.master_seed, &[stream, repetition as u64, term as u64])
    }
}

/// Chains SplitMix64 over `parts`, starting from `master`.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix64(master), |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

/// Estimate of `⟨P⟩` from `shots` binomial ±1 outcomes: `2k/shots − 1` with
/// `k ~ Binomial(shots, (1 + ⟨P⟩)/2)`.
pub fn sample_expectation<R: Rng + ?Sized>(exact: f64, shots: u64, rng: &mut R) -> f64 {
    let p = ((1.0 + exact) * 0.5).clamp(0.0, 1.0);
    let k = Binomial::new(shots, p)
        .expect("probability clamped to [0, 1]")
        .sample(rng);
    2.0 * k as f64 / shots as f64 - 1.0
}
