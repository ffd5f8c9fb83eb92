//! Seed splitting for reproducible Monte Carlo trials.
//!
//! A trial seed is `mix(mix(mix(master) ^ a) ^ b)` where `mix` is the
//! SplitMix64 finalizer and `(a, b)` are, for example, the SNR index and the
//! trial index. Each trial seed then drives a ChaCha8 generator with one
//! stream per purpose, so drawing more channel samples never shifts the data
//! or noise sequences. Seeds do not depend on the waveform, which gives
//! common random numbers across compared waveforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function applied to `x + golden ratio`.
pub fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of trial `(a, b)` from the master seed.
pub fn split_seed(master: u64, a: u64, b: u64) -> u64 {
    mix(mix(mix(master) ^ a) ^ b)
}

/// Independent random streams used inside one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Data = 0,
    Channel = 1,
    Noise = 2,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
