//! Seeded, platform-independent random streams.
//!
//! Every stochastic quantity in this crate is drawn from a ChaCha12 generator
//! keyed by an explicit 64-bit seed. Experiments derive one sub-seed per
//! (trial index, purpose) through SplitMix64, so trials are independent,
//! order-insensitive and reproducible across machines. Output files record
//! [`RNG_NAME`] so results can be tied to the generator that produced them.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Generator identifier recorded in run manifests and CSV headers.
pub const RNG_NAME: &str = "chacha12+splitmix64";

/// What a derived sub-stream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    /// Sensing matrix entries.
    Sensing = 1,
    /// Signal or coefficient synthesis.
    Signal = 2,
    /// Observation noise.
    Noise = 3,
    /// Class/test-vector selection in the digit experiment.
    Selection = 4,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for one (trial, purpose) sub-stream of a base seed.
pub fn derive_seed(base_seed: u64, trial: u64, purpose: Purpose) -> u64 {
    let mut state = base_seed;
    let a = splitmix64(&mut state);
    let mut state = a ^ trial.wrapping_mul(0xA24B_AED4_963E_E407);
    let b = splitmix64(&mut state);
    let mut state = b ^ (purpose as u64);
    splitmix64(&mut state)
}

/// A ChaCha12 generator keyed by `seed`.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_are_deterministic() {
        assert_eq!(
            derive_seed(7, 3, Purpose::Sensing),
            derive_seed(7, 3, Purpose::Sensing)
        );
    }

    #[test]
    fn derived_seeds_separate_purposes_and_trials() {
        let s = derive_seed(7, 3, Purpose::Sensing);
        assert_ne!(s, derive_seed(7, 3, Purpose::Noise));
        assert_ne!(s, derive_seed(7, 4, Purpose::Sensing));
        assert_ne!(s, derive_seed(8, 3, Purpose::Sensing));
    }
}
