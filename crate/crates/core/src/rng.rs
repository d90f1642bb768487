//! Seed derivation and deterministic shuffling.
//!
//! Every random choice in the workbench flows from a `u64` seed through
//! ChaCha12, and sub-seeds (per task, per synthesized state, per retry) are
//! derived with a SplitMix64 finalizer so that regenerating any piece is
//! independent of generation order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a sub-seed: `mix_seed(base, stream)` differs for every stream and
/// is itself a valid base for further derivation.
pub fn mix_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream))
}

/// ChaCha12 generator for a derived seed.
pub fn seeded(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Fisher–Yates shuffle of `0..n`.
pub fn shuffled_indices(n: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}

/// `count` distinct indices from `0..n`, in shuffled order.
pub fn sample_indices(n: usize, count: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
    assert!(count <= n, "cannot sample {count} of {n}");
    let mut order = shuffled_indices(n, rng);
    order.truncate(count);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_seed_separates_streams() {
        let a = mix_seed(42, 1);
        let b = mix_seed(42, 2);
        assert_ne!(a, b);
        assert_eq!(a, mix_seed(42, 1));
    }

    #[test]
    fn shuffle_is_a_permutation_and_deterministic() {
        let mut rng = seeded(5);
        let p = shuffled_indices(100, &mut rng);
        let mut sorted = p.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());

        let mut rng2 = seeded(5);
        assert_eq!(p, shuffled_indices(100, &mut rng2));
    }

    #[test]
    fn sampled_indices_are_distinct() {
        let mut rng = seeded(9);
        let s = sample_indices(400, 50, &mut rng);
        assert_eq!(s.len(), 50);
        let mut d = s.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 50);
    }
}
