//! Seeded random streams used by every generator.
//!
//! All draws go through [`StreamRng`], a ChaCha8 generator keyed by a 64-bit
//! seed and a per-phase stream id. Each generation phase owns its own stream,
//! so adding draws to one phase never shifts the values another phase sees.
//! Bounded integers are produced with our own rejection sampler on top of the
//! raw `u64` output, which keeps layouts stable regardless of how the `rand`
//! distribution code evolves.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name recorded in configuration files and layout documents.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Generation phases, each mapped to a fixed ChaCha stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Phase {
    Split = 0,
    Room = 1,
    Corridor = 2,
    Window = 3,
    Params = 4,
    Seeds = 5,
}

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, phase: Phase) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(phase as u64);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform value in `0..n`. `n` must be non-zero.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        // reject the short tail so every residue is equally likely
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return v % n;
            }
        }
    }

    /// Uniform value in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        let span = (hi - lo) as u64;
        if span == u64::MAX {
            return self.next_u64() as i64;
        }
        lo + self.below(span + 1) as i64
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_test_vector() {
        // frozen output; a change here means every stored layout changes
        let mut rng = StreamRng::new(42, Phase::Split);
        let got: Vec<u64> = (0..3).map(|_| rng.next_u64()).collect();
        let mut again = StreamRng::new(42, Phase::Split);
        let again: Vec<u64> = (0..3).map(|_| again.next_u64()).collect();
        assert_eq!(got, again);
        assert_eq!(got, PINNED_SEED42_SPLIT.to_vec());
    }

    const PINNED_SEED42_SPLIT: [u64; 3] = [12578764544318200737, 17529487244874322312, 7886285670807131020];

    #[test]
    fn streams_are_independent() {
        let mut a = StreamRng::new(7, Phase::Split);
        let mut b = StreamRng::new(7, Phase::Room);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn bounded_draws_stay_in_range() {
        let mut rng = StreamRng::new(1, Phase::Params);
        let mut seen = [false; 5];
        for _ in 0..1000 {
            let v = rng.range_inclusive(3, 7);
            assert!((3..=7).contains(&v));
            seen[(v - 3) as usize] = true;
        }
        assert!(seen.iter().all(|s| *s));
        assert_eq!(rng.range_inclusive(4, 4), 4);
    }
}
