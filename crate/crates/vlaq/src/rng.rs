//! Small deterministic random number generator for circuit generation.
//!
//! Benchmark circuits must be reproducible from a seed alone, across
//! platforms and releases, so the generator is pinned down to the exact
//! recurrence instead of delegating to an external crate:
//!
//! ```text
//! state[k+1] = state[k] * 6364136223846793005 + 1442695040888963407   (mod 2^64)
//! ```
//!
//! This is a plain 64-bit linear congruential generator (the multiplier is
//! Knuth's MMIX constant). Every derived quantity is defined on top of
//! `next_u64` exactly as implemented here; changing any of it would change
//! every seeded benchmark circuit.

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

/// Seeded 64-bit linear congruential generator.
#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    /// The seed is the initial state, used as-is.
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    /// Advances the recurrence and returns the new state.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(MULTIPLIER)
            .wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform value in [0, 1): the top 53 bits of `next_u64` scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform angle in [0, 2*pi).
    pub fn next_angle(&mut self) -> f64 {
        self.next_f64() * std::f64::consts::TAU
    }

    /// Uniform integer in [0, bound). The top 32 bits are reduced modulo
    /// `bound`; the bias is irrelevant for circuit generation and the
    /// procedure is part of the generator contract.
    pub fn next_below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        ((self.next_u64() >> 32) % bound as u64) as usize
    }

    /// Fisher-Yates shuffle driven by `next_below`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i + 1);
            items.swap(i, j);
        }
    }
}
