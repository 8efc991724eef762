//! Counter-based deterministic randomness.
//!
//! Every random decision in the crate is drawn from a [`Stream`] keyed by a
//! master seed plus a small tuple of integers (vertex id, round number, ...).
//! Streams for different keys are independent for all practical purposes and
//! a stream's output depends only on its key, never on evaluation order.
//! This is what makes graph generation and the round engine reproducible and
//! schedule independent.

/// SplitMix64 finaliser; a cheap, well-mixed 64-bit permutation.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// A small-state generator seeded from a key; SplitMix64 stepping.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

impl Stream {
    /// Derives a stream from a master seed and a key tuple. The key parts
    /// are absorbed one by one so that e.g. `(1, 23)` and `(12, 3)` produce
    /// unrelated streams.
    pub fn derive(seed: u64, parts: &[u64]) -> Self {
        let mut state = mix64(seed ^ GOLDEN);
        for (i, &p) in parts.iter().enumerate() {
            state = mix64(state ^ p.wrapping_mul(GOLDEN) ^ (i as u64 + 1));
        }
        Stream { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw from `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `[0, bound)` without modulo bias.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        // Rejection sampling over the largest multiple of `bound`.
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % bound;
            }
        }
    }

    /// Poisson draw by inverse transform. Means above 16 are split into
    /// chunks so the running CDF never underflows; the sum of independent
    /// Poisson chunks has exactly the requested mean.
    pub fn poisson(&mut self, mean: f64) -> u64 {
        assert!(mean >= 0.0 && mean.is_finite());
        let mut remaining = mean;
        let mut total = 0u64;
        while remaining > 0.0 {
            let chunk = remaining.min(16.0);
            remaining -= chunk;
            total += self.poisson_small(chunk);
        }
        total
    }

    fn poisson_small(&mut self, mean: f64) -> u64 {
        let u = self.next_f64();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        while u > cdf && k < 1024 {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
        }
        k
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
