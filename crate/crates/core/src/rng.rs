//! Seeded deterministic random numbers.
//!
//! A SplitMix64 stream keeps sampling and corpus generation byte-identical
//! across runs, platforms, and dependency upgrades. Output quality is ample
//! for synthetic data; this is not a cryptographic generator.

/// SplitMix64 pseudo-random generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    /// Derive an independent stream for a named sub-task of `seed`.
    pub fn derived(seed: u64, salt: &str) -> SplitMix64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in salt.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        let mut rng = SplitMix64::new(seed ^ h);
        rng.next_u64();
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..bound` (`bound` > 0).
    pub fn bounded(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }

    /// Uniform value in `min..=max`.
    pub fn range_i64(&mut self, min: i64, max: i64) -> i64 {
        debug_assert!(min <= max);
        let span = (max - min) as u64 + 1;
        min + self.bounded(span) as i64
    }

    /// True with probability `permille`/1000.
    pub fn chance_permille(&mut self, permille: u32) -> bool {
        self.bounded(1000) < permille as u64
    }

    /// Move a uniformly chosen `k`-subset to the front of `items`.
    pub fn partial_shuffle<T>(&mut self, items: &mut [T], k: usize) {
        let n = items.len();
        let k = k.min(n);
        for i in 0..k {
            let j = i + self.bounded((n - i) as u64) as usize;
            items.swap(i, j);
        }
    }
}
