//! Counter-based random numbers.
//!
//! [`CounterRng`] maps `(key, counter)` to an output with the SplitMix64
//! finalizer:
//!
//! ```text
//! x   = key + counter * 0x9E3779B97F4A7C15     (wrapping)
//! x   = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9
//! x   = (x ^ (x >> 27)) * 0x94D049BB133111EB
//! out = x ^ (x >> 31)
//! ```
//!
//! with `counter` starting at 1 and increasing by one per draw, so the
//! output stream for a key is exactly the SplitMix64 stream seeded with
//! that key. Independent streams are derived with [`stream_seed`]:
//!
//! ```text
//! stream_seed(base, index) = mix64(base ^ mix64(index + 0xD1B54A32D192ED03))
//! ```
//!
//! Every consumer in this crate derives per-trial and per-grid-point keys
//! this way, so results depend only on the base seed and the index.

use crate::math::{floor, ln};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;

/// The SplitMix64 output function.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Key of the `index`-th independent stream under `base`.
#[inline]
pub fn stream_seed(base: u64, index: u64) -> u64 {
    mix64(base ^ mix64(index.wrapping_add(STREAM_SALT)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        CounterRng { key, counter: 0 }
    }

    /// Number of values drawn so far.
    pub fn position(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.key
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`.
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Bernoulli draw; always consumes exactly one value.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Failures before the first success of independent trials with success
    /// probability `p`. Returns `None` for `p <= 0` (never succeeds). Always
    /// consumes exactly one value.
    pub fn geometric_failures(&mut self, p: f64) -> Option<u64> {
        let u = self.uniform_open0();
        if p <= 0.0 {
            return None;
        }
        if p >= 1.0 {
            return Some(0);
        }
        let k = floor(ln(u) / libm::log1p(-p));
        if k >= u64::MAX as f64 {
            None
        } else {
            Some(k as u64)
        }
    }
}
