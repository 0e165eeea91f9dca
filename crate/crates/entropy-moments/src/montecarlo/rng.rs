//! Reproducible random streams.
//!
//! Workers draw from independent substreams of a counter-based generator
//! (ChaCha encrypts a block counter, so streams are random-access and
//! disjoint by construction): substream `w` of seed `s` is the ChaCha12
//! stream with stream id `w`. Fixed `(seed, worker)` always replays the same
//! numbers, on any platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// One worker's private stream.
pub struct SubStream {
    rng: ChaCha12Rng,
    /// Spare normal from the last Box-Muller pair.
    cached: Option<f64>,
}

impl SubStream {
    pub fn new(seed: u64, worker: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(worker);
        SubStream { rng, cached: None }
    }

    /// Uniform on `(0, 1]` — the closed-at-1 side keeps `ln(u)` finite.
    pub fn uniform_open01(&mut self) -> f64 {
        // 53 random bits into (0, 1]
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 1.0) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal via Box-Muller, pairwise from the counter stream.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.cached.take() {
            return z;
        }
        let u1 = self.uniform_open01();
        let u2 = self.uniform_open01();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.cached = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Standard complex normal: `E[|x|²] = 1`, real and imaginary parts
    /// independent `N(0, 1/2)`.
    pub fn standard_complex_normal(&mut self) -> num_complex::Complex64 {
        const HALF_SQRT: f64 = std::f64::consts::FRAC_1_SQRT_2;
        num_complex::Complex64::new(
            HALF_SQRT * self.standard_normal(),
            HALF_SQRT * self.standard_normal(),
        )
    }
}
