use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use statrs::function::erf::erfc_inv;

/// Counter-based Gaussian stream.
///
/// The `n`-th draw is a pure function of `(seed, index, n)`: ChaCha8 keyed by
/// the master seed, with the stream index as its nonce and `n` as the block
/// counter. Gaussians come from the inverse normal CDF, one 64-bit word per
/// draw, so every draw consumes a fixed amount of the stream.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
    position: u64,
}

impl GaussianStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { seed, index, rng, position: 0 }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Number of draws consumed so far.
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Jump to draw `n`.
    pub fn seek(&mut self, n: u64) {
        self.rng.set_word_pos(2 * n as u128);
        self.position = n;
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn next_uniform(&mut self) -> f64 {
        self.position += 1;
        let x = self.rng.next_u64() >> 11;
        (x as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_gaussian(&mut self) -> f64 {
        standard_normal_quantile(self.next_uniform())
    }

    pub fn fill_gaussian(&mut self, out: &mut [f64]) {
        for z in out {
            *z = self.next_gaussian();
        }
    }
}

/// Assignment of streams to path indices: path `k` draws from stream `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamPlan {
    seed: u64,
    reuse: bool,
}

impl StreamPlan {
    pub fn new(seed: u64) -> Self {
        Self { seed, reuse: false }
    }

    /// Every path draws from stream 0. This breaks independence on purpose
    /// and exists to exercise failure paths.
    pub fn reusing(seed: u64) -> Self {
        Self { seed, reuse: true }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_reusing(&self) -> bool {
        self.reuse
    }

    pub fn stream(&self, path: u64) -> GaussianStream {
        GaussianStream::new(self.seed, if self.reuse { 0 } else { path })
    }
}

/// `Φ⁻¹(p)` for `p ∈ (0, 1)`.
pub fn standard_normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}
