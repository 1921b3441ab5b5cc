//! Monte Carlo estimators and one-sample Kolmogorov–Smirnov tests.

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::process::{GaussianStream, StreamPlan};

/// Single-pass mean and variance (Welford), mergeable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self, seed: Option<u64>) -> Result<McEstimate> {
        if self.count < 2 {
            return Err(Error::TooFewSamples { needed: 2, got: self.count as usize });
        }
        let variance = self.variance();
        Ok(McEstimate {
            mean: self.mean,
            variance,
            std_error: (variance / self.count as f64).sqrt(),
            count: self.count,
            seed,
        })
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        iter.into_iter().for_each(|x| s.push(x));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub count: u64,
    pub seed: Option<u64>,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64], seed: Option<u64>) -> Result<Self> {
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteDraw { index });
        }
        samples.iter().copied().collect::<RunningStats>().estimate(seed)
    }

    /// `|mean − expected| ≤ k·SE + floor`.
    pub fn agrees_with(&self, expected: f64, k: f64, floor: f64) -> bool {
        (self.mean - expected).abs() <= k * self.std_error + floor
    }
}

/// Evaluates `f(k)` for `k = 0..count` in parallel and returns the results in
/// index order, so downstream folds do not depend on scheduling.
pub fn par_map_paths<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count as u64).into_par_iter().map(f).collect()
}

/// Draws `sampler(stream of path k)` for `k = 0..count` and folds them
/// sequentially in index order.
pub fn mc_estimate<F>(count: usize, streams: StreamPlan, sampler: F) -> Result<McEstimate>
where
    F: Fn(&mut GaussianStream) -> f64 + Sync + Send,
{
    if count < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: count });
    }
    let draws = par_map_paths(count, |k| sampler(&mut streams.stream(k)));
    McEstimate::from_samples(&draws, Some(streams.seed()))
}

pub fn normal_cdf(x: f64, mean: f64, variance: f64) -> f64 {
    0.5 * erfc(-(x - mean) / (2.0 * variance).sqrt())
}

pub const KS_MIN_SAMPLES: usize = 30;
pub const KS_SERIES_TERMS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
}

/// One-sample KS test against `N(mean, variance)`.
///
/// The p-value is the Kolmogorov limit law evaluated at Stephens' corrected
/// statistic `(√n + 0.12 + 0.11/√n)·D`. For `λ ≥ 1.18` the alternating series
/// `2 Σ (−1)^{k−1} e^{−2k²λ²}` is used, truncated at 100 terms; below that the
/// equivalent theta-function form converges faster and avoids cancellation.
pub fn ks_test(samples: &[f64], mean: f64, variance: f64) -> Result<KsReport> {
    if variance.is_nan() || variance <= 0.0 {
        return Err(Error::DegenerateReference);
    }
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::TooFewSamples { needed: KS_MIN_SAMPLES, got: samples.len() });
    }
    if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteDraw { index });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = normal_cdf(x, mean, variance);
            (cdf - i as f64 / n).max((i + 1) as f64 / n - cdf)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    Ok(KsReport {
        statistic,
        p_value: kolmogorov_survival(lambda),
        samples: sorted.len(),
        mean,
        variance,
    })
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda < 1.18 {
        let pi2 = std::f64::consts::PI.powi(2);
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda
            * (1..=KS_SERIES_TERMS)
                .map(|k| {
                    let j = (2 * k - 1) as f64;
                    (-j * j * pi2 / (8.0 * lambda * lambda)).exp()
                })
                .sum::<f64>();
        1.0 - cdf
    } else {
        2.0 * (1..=KS_SERIES_TERMS)
            .map(|k| {
                let k = k as f64;
                let sign = if k as u64 % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * k * k * lambda * lambda).exp()
            })
            .sum::<f64>()
    };
    p.clamp(0.0, 1.0)
}
