//! Mean and variance functions, the Lebesgue–Stieltjes measures they
//! induce, and integrals of deterministic functions against them.

mod cantor;
mod mean;
mod piecewise;
mod variance;

pub use cantor::{cantor_eval, DEFAULT_CANTOR_DEPTH};
pub use mean::{
    MeanFunction, MeanKind, Monotonicity, NegativeVariation, PositiveVariation, TotalVariation,
};
pub use piecewise::PiecewiseLinear;
pub use variance::{rho_inverse, VarianceFunction, VarianceKind};

use crate::error::{Error, Result};
use crate::funcspace::StepFunction;

/// A finite time interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { t, a: self.a, b: self.b })
        }
    }

    /// Affine map onto `[0, 1]`, clamped.
    pub fn unit(&self, t: f64) -> f64 {
        ((t - self.a) / (self.b - self.a)).clamp(0.0, 1.0)
    }

    /// `n + 1` equally spaced points with both endpoints exact.
    pub fn uniform_points(&self, n: usize) -> Vec<f64> {
        let h = self.length() / n as f64;
        let mut pts: Vec<f64> = (0..=n).map(|i| self.a + i as f64 * h).collect();
        pts[n] = self.b;
        pts
    }
}

/// A function `μ` on an interval whose increments define a Stieltjes measure.
///
/// Implemented by [`MeanFunction`], [`VarianceFunction`], the Jordan parts of a
/// mean function, and sums of these.
pub trait Integrator: Sync {
    fn interval(&self) -> Interval;

    /// Value at `t`; callers guarantee `t` lies in the interval.
    fn value(&self, t: f64) -> f64;

    fn eval(&self, t: f64) -> Result<f64> {
        self.interval().check(t)?;
        Ok(self.value(t))
    }
}

impl<T: Integrator + ?Sized> Integrator for &T {
    fn interval(&self) -> Interval {
        (**self).interval()
    }
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
}

/// Pointwise sum `μ₁ + μ₂` of two integrators on the same interval.
pub struct MeasureSum<A, B>(pub A, pub B);

impl<A: Integrator, B: Integrator> Integrator for MeasureSum<A, B> {
    fn interval(&self) -> Interval {
        self.0.interval()
    }
    fn value(&self, t: f64) -> f64 {
        self.0.value(t) + self.1.value(t)
    }
}

/// `Σᵢ cᵢ (μ(tᵢ) − μ(tᵢ₋₁))`, exact closed form.
pub fn stieltjes_step(f: &StepFunction, mu: &impl Integrator) -> Result<f64> {
    let iv = mu.interval();
    let (start, end) = f.support();
    if start < iv.start() || end > iv.end() {
        return Err(Error::PartitionOutOfDomain { start, end, a: iv.start(), b: iv.end() });
    }
    Ok(step_sum(f, mu, start, end))
}

/// `∫ₛᵗ f dμ` for a step function, clipping the partition to `[s, t]`.
pub fn stieltjes_step_between(f: &StepFunction, mu: &impl Integrator, s: f64, t: f64) -> Result<f64> {
    let iv = mu.interval();
    iv.check(s)?;
    iv.check(t)?;
    if s > t {
        return Err(Error::InvalidArgument(format!("need s <= t, got s = {s}, t = {t}")));
    }
    Ok(step_sum(f, mu, s, t))
}

fn step_sum(f: &StepFunction, mu: &impl Integrator, s: f64, t: f64) -> f64 {
    let p = f.partition();
    f.values()
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| {
            let lo = p[i].max(s);
            let hi = p[i + 1].min(t);
            (lo < hi).then(|| c * (mu.value(hi) - mu.value(lo)))
        })
        .sum()
}

/// Result of a Riemann–Stieltjes quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// `|R(n) − R(n/2)|`; infinite when `n = 1`.
    pub refinement: f64,
}

/// Riemann–Stieltjes sum of `f` against `μ` on `[s, t]` with `resolution`
/// uniform cells and midpoint tags.
pub fn stieltjes_quad<F>(f: F, mu: &impl Integrator, s: f64, t: f64, resolution: usize) -> Result<Quadrature>
where
    F: Fn(f64) -> f64,
{
    let iv = mu.interval();
    iv.check(s)?;
    iv.check(t)?;
    if s > t {
        return Err(Error::InvalidArgument(format!("need s <= t, got s = {s}, t = {t}")));
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("quadrature resolution must be >= 1".into()));
    }
    let value = StieltjesRule::uniform(mu, s, t, resolution).integrate(&f)?;
    let refinement = if resolution >= 2 {
        let coarse = StieltjesRule::uniform(mu, s, t, resolution / 2).integrate(&f)?;
        (value - coarse).abs()
    } else {
        f64::INFINITY
    };
    Ok(Quadrature { value, refinement })
}

/// Tags and weights of a Riemann–Stieltjes sum `Σ f(τⱼ) wⱼ`.
#[derive(Debug, Clone)]
pub struct StieltjesRule {
    tags: Vec<f64>,
    weights: Vec<f64>,
}

impl StieltjesRule {
    /// Uniform cells in `t` on `[s, t]`, tagged at their midpoints.
    pub fn uniform(mu: &impl Integrator, s: f64, t: f64, cells: usize) -> Self {
        let h = (t - s) / cells as f64;
        let mut tags = Vec::with_capacity(cells);
        let mut weights = Vec::with_capacity(cells);
        let mut left = s;
        let mut mu_left = mu.value(s);
        for i in 1..=cells {
            let right = if i == cells { t } else { s + i as f64 * h };
            let mu_right = mu.value(right);
            tags.push(0.5 * (left + right));
            weights.push(mu_right - mu_left);
            left = right;
            mu_left = mu_right;
        }
        Self { tags, weights }
    }

    /// Cells of equal `μ`-mass over the whole interval, each tagged at the
    /// point splitting its mass in half. `μ` must be strictly increasing.
    pub fn equal_mass(mu: &impl Integrator, cells: usize) -> Self {
        let iv = mu.interval();
        let m0 = mu.value(iv.start());
        let total = mu.value(iv.end()) - m0;
        let h = total / cells as f64;
        let mut tags = Vec::with_capacity(cells);
        let mut weights = Vec::with_capacity(cells);
        let mut mu_left = m0;
        for i in 1..=cells {
            let right = if i == cells { iv.end() } else { bisect_inverse(mu, m0 + i as f64 * h) };
            let mu_right = mu.value(right);
            tags.push(bisect_inverse(mu, m0 + (i as f64 - 0.5) * h));
            weights.push(mu_right - mu_left);
            mu_left = mu_right;
        }
        Self { tags, weights }
    }

    pub fn tags(&self) -> &[f64] {
        &self.tags
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut acc = 0.0;
        for (&tau, &w) in self.tags.iter().zip(&self.weights) {
            let v = f(tau);
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { t: tau });
            }
            acc += v * w;
        }
        Ok(acc)
    }
}

/// Smallest-residual `t` with `μ(t) ≈ v` for nondecreasing `μ`, by bisection
/// down to adjacent floating-point numbers.
pub(crate) fn bisect_inverse(mu: &impl Integrator, v: f64) -> f64 {
    let iv = mu.interval();
    let (mut lo, mut hi) = (iv.start(), iv.end());
    if v <= mu.value(lo) {
        return lo;
    }
    if v >= mu.value(hi) {
        return hi;
    }
    for _ in 0..2100 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if mu.value(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (mu.value(lo) - v).abs() <= (mu.value(hi) - v).abs() {
        lo
    } else {
        hi
    }
}
