use super::mean::check_span;
use super::piecewise::PiecewiseLinear;
use super::{bisect_inverse, Integrator, Interval};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum VarianceKind {
    /// `t - a`.
    Identity,
    /// `slope * (t - a)`, `slope > 0`.
    Linear { slope: f64 },
    /// `t^p - a^p`, `p >= 1`, `a >= 0`.
    Power { exponent: f64 },
    /// Linear interpolation between knots, shifted so the first value is 0.
    PiecewiseLinear(PiecewiseLinear),
}

/// A continuous, strictly increasing variance function `ρ` with `ρ(a) = 0`.
///
/// Inputs with `ρ(a) ≠ 0` are shifted at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceFunction {
    kind: VarianceKind,
    interval: Interval,
}

const NOT_INCREASING: &str = "variance function must be strictly increasing";

impl VarianceFunction {
    pub fn identity(interval: Interval) -> Self {
        Self { kind: VarianceKind::Identity, interval }
    }

    pub fn linear(interval: Interval, slope: f64) -> Result<Self> {
        if !(slope.is_finite() && slope > 0.0) {
            return Err(Error::InvalidFunction(NOT_INCREASING.into()));
        }
        Ok(Self { kind: VarianceKind::Linear { slope }, interval })
    }

    pub fn power(interval: Interval, exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(Error::InvalidFunction(format!(
                "power variance function needs exponent >= 1, got {exponent}"
            )));
        }
        if interval.start() < 0.0 {
            return Err(Error::InvalidFunction(
                "power variance function needs the interval inside [0, inf)".into(),
            ));
        }
        Ok(Self { kind: VarianceKind::Power { exponent }, interval })
    }

    pub fn piecewise(interval: Interval, knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let pl = PiecewiseLinear::new(knots, values)?;
        check_span(&pl, interval)?;
        if !pl.is_strictly_increasing() {
            return Err(Error::InvalidFunction(NOT_INCREASING.into()));
        }
        let shift = pl.values()[0];
        Ok(Self { kind: VarianceKind::PiecewiseLinear(pl.shifted(shift)), interval })
    }

    pub fn table(interval: Interval, points: &[(f64, f64)]) -> Result<Self> {
        let (knots, values) = points.iter().copied().unzip();
        Self::piecewise(interval, knots, values)
    }

    pub fn kind(&self) -> &VarianceKind {
        &self.kind
    }

    /// Total mass `T = ρ(b)`.
    pub fn mass(&self) -> f64 {
        self.value(self.interval.end())
    }

    /// Lower and upper bounds of `ρ'` sampled on a uniform grid of `cells`
    /// cells (difference quotients, so exact for piecewise-linear kinds whose
    /// knots lie on the grid).
    pub fn slope_bounds(&self, cells: usize) -> (f64, f64) {
        let iv = self.interval;
        let h = iv.length() / cells as f64;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for i in 0..cells {
            let t0 = iv.start() + i as f64 * h;
            let t1 = if i + 1 == cells { iv.end() } else { t0 + h };
            let q = (self.value(t1) - self.value(t0)) / (t1 - t0);
            lo = lo.min(q);
            hi = hi.max(q);
        }
        (lo, hi)
    }
}

impl Integrator for VarianceFunction {
    fn interval(&self) -> Interval {
        self.interval
    }

    fn value(&self, t: f64) -> f64 {
        let a = self.interval.start();
        match &self.kind {
            VarianceKind::Identity => t - a,
            VarianceKind::Linear { slope } => slope * (t - a),
            VarianceKind::Power { exponent } => t.powf(*exponent) - a.powf(*exponent),
            VarianceKind::PiecewiseLinear(pl) => pl.eval(t),
        }
    }
}

/// Inverse of `ρ` by monotone bisection: `t` with `|ρ(t) - v| ≤ 1e-12·max(1, ρ(b))`.
pub fn rho_inverse(rho: &VarianceFunction, v: f64) -> Result<f64> {
    let max = rho.mass();
    if !(0.0..=max).contains(&v) {
        return Err(Error::OutOfRange { v, max });
    }
    Ok(bisect_inverse(rho, v))
}
