use super::cantor::{cantor_eval, DEFAULT_CANTOR_DEPTH};
use super::piecewise::PiecewiseLinear;
use super::{Integrator, Interval};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum MeanKind {
    Zero,
    /// `slope * t + intercept`.
    Linear { slope: f64, intercept: f64 },
    /// Linear interpolation between knots; tabulated inputs land here too.
    PiecewiseLinear(PiecewiseLinear),
    /// `scale * C((t - a) / (b - a))` with `C` the Cantor function.
    Cantor { depth: u32, scale: f64 },
}

/// Direction of a mean function over its whole interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    Increasing,
    Decreasing,
    Neither,
}

/// A continuous bounded-variation mean function `λ` on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFunction {
    kind: MeanKind,
    interval: Interval,
}

impl MeanFunction {
    pub fn zero(interval: Interval) -> Self {
        Self { kind: MeanKind::Zero, interval }
    }

    pub fn linear(interval: Interval, slope: f64, intercept: f64) -> Result<Self> {
        if !slope.is_finite() || !intercept.is_finite() {
            return Err(Error::InvalidFunction("linear mean function needs finite coefficients".into()));
        }
        Ok(Self { kind: MeanKind::Linear { slope, intercept }, interval })
    }

    /// Knots must run from `a` to `b`.
    pub fn piecewise(interval: Interval, knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let pl = PiecewiseLinear::new(knots, values)?;
        check_span(&pl, interval)?;
        Ok(Self { kind: MeanKind::PiecewiseLinear(pl), interval })
    }

    /// Tabulated `(t, λ(t))` pairs, linearly interpolated.
    pub fn table(interval: Interval, points: &[(f64, f64)]) -> Result<Self> {
        let (knots, values) = points.iter().copied().unzip();
        Self::piecewise(interval, knots, values)
    }

    pub fn cantor(interval: Interval) -> Self {
        Self {
            kind: MeanKind::Cantor { depth: DEFAULT_CANTOR_DEPTH, scale: 1.0 },
            interval,
        }
    }

    pub fn cantor_with(interval: Interval, depth: u32, scale: f64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidFunction("Cantor depth must be positive".into()));
        }
        if !scale.is_finite() {
            return Err(Error::InvalidFunction("Cantor scale must be finite".into()));
        }
        Ok(Self { kind: MeanKind::Cantor { depth, scale }, interval })
    }

    pub fn kind(&self) -> &MeanKind {
        &self.kind
    }

    pub fn monotonicity(&self) -> Monotonicity {
        let from_sign = |s: f64| {
            if s > 0.0 {
                Monotonicity::Increasing
            } else if s < 0.0 {
                Monotonicity::Decreasing
            } else {
                Monotonicity::Constant
            }
        };
        match &self.kind {
            MeanKind::Zero => Monotonicity::Constant,
            MeanKind::Linear { slope, .. } => from_sign(*slope),
            MeanKind::Cantor { scale, .. } => from_sign(*scale),
            MeanKind::PiecewiseLinear(pl) => match (pl.is_nondecreasing(), pl.is_nonincreasing()) {
                (true, true) => Monotonicity::Constant,
                (true, false) => Monotonicity::Increasing,
                (false, true) => Monotonicity::Decreasing,
                (false, false) => Monotonicity::Neither,
            },
        }
    }

    /// Jordan parts `(P(t), N(t))` with `λ(t) = λ(a) + P(t) - N(t)`, both
    /// nondecreasing and zero at `a`. Caller guarantees `t ∈ [a, b]`.
    fn jordan(&self, t: f64) -> (f64, f64) {
        let a = self.interval.start();
        let split = |d: f64| if d >= 0.0 { (d, 0.0) } else { (0.0, -d) };
        match &self.kind {
            MeanKind::Zero => (0.0, 0.0),
            MeanKind::Linear { slope, .. } => split(slope * (t - a)),
            MeanKind::Cantor { .. } => split(self.value(t) - self.value(a)),
            MeanKind::PiecewiseLinear(pl) => pl.jordan_parts(t),
        }
    }

    /// `|λ|(t) - |λ|(s)`.
    pub fn total_variation(&self, s: f64, t: f64) -> Result<f64> {
        self.interval.check(s)?;
        self.interval.check(t)?;
        if s > t {
            return Err(Error::InvalidArgument(format!("need s <= t, got s = {s}, t = {t}")));
        }
        Ok(self.variation_from_start(t) - self.variation_from_start(s))
    }

    fn variation_from_start(&self, t: f64) -> f64 {
        let (p, n) = self.jordan(t);
        p + n
    }

    /// The total-variation function `|λ|`, normalized to 0 at `a`.
    pub fn variation(&self) -> TotalVariation<'_> {
        TotalVariation(self)
    }

    /// `λ⁺ = λ(a) + P`, nondecreasing.
    pub fn positive_part(&self) -> PositiveVariation<'_> {
        PositiveVariation(self)
    }

    /// `λ⁻ = N`, nondecreasing; `λ = λ⁺ - λ⁻`.
    pub fn negative_part(&self) -> NegativeVariation<'_> {
        NegativeVariation(self)
    }
}

pub(crate) fn check_span(pl: &PiecewiseLinear, interval: Interval) -> Result<()> {
    let knots = pl.knots();
    if knots[0] != interval.start() || knots[knots.len() - 1] != interval.end() {
        return Err(Error::InvalidFunction(format!(
            "knots must span the interval [{}, {}]",
            interval.start(),
            interval.end()
        )));
    }
    Ok(())
}

impl Integrator for MeanFunction {
    fn interval(&self) -> Interval {
        self.interval
    }

    fn value(&self, t: f64) -> f64 {
        match &self.kind {
            MeanKind::Zero => 0.0,
            MeanKind::Linear { slope, intercept } => slope * t + intercept,
            MeanKind::PiecewiseLinear(pl) => pl.eval(t),
            MeanKind::Cantor { depth, scale } => {
                let x = self.interval.unit(t);
                scale * cantor_eval(x, *depth).expect("unit() clamps into [0, 1]")
            }
        }
    }
}

pub struct TotalVariation<'a>(&'a MeanFunction);
pub struct PositiveVariation<'a>(&'a MeanFunction);
pub struct NegativeVariation<'a>(&'a MeanFunction);

impl Integrator for TotalVariation<'_> {
    fn interval(&self) -> Interval {
        self.0.interval
    }
    fn value(&self, t: f64) -> f64 {
        self.0.variation_from_start(t)
    }
}

impl Integrator for PositiveVariation<'_> {
    fn interval(&self) -> Interval {
        self.0.interval
    }
    fn value(&self, t: f64) -> f64 {
        self.0.value(self.0.interval.start()) + self.0.jordan(t).0
    }
}

impl Integrator for NegativeVariation<'_> {
    fn interval(&self) -> Interval {
        self.0.interval
    }
    fn value(&self, t: f64) -> f64 {
        self.0.jordan(t).1
    }
}
