//! Sub- and supermartingale classification of `M(t) = ∫ₐᵗ f dX`.
//!
//! Increments of `X` after `s` are independent of the past, so
//! `E[M(t) | F_s] − M(s) = ∫ₛᵗ f dλ`. Every verdict here is decided by the sign
//! of that drift; the filtration itself is never represented.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{Integrand, StepFunction};
use crate::integral::StepOnGrid;
use crate::process::{Grid, IncrementSampler, StreamPlan, YehSpec};
use crate::stats::{par_map_paths, McEstimate};
use crate::stieltjes::{stieltjes_quad, stieltjes_step_between, Integrator, MeanFunction, Monotonicity};

/// `∫ₛᵗ f dλ`: exact for step `f`, midpoint quadrature otherwise.
pub fn conditional_increment_mean(
    f: &Integrand,
    lambda: &MeanFunction,
    s: f64,
    t: f64,
    resolution: usize,
) -> Result<f64> {
    check_pair(lambda, s, t)?;
    match f {
        Integrand::Step(step) => stieltjes_step_between(step, lambda, s, t),
        Integrand::Continuous { .. } => Ok(stieltjes_quad(|u| f.eval(u), lambda, s, t, resolution)?.value),
    }
}

fn check_pair(lambda: &MeanFunction, s: f64, t: f64) -> Result<()> {
    let iv = lambda.interval();
    iv.check(s)?;
    iv.check(t)?;
    if s > t {
        return Err(Error::InvalidArgument(format!("probe needs s <= t, got ({s}, {t})")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignCertificate {
    NonNegative,
    NonPositive,
}

impl SignCertificate {
    /// Checks a step function piece by piece.
    pub fn verify(self, f: &StepFunction) -> Result<()> {
        let ok = match self {
            SignCertificate::NonNegative => f.is_nonnegative(),
            SignCertificate::NonPositive => f.is_nonpositive(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SignCertificate(format!("{self:?} does not hold for every piece")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Martingale,
    Submartingale,
    Supermartingale,
    Neither,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub s: f64,
    pub t: f64,
    pub drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleVerdict {
    pub verdict: Verdict,
    /// For `Neither`: one probe with negative and one with positive drift.
    pub witnesses: Vec<Witness>,
    pub probes: Vec<Witness>,
}

/// Classifies `M(t) = ∫ₐᵗ f dX`.
///
/// Probes with drifts of both strict signs give `Neither`. Otherwise a sign
/// certificate on `f` and a monotone `λ` decide the verdict: constant `λ` is a
/// martingale, and an increasing (decreasing) `λ` gives a submartingale when
/// `f ≥ 0` (`f ≤ 0`) and a supermartingale in the other case. Everything else
/// is `Undetermined`; probes alone never establish a one-sided verdict.
/// Certificates on step functions are verified; on continuous integrands they
/// are taken as given.
pub fn classify(
    f: &Integrand,
    sign: Option<SignCertificate>,
    lambda: &MeanFunction,
    probes: &[(f64, f64)],
    resolution: usize,
) -> Result<MartingaleVerdict> {
    if let (Some(cert), Integrand::Step(step)) = (sign, f) {
        cert.verify(step)?;
    }
    let probes = probes
        .iter()
        .map(|&(s, t)| Ok(Witness { s, t, drift: conditional_increment_mean(f, lambda, s, t, resolution)? }))
        .collect::<Result<Vec<_>>>()?;
    let negative = probes.iter().find(|w| w.drift < 0.0);
    let positive = probes.iter().find(|w| w.drift > 0.0);
    if let (Some(n), Some(p)) = (negative, positive) {
        return Ok(MartingaleVerdict { verdict: Verdict::Neither, witnesses: vec![*n, *p], probes });
    }
    use Monotonicity::*;
    use SignCertificate::*;
    let verdict = match (lambda.monotonicity(), sign) {
        (Constant, Some(_)) => Verdict::Martingale,
        (Increasing, Some(NonNegative)) | (Decreasing, Some(NonPositive)) => Verdict::Submartingale,
        (Increasing, Some(NonPositive)) | (Decreasing, Some(NonNegative)) => Verdict::Supermartingale,
        _ => Verdict::Undetermined,
    };
    Ok(MartingaleVerdict { verdict, witnesses: Vec::new(), probes })
}

/// Monte Carlo estimate of `E[M(t) − M(s)]` over `paths` increment-sampled
/// paths on the coarsest grid carrying `f`'s partition and `{s, t}`.
pub fn mc_martingale_test(
    spec: &YehSpec,
    f: &StepFunction,
    s: f64,
    t: f64,
    paths: usize,
    streams: StreamPlan,
) -> Result<McEstimate> {
    check_pair(spec.lambda(), s, t)?;
    if s == t {
        return Err(Error::InvalidArgument("need s < t".into()));
    }
    if paths < 100 {
        return Err(Error::TooFewSamples { needed: 100, got: paths });
    }
    let mut extra = vec![s, t];
    extra.extend(f.partition().iter().copied().filter(|&u| spec.interval().contains(u)));
    let grid = Grid::through(spec.interval(), &extra)?;
    let sampler = IncrementSampler::new(spec, &grid)?;
    let window = f.restrict(s, t).map(|w| StepOnGrid::new(&w, &grid)).transpose()?;
    let draws = par_map_paths(paths, |k| {
        let Some(window) = &window else { return 0.0 };
        let mut values = vec![0.0; grid.len()];
        sampler.fill(&mut streams.stream(k), &mut values);
        window.apply(&values)
    });
    McEstimate::from_samples(&draws, Some(streams.seed()))
}
