//! Verification batteries behind `yeh verify`. Each produces rows of
//! `(check, expected, observed, tolerance, pass)`; Monte Carlo rows use a
//! tolerance of 4 standard errors plus any stated discretization term.

use std::fmt::Write as _;

use clap::ValueEnum;
use yeh_core::funcspace::{fourier_coeffs, norm_sq_rho, project_onto, project_to_steps, Integrand, StepFunction};
use yeh_core::integral::{integral_covariance, integral_distribution, integral_mean, L2Integrator};
use yeh_core::martingale::{classify, conditional_increment_mean, mc_martingale_test, SignCertificate, Verdict};
use yeh_core::process::{Grid, IncrementSampler, SeriesSampler, StreamPlan, YehSpec};
use yeh_core::series::{series_variance_defect, Expansion};
use yeh_core::stats::{ks_test, par_map_paths, McEstimate, RunningStats};
use yeh_core::stieltjes::{Integrator, Interval, MeanFunction, VarianceFunction};

use crate::config::Model;
use crate::error::CliError;

/// Standard errors allowed in every Monte Carlo check.
pub const K_SE: f64 = 4.0;
/// Absolute floor for checks whose exact value and estimate are both at
/// quadrature-rounding level.
pub const QUADRATURE_FLOOR: f64 = 1e-10;
pub const KS_ALPHA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Moments,
    Gaussian,
    Series,
    Martingale,
    Counterexample,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Moments => "moments",
            Suite::Gaussian => "gaussian",
            Suite::Series => "series",
            Suite::Martingale => "martingale",
            Suite::Counterexample => "counterexample",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub pass: bool,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl CheckRow {
    pub fn within(check: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            expected: num(expected),
            observed: num(observed),
            tolerance: num(tolerance),
            pass: (observed - expected).abs() <= tolerance,
        }
    }

    fn mc(check: impl Into<String>, expected: f64, est: &McEstimate, floor: f64) -> Self {
        Self::within(check, expected, est.mean, K_SE * est.std_error + floor)
    }

    fn ks(check: impl Into<String>, p_value: f64) -> Self {
        Self {
            check: check.into(),
            expected: format!("p > {KS_ALPHA}"),
            observed: num(p_value),
            tolerance: num(0.0),
            pass: p_value > KS_ALPHA,
        }
    }

    fn failed(check: impl Into<String>, expected: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            expected: expected.into(),
            observed: reason.into(),
            tolerance: String::new(),
            pass: false,
        }
    }
}

pub fn rows_to_csv(rows: &[CheckRow]) -> String {
    let mut s = String::from("check,expected,observed,tolerance,pass\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.check, r.expected, r.observed, r.tolerance, r.pass);
    }
    s
}

pub fn run_suite(suite: Suite, model: &Model) -> Result<Vec<CheckRow>, CliError> {
    let mut rows = Vec::new();
    let selected: &[Suite] = match suite {
        Suite::All => &[Suite::Moments, Suite::Gaussian, Suite::Series, Suite::Martingale, Suite::Counterexample],
        s => std::slice::from_ref(match s {
            Suite::Moments => &Suite::Moments,
            Suite::Gaussian => &Suite::Gaussian,
            Suite::Series => &Suite::Series,
            Suite::Martingale => &Suite::Martingale,
            _ => &Suite::Counterexample,
        }),
    };
    for &s in selected {
        let part = match s {
            Suite::Moments => moments(model)?,
            Suite::Gaussian => gaussian(model)?,
            Suite::Series => series(model)?,
            Suite::Martingale => martingale(model)?,
            Suite::Counterexample => counterexample(model.paths, model.streams)?,
            Suite::All => unreachable!("expanded above"),
        };
        rows.extend(part.into_iter().map(|mut r| {
            r.check = format!("{}/{}", s.name(), r.check);
            r
        }));
    }
    Ok(rows)
}

fn integrand_error(e: yeh_core::Error) -> CliError {
    CliError::Config { field: "integrand".into(), message: e.to_string() }
}

/// Grid indices nearest to a quarter, half, three quarters and the end.
fn quarter_indices(grid: &Grid) -> [usize; 4] {
    let c = grid.cells() as f64;
    [0.25, 0.5, 0.75, 1.0].map(|q| ((q * c).round() as usize).max(1))
}

/// Per-path observables of increment-sampled paths, in path order.
fn observe<F>(spec: &YehSpec, grid: &Grid, paths: usize, streams: StreamPlan, f: F) -> Result<Vec<Vec<f64>>, CliError>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
{
    let sampler = IncrementSampler::new(spec, grid)?;
    Ok(par_map_paths(paths, |k| {
        let mut v = vec![0.0; grid.len()];
        sampler.fill(&mut streams.stream(k), &mut v);
        f(&v)
    }))
}

fn column_estimates(rows: &[Vec<f64>], seed: u64) -> Result<Vec<McEstimate>, CliError> {
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|j| {
            if let Some(i) = rows.iter().position(|r| !r[j].is_finite()) {
                return Err(yeh_core::Error::NonFiniteDraw { index: i }.into());
            }
            Ok(rows.iter().map(|r| r[j]).collect::<RunningStats>().estimate(Some(seed))?)
        })
        .collect()
}

/// The step function a grid-aligned L² integral actually integrates.
fn grid_projection(f: &Integrand, grid: &Grid) -> Result<Integrand, CliError> {
    match f {
        Integrand::Step(_) => Ok(f.clone()),
        Integrand::Continuous { .. } => Ok(project_onto(f, grid.points()).map_err(integrand_error)?.into()),
    }
}

fn moments(m: &Model) -> Result<Vec<CheckRow>, CliError> {
    let (spec, grid) = (&m.spec, &m.grid);
    let idx = quarter_indices(grid);
    let pairs = [(idx[0], idx[2]), (idx[1], idx[1]), (idx[1], idx[3]), (idx[0], idx[3])];
    let integ = L2Integrator::new(&m.integrand, grid, grid.cells()).map_err(integrand_error)?;
    let obs = observe(spec, grid, m.paths, m.streams, |x| {
        let i = integ.apply(x).value;
        let mut o: Vec<f64> = idx.iter().map(|&j| x[j]).collect();
        o.extend(pairs.iter().map(|&(s, t)| x[s] * x[t]));
        o.extend([i, i * i]);
        o
    })?;
    let est = column_estimates(&obs, m.streams.seed())?;
    let (lam, rho) = (spec.lambda(), spec.rho());
    let t = |j: usize| grid.points()[j];
    let mut rows = Vec::new();
    for (k, &j) in idx.iter().enumerate() {
        rows.push(CheckRow::mc(format!("mean_x(t={:.6})", t(j)), lam.value(t(j)), &est[k], 0.0));
    }
    for (k, &(s, u)) in pairs.iter().enumerate() {
        let expected = rho.value(t(s)) + lam.value(t(s)) * lam.value(t(u));
        rows.push(CheckRow::mc(format!("second_moment(s={:.6};t={:.6})", t(s), t(u)), expected, &est[4 + k], 0.0));
    }
    let f = &m.integrand;
    let fn_ = grid_projection(f, grid)?;
    let mean = integral_mean(f, lam, m.resolution)?;
    let second = integral_covariance(f, f, spec, m.resolution)?;
    let disc_mean = (integral_mean(&fn_, lam, m.resolution)? - mean).abs();
    let disc_second = (integral_covariance(&fn_, &fn_, spec, m.resolution)? - second).abs();
    rows.push(CheckRow::mc("integral_mean", mean, &est[8], disc_mean));
    rows.push(CheckRow::mc("integral_second_moment", second, &est[9], disc_second));
    Ok(rows)
}

fn gaussian(m: &Model) -> Result<Vec<CheckRow>, CliError> {
    let (spec, grid) = (&m.spec, &m.grid);
    let idx = quarter_indices(grid);
    let integ = L2Integrator::new(&m.integrand, grid, grid.cells()).map_err(integrand_error)?;
    let lam_at: Vec<f64> = grid.points().iter().map(|&t| spec.lambda().value(t)).collect();
    let obs = observe(spec, grid, m.paths, m.streams, |x| {
        vec![integ.apply(x).value, x[idx[1]] - lam_at[idx[1]], x[idx[3]] - lam_at[idx[3]]]
    })?;
    let column = |j: usize| obs.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let mut rows = Vec::new();
    let law = integral_distribution(&grid_projection(&m.integrand, grid)?, spec, m.resolution)?;
    let ks_row = |name: String, xs: &[f64], mean: f64, var: f64| match ks_test(xs, mean, var) {
        Ok(r) => CheckRow::ks(name, r.p_value),
        Err(e) => CheckRow::failed(name, format!("p > {KS_ALPHA}"), e.to_string()),
    };
    rows.push(ks_row("ks_integral".into(), &column(0), law.mean, law.variance));
    for (c, &j) in [(1, &idx[1]), (2, &idx[3])] {
        let t = grid.points()[j];
        rows.push(ks_row(format!("ks_centered_x(t={t:.6})"), &column(c), 0.0, spec.rho().value(t)));
    }
    Ok(rows)
}

fn series(m: &Model) -> Result<Vec<CheckRow>, CliError> {
    let (spec, grid) = (&m.spec, &m.grid);
    let idx = quarter_indices(grid);
    let t = |j: usize| grid.points()[j];
    let mut rows = Vec::new();

    // series-sampled centered paths against ρ(min(s, t))
    let sampler = SeriesSampler::new(spec, &m.basis, m.truncation, grid)?;
    let pairs = [(idx[0], idx[2]), (idx[1], idx[1]), (idx[1], idx[3]), (idx[3], idx[3]), (idx[0], idx[1])];
    let streams = m.streams;
    let obs = par_map_paths(m.paths, |k| {
        let mut v = vec![0.0; grid.len()];
        sampler.fill_centered(&mut streams.stream(k), &mut v);
        pairs.iter().map(|&(s, u)| v[s] * v[u]).collect::<Vec<f64>>()
    });
    let est = column_estimates(&obs, streams.seed())?;
    let defect = sampler.variance_defect();
    for (k, &(s, u)) in pairs.iter().enumerate() {
        let floor = defect[s].max(defect[u]);
        rows.push(CheckRow::mc(
            format!("series_covariance(s={:.6};t={:.6})", t(s), t(u)),
            spec.rho().value(t(s.min(u))),
            &est[k],
            floor,
        ));
    }
    for &j in &idx {
        let closed = series_variance_defect(&m.basis, m.truncation, t(j))?;
        rows.push(CheckRow::within(format!("truncation_defect(t={:.6})", t(j)), closed, defect[j], 1e-12));
    }

    // mean-square gap between the direct integral and the N-term expansion
    let orders: Vec<usize> = [1, 4, 16, 64].into_iter().filter(|&n| n <= m.truncation).collect();
    let expansions = orders
        .iter()
        .map(|&n| Expansion::new(&m.integrand, &m.basis, n, grid, grid.cells(), m.resolution))
        .collect::<Result<Vec<_>, _>>()
        .map_err(integrand_error)?;
    let lam_at: Vec<f64> = grid.points().iter().map(|&u| spec.lambda().value(u)).collect();
    let obs = observe(spec, grid, m.paths, m.streams, |x| {
        let centered: Vec<f64> = x.iter().zip(&lam_at).map(|(v, l)| v - l).collect();
        expansions
            .iter()
            .map(|e| {
                let (target, partial) = e.target_and_partial(&centered);
                (target - partial).powi(2)
            })
            .collect()
    })?;
    let est = column_estimates(&obs, m.streams.seed())?;
    let discrete = discrete_defects(m, &orders)?;
    for (((n, e), est), d) in orders.iter().zip(&expansions).zip(&est).zip(discrete) {
        let defect = e.defects()[n - 1];
        rows.push(CheckRow::mc(format!("expansion_gap(N={n})"), defect, est, QUADRATURE_FLOOR + (d - defect).abs()));
    }
    Ok(rows)
}

/// `‖fₕ − Σ_{k<N} cₖ φₖ,ₕ‖²_ρ` with `ₕ` the projection onto the grid cells:
/// the mean-square gap the sampled paths actually see, for each order.
fn discrete_defects(m: &Model, orders: &[usize]) -> Result<Vec<f64>, CliError> {
    let points = m.grid.points();
    let full = orders.iter().copied().max().unwrap_or(0);
    let coeffs = fourier_coeffs(&m.integrand, &m.basis, full, m.resolution)?;
    let mut residual = project_onto(&m.integrand, points).map_err(integrand_error)?;
    let mut out = Vec::new();
    for (k, c) in coeffs.iter().enumerate() {
        let member = project_onto(&m.basis.member(k)?, points)?;
        residual = residual.combine(1.0, &member, -c);
        if orders.contains(&(k + 1)) {
            out.push(norm_sq_rho(&residual.clone().into(), m.spec.rho(), m.resolution)?);
        }
    }
    Ok(out)
}

fn sign_of(f: &StepFunction) -> Option<SignCertificate> {
    if f.is_nonnegative() {
        Some(SignCertificate::NonNegative)
    } else if f.is_nonpositive() {
        Some(SignCertificate::NonPositive)
    } else {
        None
    }
}

/// Does a verdict agree with the signs of the probe drifts it was given?
fn consistent(verdict: Verdict, drifts: &[f64]) -> bool {
    match verdict {
        Verdict::Submartingale => drifts.iter().all(|&d| d >= 0.0),
        Verdict::Supermartingale => drifts.iter().all(|&d| d <= 0.0),
        Verdict::Martingale => drifts.iter().all(|&d| d == 0.0),
        Verdict::Neither => drifts.iter().any(|&d| d < 0.0) && drifts.iter().any(|&d| d > 0.0),
        Verdict::Undetermined => true,
    }
}

fn verdict_name(v: Verdict) -> String {
    serde_json::to_value(v).ok().and_then(|j| j.as_str().map(str::to_string)).unwrap_or_default()
}

fn drift_rows(
    spec: &YehSpec,
    f: &StepFunction,
    probes: &[(f64, f64)],
    paths: usize,
    streams: StreamPlan,
    exact_tol: Option<&[f64]>,
    resolution: usize,
) -> Result<(Vec<CheckRow>, Vec<f64>), CliError> {
    let fi: Integrand = f.clone().into();
    let mut rows = Vec::new();
    let mut drifts = Vec::new();
    for (k, &(s, t)) in probes.iter().enumerate() {
        let drift = conditional_increment_mean(&fi, spec.lambda(), s, t, resolution)?;
        drifts.push(drift);
        if let Some(expected) = exact_tol {
            rows.push(CheckRow::within(format!("exact_drift(s={s:.6};t={t:.6})"), expected[k], drift, 1e-15));
        }
        let est = mc_martingale_test(spec, f, s, t, paths, streams).map_err(|e| match e {
            yeh_core::Error::TooFewSamples { .. } => CliError::Config { field: "mc.paths".into(), message: e.to_string() },
            other => other.into(),
        })?;
        rows.push(CheckRow::mc(format!("mc_drift(s={s:.6};t={t:.6})"), drift, &est, 0.0));
    }
    Ok((rows, drifts))
}

fn martingale(m: &Model) -> Result<Vec<CheckRow>, CliError> {
    let spec = &m.spec;
    let iv: Interval = spec.interval();
    let step = match &m.integrand {
        Integrand::Step(s) => s.clone(),
        f => project_to_steps(f, iv, 16).map_err(integrand_error)?,
    };
    let (a, l) = (iv.start(), iv.length());
    let probes = [(a, a + 0.25 * l), (a + 0.25 * l, a + 0.5 * l), (a + 0.25 * l, a + 0.75 * l), (a, iv.end())];
    let (mut rows, drifts) = drift_rows(spec, &step, &probes, m.paths, m.streams, None, m.resolution)?;
    let verdict = classify(&step.clone().into(), sign_of(&step), spec.lambda(), &probes, m.resolution)?;
    rows.push(CheckRow {
        check: "verdict".into(),
        expected: "consistent with probe drifts".into(),
        observed: verdict_name(verdict.verdict),
        tolerance: String::new(),
        pass: consistent(verdict.verdict, &drifts),
    });
    Ok(rows)
}

/// The fixed counterexample: `λ(t) = t`, `ρ(t) = t` on `[0, 1]`, and
/// `f = ½, −½, 2` on the thirds of the interval.
pub fn counterexample(paths: usize, streams: StreamPlan) -> Result<Vec<CheckRow>, CliError> {
    let iv = Interval::new(0.0, 1.0)?;
    let spec = YehSpec::new(MeanFunction::linear(iv, 1.0, 0.0)?, VarianceFunction::identity(iv))?;
    let f = StepFunction::new(vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], vec![0.5, -0.5, 2.0])?;
    let probes = [(0.25, 0.5), (0.25, 0.75)];
    let exact = [-1.0 / 24.0, 1.0 / 24.0];
    let (mut rows, _) = drift_rows(&spec, &f, &probes, paths, streams, Some(&exact), 1)?;
    let verdict = classify(&f.into(), None, spec.lambda(), &probes, 1)?;
    rows.push(CheckRow {
        check: "verdict".into(),
        expected: "neither".into(),
        observed: verdict_name(verdict.verdict),
        tolerance: String::new(),
        pass: verdict.verdict == Verdict::Neither,
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;

    fn small() -> Model {
        let mut c = Config::default();
        c.mc.paths = 2000;
        c.grid.points = 65;
        c.series.truncation = 16;
        c.build().unwrap()
    }

    #[test]
    fn counterexample_rows() {
        let rows = counterexample(2000, StreamPlan::new(1)).unwrap();
        assert!(rows.iter().all(|r| r.pass), "{rows:?}");
        assert_eq!(rows[0].expected, num(-1.0 / 24.0));
        assert_eq!(rows.last().unwrap().observed, "neither");
    }

    #[test]
    fn all_suites_pass_on_brownian_defaults() {
        let rows = run_suite(Suite::All, &small()).unwrap();
        let failed: Vec<_> = rows.iter().filter(|r| !r.pass).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(rows.iter().any(|r| r.check.starts_with("series/expansion_gap")));
    }

    #[test]
    fn stream_reuse_is_caught() {
        let mut m = small();
        m.streams = StreamPlan::reusing(1);
        let rows = run_suite(Suite::Moments, &m).unwrap();
        assert!(rows.iter().any(|r| !r.pass));
    }

    #[test]
    fn consistency_rule() {
        assert!(consistent(Verdict::Submartingale, &[0.0, 1.0]));
        assert!(!consistent(Verdict::Submartingale, &[-1.0]));
        assert!(consistent(Verdict::Neither, &[-1.0, 1.0]));
        assert!(!consistent(Verdict::Martingale, &[1e-3]));
    }

    #[test]
    fn csv_layout() {
        let csv = rows_to_csv(&[CheckRow::within("x", 1.0, 1.0, 0.0)]);
        assert_eq!(
            csv,
            "check,expected,observed,tolerance,pass\nx,1.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,true\n"
        );
    }
}
