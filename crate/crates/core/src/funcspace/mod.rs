//! The Hilbert spaces `L²_ρ[a, b]` and `L²_{λ,ρ}[a, b]`: integrands, inner
//! products, step approximation, and orthonormal pullback bases.

mod basis;
mod step;

use std::fmt;
use std::sync::Arc;

pub use basis::{BasisFamily, BasisKind};
pub use step::StepFunction;

use crate::error::{Error, Result};
use crate::stieltjes::{stieltjes_step, Integrator, Interval, MeanFunction, MeasureSum, StieltjesRule, VarianceFunction};

/// Default number of quadrature cells for non-step integrands.
pub const DEFAULT_RESOLUTION: usize = 1 << 14;

/// Evidence that a continuous integrand has bounded variation.
#[derive(Debug, Clone, PartialEq)]
pub enum BvCertificate {
    /// Monotone on the whole real line.
    Monotone,
    /// Monotone between consecutive breakpoints.
    Pieces(Vec<f64>),
}

impl BvCertificate {
    pub fn covers(&self, interval: Interval) -> bool {
        match self {
            BvCertificate::Monotone => true,
            BvCertificate::Pieces(b) => {
                b.len() >= 2
                    && b[0] <= interval.start()
                    && b[b.len() - 1] >= interval.end()
                    && b.windows(2).all(|w| w[0] <= w[1])
            }
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A deterministic integrand: a step function, or a continuous function
/// handle with an optional bounded-variation certificate.
#[derive(Clone)]
pub enum Integrand {
    Step(StepFunction),
    Continuous { func: RealFn, bv: Option<BvCertificate> },
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrand::Step(s) => f.debug_tuple("Step").field(s).finish(),
            Integrand::Continuous { bv, .. } => f.debug_struct("Continuous").field("bv", bv).finish_non_exhaustive(),
        }
    }
}

impl From<StepFunction> for Integrand {
    fn from(s: StepFunction) -> Self {
        Integrand::Step(s)
    }
}

impl Integrand {
    pub fn continuous(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Integrand::Continuous { func: Arc::new(f), bv: None }
    }

    pub fn continuous_bv(f: impl Fn(f64) -> f64 + Send + Sync + 'static, bv: BvCertificate) -> Self {
        Integrand::Continuous { func: Arc::new(f), bv: Some(bv) }
    }

    /// `slope·t + intercept`, certified monotone.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self::continuous_bv(move |t| slope * t + intercept, BvCertificate::Monotone)
    }

    pub fn constant(c: f64) -> Self {
        Self::linear(0.0, c)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Integrand::Step(s) => s.value(t),
            Integrand::Continuous { func, .. } => func(t),
        }
    }

    pub fn as_step(&self) -> Option<&StepFunction> {
        match self {
            Integrand::Step(s) => Some(s),
            Integrand::Continuous { .. } => None,
        }
    }

    /// Step functions always have bounded variation; continuous handles only
    /// with a certificate covering `interval`.
    pub fn is_certified_bv(&self, interval: Interval) -> bool {
        match self {
            Integrand::Step(_) => true,
            Integrand::Continuous { bv, .. } => bv.as_ref().is_some_and(|c| c.covers(interval)),
        }
    }
}

fn product_integral(f: &Integrand, g: &Integrand, mu: &impl Integrator, resolution: usize) -> Result<f64> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("quadrature resolution must be >= 1".into()));
    }
    let rule = StieltjesRule::equal_mass(mu, resolution);
    rule.integrate(|t| f.eval(t) * g.eval(t))
}

/// `⟨f, g⟩_ρ = ∫ f g dρ`; exact for two step functions, otherwise a
/// Riemann–Stieltjes sum over `resolution` cells of equal ρ-mass.
pub fn inner_rho(f: &Integrand, g: &Integrand, rho: &VarianceFunction, resolution: usize) -> Result<f64> {
    match (f, g) {
        (Integrand::Step(fs), Integrand::Step(gs)) => stieltjes_step(&fs.product(gs), rho),
        _ => product_integral(f, g, rho, resolution),
    }
}

/// `⟨f, g⟩_{λ,ρ} = ∫ f g d[ρ + |λ|]`.
pub fn inner_lambda_rho(
    f: &Integrand,
    g: &Integrand,
    lambda: &MeanFunction,
    rho: &VarianceFunction,
    resolution: usize,
) -> Result<f64> {
    match (f, g) {
        (Integrand::Step(fs), Integrand::Step(gs)) => {
            let fg = fs.product(gs);
            Ok(stieltjes_step(&fg, rho)? + stieltjes_step(&fg, &lambda.variation())?)
        }
        _ => product_integral(f, g, &MeasureSum(rho, lambda.variation()), resolution),
    }
}

pub fn norm_sq_rho(f: &Integrand, rho: &VarianceFunction, resolution: usize) -> Result<f64> {
    inner_rho(f, f, rho, resolution)
}

pub fn norm_sq_lambda_rho(
    f: &Integrand,
    lambda: &MeanFunction,
    rho: &VarianceFunction,
    resolution: usize,
) -> Result<f64> {
    inner_lambda_rho(f, f, lambda, rho, resolution)
}

/// Piecewise-constant approximation on a uniform `cells`-cell partition of
/// `interval`, sampled at cell midpoints.
pub fn project_to_steps(f: &Integrand, interval: Interval, cells: usize) -> Result<StepFunction> {
    if cells == 0 {
        return Err(Error::InvalidArgument("projection needs at least one cell".into()));
    }
    project_onto(f, &interval.uniform_points(cells))
}

/// Midpoint-sampled step approximation on an explicit partition.
pub fn project_onto(f: &Integrand, partition: &[f64]) -> Result<StepFunction> {
    let values = partition
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let v = f.eval(mid);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteValue { t: mid })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    StepFunction::new(partition.to_vec(), values)
}

/// `⟨f, φₙ⟩_ρ` for `n = 0..count`.
///
/// Step integrands use the closed-form antiderivatives of the basis and are
/// exact; continuous integrands use an equal-ρ-mass midpoint rule.
pub fn fourier_coeffs(f: &Integrand, basis: &BasisFamily, count: usize, resolution: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one coefficient".into()));
    }
    let rho = basis.rho();
    match f {
        Integrand::Step(s) => {
            let iv = rho.interval();
            let (start, end) = s.support();
            if start < iv.start() || end > iv.end() {
                return Err(Error::PartitionOutOfDomain { start, end, a: iv.start(), b: iv.end() });
            }
            let us: Vec<f64> = s.partition().iter().map(|&t| rho.value(t)).collect();
            Ok((0..count)
                .map(|n| {
                    s.values()
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| c * (basis.psi_antiderivative(n, us[i + 1]) - basis.psi_antiderivative(n, us[i])))
                        .sum()
                })
                .collect())
        }
        Integrand::Continuous { .. } => {
            if resolution == 0 {
                return Err(Error::InvalidArgument("quadrature resolution must be >= 1".into()));
            }
            let rule = StieltjesRule::equal_mass(rho, resolution);
            let mut fw = Vec::with_capacity(resolution);
            for (&tau, &w) in rule.tags().iter().zip(rule.weights()) {
                let v = f.eval(tau);
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue { t: tau });
                }
                fw.push(v * w);
            }
            let us: Vec<f64> = rule.tags().iter().map(|&t| rho.value(t)).collect();
            Ok((0..count)
                .map(|n| us.iter().zip(&fw).map(|(&u, &v)| v * basis.psi(n, u)).sum())
                .collect())
        }
    }
}

/// Gram matrix `⟨φᵢ, φⱼ⟩_ρ` of the first `count` members by quadrature.
pub fn gram_matrix(basis: &BasisFamily, count: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    if resolution == 0 {
        return Err(Error::InvalidArgument("quadrature resolution must be >= 1".into()));
    }
    let rho = basis.rho();
    let rule = StieltjesRule::equal_mass(rho, resolution);
    let us: Vec<f64> = rule.tags().iter().map(|&t| rho.value(t)).collect();
    let table: Vec<Vec<f64>> = (0..count)
        .map(|n| us.iter().map(|&u| basis.psi(n, u)).collect())
        .collect();
    let mut gram = vec![vec![0.0; count]; count];
    for i in 0..count {
        for j in i..count {
            let v: f64 = table[i]
                .iter()
                .zip(&table[j])
                .zip(rule.weights())
                .map(|((x, y), w)| x * y * w)
                .sum();
            gram[i][j] = v;
            gram[j][i] = v;
        }
    }
    Ok(gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn ind(a: f64, b: f64) -> Integrand {
        StepFunction::indicator(a, b).unwrap().into()
    }

    #[test]
    fn inner_rho_examples() {
        let id = VarianceFunction::identity(unit());
        let one = Integrand::constant(1.0);
        assert!((inner_rho(&one, &one, &id, 1024).unwrap() - 1.0).abs() < 1e-15);
        let sq = VarianceFunction::power(unit(), 2.0).unwrap();
        assert_eq!(inner_rho(&ind(0.0, 0.5), &ind(0.5, 1.0), &sq, 16).unwrap(), 0.0);
        assert_eq!(inner_rho(&ind(0.0, 0.5), &ind(0.0, 0.5), &sq, 16).unwrap(), 0.25);
    }

    #[test]
    fn inner_lambda_rho_examples() {
        let id = VarianceFunction::identity(unit());
        let one = Integrand::constant(1.0);
        let lin = MeanFunction::linear(unit(), 1.0, 0.0).unwrap();
        assert!((inner_lambda_rho(&one, &one, &lin, &id, 4096).unwrap() - 2.0).abs() < 1e-12);
        let cantor = MeanFunction::cantor(unit());
        assert!((inner_lambda_rho(&one, &one, &cantor, &id, 4096).unwrap() - 2.0).abs() < 1e-12);
        let zero = MeanFunction::zero(unit());
        let f = Integrand::linear(1.0, 0.0);
        assert_eq!(
            inner_lambda_rho(&f, &one, &zero, &id, 512).unwrap(),
            inner_rho(&f, &one, &id, 512).unwrap()
        );
        let full = ind(0.0, 1.0);
        assert_eq!(inner_lambda_rho(&full, &full, &lin, &id, 1).unwrap(), 2.0);
    }

    #[test]
    fn projection_examples() {
        let f = Integrand::linear(1.0, 0.0);
        let p = project_to_steps(&f, unit(), 1).unwrap();
        assert_eq!(p.values(), &[0.5]);
        let step = StepFunction::new(vec![0.0, 0.25, 1.0], vec![2.0, -1.0]).unwrap();
        let q = project_to_steps(&Integrand::Step(step.clone()), unit(), 8).unwrap();
        for i in 0..64 {
            let t = i as f64 / 64.0;
            assert_eq!(q.value(t), step.value(t));
        }
        assert!(project_to_steps(&f, unit(), 0).is_err());
    }

    #[test]
    fn projection_error_matches_cell_variance() {
        let id = VarianceFunction::identity(unit());
        let zero = MeanFunction::zero(unit());
        for n in [1usize, 2, 4, 8] {
            let p = project_to_steps(&Integrand::linear(1.0, 0.0), unit(), n).unwrap();
            let diff = Integrand::continuous(move |t| t - p.value(t));
            let err = norm_sq_lambda_rho(&diff, &zero, &id, DEFAULT_RESOLUTION).unwrap();
            let exact = 1.0 / (12.0 * (n * n) as f64);
            assert!((err - exact).abs() <= 1e-6 * exact, "n={n}: {err} vs {exact}");
        }
    }

    #[test]
    fn fourier_coeff_examples() {
        let b = BasisFamily::cosine(VarianceFunction::identity(unit()));
        let c = fourier_coeffs(&Integrand::constant(1.0), &b, 5, 4096).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-14));
        let c = fourier_coeffs(&ind(0.0, 0.5), &b, 3, 0).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-15);
        assert!((c[1] - SQRT_2 / PI).abs() < 1e-15);
        assert!(c[2].abs() < 1e-15);
        let phi3 = b.member(3).unwrap();
        let c = fourier_coeffs(&phi3, &b, 6, 4096).unwrap();
        for (n, x) in c.iter().enumerate() {
            let want = if n == 3 { 1.0 } else { 0.0 };
            assert!((x - want).abs() < 1e-10, "coefficient {n} = {x}");
        }
    }

    #[test]
    fn bv_certificate_coverage() {
        assert!(BvCertificate::Monotone.covers(unit()));
        assert!(BvCertificate::Pieces(vec![0.0, 0.5, 1.0]).covers(unit()));
        assert!(!BvCertificate::Pieces(vec![0.0, 0.5]).covers(unit()));
        assert!(!Integrand::continuous(|t| t).is_certified_bv(unit()));
        assert!(ind(0.0, 0.5).is_certified_bv(unit()));
    }
}
