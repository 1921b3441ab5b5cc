use std::f64::consts::{PI, SQRT_2};

use super::{BvCertificate, Integrand, StepFunction};
use crate::error::{Error, Result};
use crate::stieltjes::{rho_inverse, Integrator, VarianceFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `ψ₀ = 1/√T`, `ψₙ(u) = √(2/T) cos(nπu/T)`.
    CosinePullback,
    /// `ψ₀ = 1/√T`, then Haar wavelets on `[0, T]` in breadth-first order.
    HaarPullback,
}

/// Orthonormal family `φₙ = ψₙ ∘ ρ` of `L²_ρ[a, b]`, where `{ψₙ}` is
/// orthonormal on `[0, T]`, `T = ρ(b)`, under Lebesgue measure.
#[derive(Debug, Clone)]
pub struct BasisFamily {
    rho: VarianceFunction,
    kind: BasisKind,
    mass: f64,
}

impl BasisFamily {
    pub fn new(rho: VarianceFunction, kind: BasisKind) -> Self {
        let mass = rho.mass();
        Self { rho, kind, mass }
    }

    pub fn cosine(rho: VarianceFunction) -> Self {
        Self::new(rho, BasisKind::CosinePullback)
    }

    pub fn haar(rho: VarianceFunction) -> Self {
        Self::new(rho, BasisKind::HaarPullback)
    }

    pub fn rho(&self) -> &VarianceFunction {
        &self.rho
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `ψₙ(u)` on the ρ-scale `u ∈ [0, T]`.
    pub fn psi(&self, n: usize, u: f64) -> f64 {
        let t = self.mass;
        match self.kind {
            BasisKind::CosinePullback => {
                if n == 0 {
                    1.0 / t.sqrt()
                } else {
                    SQRT_2 / t.sqrt() * (n as f64 * PI * u / t).cos()
                }
            }
            BasisKind::HaarPullback => {
                if n == 0 {
                    return 1.0 / t.sqrt();
                }
                let (lo, mid, hi, height) = self.haar_support(n);
                if u < lo || u >= hi {
                    0.0
                } else if u < mid {
                    height
                } else {
                    -height
                }
            }
        }
    }

    /// `∫₀ᵘ ψₙ(v) dv`.
    pub fn psi_antiderivative(&self, n: usize, u: f64) -> f64 {
        let t = self.mass;
        if n == 0 {
            return u / t.sqrt();
        }
        match self.kind {
            BasisKind::CosinePullback => {
                let w = n as f64 * PI;
                (2.0 * t).sqrt() * (w * u / t).sin() / w
            }
            BasisKind::HaarPullback => {
                let (lo, mid, hi, height) = self.haar_support(n);
                if u <= lo || u >= hi {
                    0.0
                } else if u <= mid {
                    height * (u - lo)
                } else {
                    height * (hi - u)
                }
            }
        }
    }

    /// `(start, midpoint, end, height)` of Haar member `n ≥ 1` on `[0, T]`.
    fn haar_support(&self, n: usize) -> (f64, f64, f64, f64) {
        let level = usize::BITS - 1 - n.leading_zeros();
        let k = (n - (1usize << level)) as f64;
        let width = self.mass / (1u64 << level) as f64;
        let lo = k * width;
        let height = 2f64.powf(level as f64 / 2.0) / self.mass.sqrt();
        (lo, lo + 0.5 * width, lo + width, height)
    }

    /// `φₙ(t) = ψₙ(ρ(t))`.
    pub fn eval(&self, n: usize, t: f64) -> Result<f64> {
        Ok(self.psi(n, self.rho.eval(t)?))
    }

    /// `∫ₐᵗ φₙ dρ = Ψₙ(ρ(t))` in closed form.
    pub fn antiderivative(&self, n: usize, t: f64) -> Result<f64> {
        Ok(self.psi_antiderivative(n, self.rho.eval(t)?))
    }

    /// Member `φₙ` as an integrand: cosine members are continuous with a
    /// monotone-piece certificate, Haar members are step functions.
    pub fn member(&self, n: usize) -> Result<Integrand> {
        let iv = self.rho.interval();
        match self.kind {
            BasisKind::CosinePullback => {
                let mut breaks = vec![iv.start()];
                for k in 1..n {
                    breaks.push(rho_inverse(&self.rho, k as f64 * self.mass / n as f64)?);
                }
                breaks.push(iv.end());
                let basis = self.clone();
                Ok(Integrand::continuous_bv(
                    move |t| basis.psi(n, basis.rho.value(t)),
                    BvCertificate::Pieces(breaks),
                ))
            }
            BasisKind::HaarPullback => {
                if n == 0 {
                    let c = 1.0 / self.mass.sqrt();
                    return Ok(Integrand::Step(StepFunction::constant(iv.start(), iv.end(), c)?));
                }
                let (lo, mid, hi, height) = self.haar_support(n);
                let pts = [lo, mid, hi]
                    .iter()
                    .map(|&u| rho_inverse(&self.rho, u.min(self.mass)))
                    .collect::<Result<Vec<_>>>()?;
                let step = StepFunction::new(pts, vec![height, -height]).map_err(|_| {
                    Error::InvalidArgument(format!("Haar member {n} is below the resolution of ρ"))
                })?;
                Ok(Integrand::Step(step))
            }
        }
    }
}
