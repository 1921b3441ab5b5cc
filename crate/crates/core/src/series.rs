//! Basis expansions of Wiener integrals, `Ĩ(f) = Σ ⟨f, φₙ⟩_ρ Ĩ(φₙ)`, and their
//! truncation diagnostics.

use std::io;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{fourier_coeffs, norm_sq_rho, BasisFamily, Integrand};
use crate::integral::{integral_mean, L2Integrator};
use crate::process::{center, Grid, SamplePath};
use crate::stieltjes::{Integrator, MeanFunction};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub terms: usize,
    /// `Σ_{k<n} ⟨f,φₖ⟩ ∫φₖ dX̃` for `n = 1..=terms`.
    pub partial_sums: Vec<f64>,
    /// Direct integral `∫f dX̃` on the same grid.
    pub target: f64,
    /// `‖f‖²_ρ − Σ_{k<n} ⟨f,φₖ⟩²` for `n = 1..=terms`.
    pub defects: Vec<f64>,
}

impl ExpansionReport {
    /// CSV with columns `n,partial_sum,defect`.
    pub fn write_csv(&self, mut out: impl io::Write) -> io::Result<()> {
        writeln!(out, "n,partial_sum,defect")?;
        for (n, (s, d)) in self.partial_sums.iter().zip(&self.defects).enumerate() {
            writeln!(out, "{},{s:.16e},{d:.16e}", n + 1)?;
        }
        Ok(())
    }
}

/// Coefficients, defects and per-grid integrators for one `(f, basis, N)`,
/// reusable across every path on a grid.
#[derive(Debug, Clone)]
pub struct Expansion {
    coeffs: Vec<f64>,
    defects: Vec<f64>,
    target: L2Integrator,
    members: Vec<L2Integrator>,
}

impl Expansion {
    pub fn new(
        f: &Integrand,
        basis: &BasisFamily,
        terms: usize,
        grid: &Grid,
        cells: usize,
        resolution: usize,
    ) -> Result<Self> {
        if terms == 0 {
            return Err(Error::InvalidArgument("truncation must be >= 1".into()));
        }
        let coeffs = fourier_coeffs(f, basis, terms, resolution)?;
        let norm = norm_sq_rho(f, basis.rho(), resolution)?;
        let members = (0..terms)
            .map(|n| L2Integrator::new(&basis.member(n)?, grid, cells))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            defects: defect_sequence(norm, &coeffs),
            coeffs,
            target: L2Integrator::new(f, grid, cells)?,
            members,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn defects(&self) -> &[f64] {
        &self.defects
    }

    /// `(target, partial sum N)` from raw centered grid values.
    pub fn target_and_partial(&self, values: &[f64]) -> (f64, f64) {
        let partial = self.coeffs.iter().zip(&self.members).map(|(c, m)| c * m.apply(values).value).sum();
        (self.target.apply(values).value, partial)
    }

    pub fn apply(&self, path: &SamplePath) -> Result<ExpansionReport> {
        if !path.is_centered() {
            return Err(Error::NotCentered);
        }
        let values = path.values();
        let mut acc = 0.0;
        let partial_sums = self
            .coeffs
            .iter()
            .zip(&self.members)
            .map(|(c, m)| {
                acc += c * m.apply(values).value;
                acc
            })
            .collect();
        Ok(ExpansionReport {
            terms: self.coeffs.len(),
            partial_sums,
            target: self.target.apply(values).value,
            defects: self.defects.clone(),
        })
    }
}

fn defect_sequence(norm: f64, coeffs: &[f64]) -> Vec<f64> {
    let mut captured = 0.0;
    coeffs
        .iter()
        .map(|c| {
            captured += c * c;
            norm - captured
        })
        .collect()
}

/// Expansion of `∫f dX̃` on a centered path; basis integrals and the target
/// use `cells` grid-aligned step cells.
pub fn expand_integral(
    f: &Integrand,
    basis: &BasisFamily,
    terms: usize,
    path: &SamplePath,
    cells: usize,
    resolution: usize,
) -> Result<ExpansionReport> {
    if !path.is_centered() {
        return Err(Error::NotCentered);
    }
    Expansion::new(f, basis, terms, path.grid(), cells, resolution)?.apply(path)
}

/// `∫f dX = ∫f dλ + Σ ⟨f,φₙ⟩ ∫φₙ dX̃` on an uncentered path.
pub fn expand_integral_uncentered(
    f: &Integrand,
    basis: &BasisFamily,
    terms: usize,
    path: &SamplePath,
    lambda: &MeanFunction,
    cells: usize,
    resolution: usize,
) -> Result<ExpansionReport> {
    let mean = integral_mean(f, lambda, resolution)?;
    let mut report = expand_integral(f, basis, terms, &center(path, lambda)?, cells, resolution)?;
    report.target += mean;
    report.partial_sums.iter_mut().for_each(|s| *s += mean);
    Ok(report)
}

/// `‖f‖²_ρ − Σ_{n<N} ⟨f,φₙ⟩²_ρ`.
pub fn parseval_defect(f: &Integrand, basis: &BasisFamily, terms: usize, resolution: usize) -> Result<f64> {
    let coeffs = fourier_coeffs(f, basis, terms, resolution)?;
    let norm = norm_sq_rho(f, basis.rho(), resolution)?;
    Ok(defect_sequence(norm, &coeffs)[terms - 1])
}

/// `ρ(t) − Σ_{n<N} (∫ₐᵗ φₙ dρ)²`, the variance missing from an `N`-term
/// series path at `t`.
pub fn series_variance_defect(basis: &BasisFamily, terms: usize, t: f64) -> Result<f64> {
    if terms == 0 {
        return Err(Error::InvalidArgument("truncation must be >= 1".into()));
    }
    let u = basis.rho().eval(t)?;
    Ok(u - (0..terms).map(|n| basis.psi_antiderivative(n, u).powi(2)).sum::<f64>())
}
