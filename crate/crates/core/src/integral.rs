//! Wiener integrals of deterministic integrands against sample paths, and
//! their analytic moments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcspace::{inner_rho, project_onto, Integrand, StepFunction};
use crate::process::{Grid, SamplePath, YehSpec};
use crate::stieltjes::{stieltjes_quad, stieltjes_step, Integrator, MeanFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Method {
    StepExact,
    L2Approx { cells: usize },
    PathwiseRs { cells: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WienerIntegral {
    pub value: f64,
    pub method: Method,
    /// `|I(n) − I(n/2)|` for the approximate methods; `0` when exact,
    /// infinite when no halved partition exists.
    pub refinement: f64,
}

impl WienerIntegral {
    /// `Ĩ(f) = I(f) − ∫f dλ`.
    pub fn centered(self, mean: f64) -> Self {
        Self { value: self.value - mean, ..self }
    }
}

/// `Σ cᵢ (x[endᵢ] − x[startᵢ])` over index pairs on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOnGrid {
    pieces: Vec<(usize, usize, f64)>,
    grid_len: usize,
}

impl StepOnGrid {
    /// Locates every partition point of `f` on `grid`; adjacent equal values
    /// are merged first so equivalent representations give identical sums.
    pub fn new(f: &StepFunction, grid: &Grid) -> Result<Self> {
        let f = f.merged();
        let p = f.partition();
        let idx = p
            .iter()
            .map(|&t| grid.index_of(t).ok_or(Error::PartitionNotOnGrid { t }))
            .collect::<Result<Vec<_>>>()?;
        let pieces = f.values().iter().enumerate().map(|(i, &c)| (idx[i], idx[i + 1], c)).collect();
        Ok(Self { pieces, grid_len: grid.len() })
    }

    pub fn apply(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.grid_len);
        self.pieces.iter().map(|&(i, j, c)| c * (values[j] - values[i])).sum()
    }
}

fn stride_for(grid: &Grid, cells: usize) -> Result<usize> {
    if cells == 0 || !grid.cells().is_multiple_of(cells) {
        return Err(Error::InvalidArgument(format!(
            "cells = {cells} must divide the {} grid cells",
            grid.cells()
        )));
    }
    Ok(grid.cells() / cells)
}

fn sub_partition(grid: &Grid, stride: usize) -> Vec<f64> {
    grid.points().iter().copied().step_by(stride).collect()
}

/// `I(f) ≈ I(fₙ)` with `fₙ` the midpoint step projection of `f` on every
/// `grid.cells()/cells`-th grid point. Reusable across paths on one grid.
#[derive(Debug, Clone)]
pub struct L2Integrator {
    cells: usize,
    fine: StepOnGrid,
    coarse: Option<StepOnGrid>,
    exact: bool,
}

impl L2Integrator {
    pub fn new(f: &Integrand, grid: &Grid, cells: usize) -> Result<Self> {
        let stride = stride_for(grid, cells)?;
        if let Integrand::Step(s) = f {
            return Ok(Self { cells, fine: StepOnGrid::new(s, grid)?, coarse: None, exact: true });
        }
        let fine = StepOnGrid::new(&project_onto(f, &sub_partition(grid, stride))?, grid)?;
        let coarse = if cells.is_multiple_of(2) {
            Some(StepOnGrid::new(&project_onto(f, &sub_partition(grid, 2 * stride))?, grid)?)
        } else {
            None
        };
        Ok(Self { cells, fine, coarse, exact: false })
    }

    pub fn apply(&self, values: &[f64]) -> WienerIntegral {
        let value = self.fine.apply(values);
        let refinement = match (&self.coarse, self.exact) {
            (_, true) => 0.0,
            (Some(c), false) => (value - c.apply(values)).abs(),
            (None, false) => f64::INFINITY,
        };
        WienerIntegral { value, method: Method::L2Approx { cells: self.cells }, refinement }
    }
}

/// Left-tag Riemann–Stieltjes sums `Σ f(uⱼ₋₁)(X(uⱼ) − X(uⱼ₋₁))`. Runs of equal
/// tags are telescoped, so a step integrand reproduces the exact step sum.
#[derive(Debug, Clone)]
pub struct RsIntegrator {
    cells: usize,
    fine: StepOnGrid,
    coarse: Option<StepOnGrid>,
}

impl RsIntegrator {
    pub fn new(f: &Integrand, grid: &Grid, cells: usize) -> Result<Self> {
        let iv = crate::stieltjes::Interval::new(grid.start(), grid.end())?;
        if !f.is_certified_bv(iv) {
            return Err(Error::MissingBvCertificate);
        }
        let stride = stride_for(grid, cells)?;
        let fine = Self::left_tagged(f, grid, stride)?;
        let coarse = if cells.is_multiple_of(2) { Some(Self::left_tagged(f, grid, 2 * stride)?) } else { None };
        Ok(Self { cells, fine, coarse })
    }

    fn left_tagged(f: &Integrand, grid: &Grid, stride: usize) -> Result<StepOnGrid> {
        let partition = sub_partition(grid, stride);
        let values = partition[..partition.len() - 1]
            .iter()
            .map(|&t| {
                let v = f.eval(t);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFiniteValue { t })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        StepOnGrid::new(&StepFunction::new(partition, values)?, grid)
    }

    pub fn apply(&self, values: &[f64]) -> WienerIntegral {
        let value = self.fine.apply(values);
        let refinement = self.coarse.as_ref().map_or(f64::INFINITY, |c| (value - c.apply(values)).abs());
        WienerIntegral { value, method: Method::PathwiseRs { cells: self.cells }, refinement }
    }
}

/// `I(f) = Σ cᵢ (X(tᵢ) − X(tᵢ₋₁))`. Every partition point must be a grid point.
pub fn integrate_step(f: &StepFunction, path: &SamplePath) -> Result<WienerIntegral> {
    let value = StepOnGrid::new(f, path.grid())?.apply(path.values());
    Ok(WienerIntegral { value, method: Method::StepExact, refinement: 0.0 })
}

pub fn integrate_l2(f: &Integrand, path: &SamplePath, cells: usize) -> Result<WienerIntegral> {
    Ok(L2Integrator::new(f, path.grid(), cells)?.apply(path.values()))
}

pub fn integrate_pathwise_rs(f: &Integrand, path: &SamplePath, cells: usize) -> Result<WienerIntegral> {
    Ok(RsIntegrator::new(f, path.grid(), cells)?.apply(path.values()))
}

/// `E[I(f)] = ∫ f dλ`; exact for step `f`, midpoint quadrature otherwise.
pub fn integral_mean(f: &Integrand, lambda: &MeanFunction, resolution: usize) -> Result<f64> {
    match f {
        Integrand::Step(s) => stieltjes_step(s, lambda),
        Integrand::Continuous { .. } => {
            let iv = lambda.interval();
            Ok(stieltjes_quad(|t| f.eval(t), lambda, iv.start(), iv.end(), resolution)?.value)
        }
    }
}

/// `E[I(f)I(g)] = ∫ fg dρ + ∫f dλ ∫g dλ`.
pub fn integral_covariance(f: &Integrand, g: &Integrand, spec: &YehSpec, resolution: usize) -> Result<f64> {
    let cross = inner_rho(f, g, spec.rho(), resolution)?;
    Ok(cross + integral_mean(f, spec.lambda(), resolution)? * integral_mean(g, spec.lambda(), resolution)?)
}

/// Law `N(mean, variance)` of a Wiener integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianLaw {
    pub mean: f64,
    pub variance: f64,
}

/// `I(f) ~ N(∫f dλ, ∫f² dρ)`.
pub fn integral_distribution(f: &Integrand, spec: &YehSpec, resolution: usize) -> Result<GaussianLaw> {
    Ok(GaussianLaw {
        mean: integral_mean(f, spec.lambda(), resolution)?,
        variance: inner_rho(f, f, spec.rho(), resolution)?.max(0.0),
    })
}
