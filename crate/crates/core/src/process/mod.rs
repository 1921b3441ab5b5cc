//! Yeh processes: exact increment sampling on a grid, truncated random-series
//! sampling, and centering.

mod stream;

use std::sync::Arc;

pub use stream::{standard_normal_quantile, GaussianStream, StreamPlan};

use crate::error::{Error, Result};
use crate::funcspace::BasisFamily;
use crate::stats::{McEstimate, RunningStats};
use crate::stieltjes::{bisect_inverse, Integrator, Interval, MeanFunction, VarianceFunction};

/// Default number of grid points (uniform in `t`).
pub const DEFAULT_GRID_POINTS: usize = 1025;
/// Default truncation of the random series.
pub const DEFAULT_TRUNCATION: usize = 256;

/// The pair `(λ, ρ)` determining a Yeh process on a shared interval.
#[derive(Debug, Clone, PartialEq)]
pub struct YehSpec {
    lambda: MeanFunction,
    rho: VarianceFunction,
}

impl YehSpec {
    pub fn new(lambda: MeanFunction, rho: VarianceFunction) -> Result<Self> {
        if lambda.interval() != rho.interval() {
            return Err(Error::InvalidArgument(
                "mean and variance functions must share one interval".into(),
            ));
        }
        Ok(Self { lambda, rho })
    }

    /// Standard Brownian motion on `interval`.
    pub fn brownian(interval: Interval) -> Self {
        Self {
            lambda: MeanFunction::zero(interval),
            rho: VarianceFunction::identity(interval),
        }
    }

    pub fn lambda(&self) -> &MeanFunction {
        &self.lambda
    }

    pub fn rho(&self) -> &VarianceFunction {
        &self.rho
    }

    pub fn interval(&self) -> Interval {
        self.rho.interval()
    }
}

/// Strictly increasing time grid pinned to the ends of an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Arc<[f64]>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::BadGrid("need at least two points".into()));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::BadGrid("grid points must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadGrid("grid must be strictly increasing".into()));
        }
        Ok(Self { points: points.into() })
    }

    pub fn uniform(interval: Interval, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::BadGrid("need at least two points".into()));
        }
        Self::new(interval.uniform_points(points - 1))
    }

    /// Points uniform on the ρ-scale, so every increment has the same variance.
    pub fn rho_scale(rho: &VarianceFunction, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::BadGrid("need at least two points".into()));
        }
        let iv = rho.interval();
        let cells = points - 1;
        let mass = rho.mass();
        let mut pts = Vec::with_capacity(points);
        pts.push(iv.start());
        for i in 1..cells {
            pts.push(bisect_inverse(rho, mass * i as f64 / cells as f64));
        }
        pts.push(iv.end());
        Self::new(pts)
    }

    /// The interval's endpoints together with `extra` points inside it.
    pub fn through(interval: Interval, extra: &[f64]) -> Result<Self> {
        for &t in extra {
            interval.check(t)?;
        }
        let mut pts: Vec<f64> = [interval.start(), interval.end()].iter().chain(extra).copied().collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cells(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    fn tolerance(&self) -> f64 {
        1e-12 * (self.end() - self.start())
    }

    /// Index of the grid point equal to `t` up to `1e-12` of the grid span.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let p = self.points.partition_point(|&x| x < t);
        let tol = self.tolerance();
        [p.checked_sub(1), Some(p)]
            .into_iter()
            .flatten()
            .filter(|&i| i < self.points.len())
            .find(|&i| (self.points[i] - t).abs() <= tol)
    }

    /// Every `stride`-th point; `stride` must divide the number of cells.
    pub fn coarsen(&self, stride: usize) -> Result<Self> {
        if stride == 0 || !self.cells().is_multiple_of(stride) {
            return Err(Error::BadGrid(format!(
                "stride {stride} does not divide {} cells",
                self.cells()
            )));
        }
        Self::new(self.points.iter().step_by(stride).copied().collect())
    }

    fn check_pinned(&self, interval: Interval) -> Result<()> {
        if self.start() != interval.start() || self.end() != interval.end() {
            return Err(Error::BadGrid(format!(
                "grid [{}, {}] must start and end at [{}, {}]",
                self.start(),
                self.end(),
                interval.start(),
                interval.end()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Increments,
    Series { terms: usize },
}

/// One realization of `X` (or of the centered `X̃`) on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    grid: Grid,
    values: Vec<f64>,
    provenance: Provenance,
    centered: bool,
    seed: u64,
    stream: u64,
    truncation_defect: Option<Arc<[f64]>>,
}

impl SamplePath {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream
    }

    /// `ρ(u) − Σ_{n<N} (∫ₐᵘ φₙ dρ)²` at each grid point, for series paths.
    pub fn truncation_defect(&self) -> Option<&[f64]> {
        self.truncation_defect.as_deref()
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.grid.index_of(t).map(|i| self.values[i]).ok_or(Error::PartitionNotOnGrid { t })
    }

    /// Restriction to a coarser grid taking every `stride`-th point.
    pub fn coarsen(&self, stride: usize) -> Result<SamplePath> {
        let grid = self.grid.coarsen(stride)?;
        let values = self.values.iter().step_by(stride).copied().collect();
        let truncation_defect = self
            .truncation_defect
            .as_ref()
            .map(|d| d.iter().step_by(stride).copied().collect());
        Ok(SamplePath { grid, values, truncation_defect, ..self.clone() })
    }

    /// CSV with columns `t,value`, floats at 17 significant digits.
    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "t,value")?;
        for (t, x) in self.grid.points().iter().zip(&self.values) {
            writeln!(out, "{t:.16e},{x:.16e}")?;
        }
        Ok(())
    }
}

/// Precomputed exact-increment sampler: `X(u₀) = λ(a)` and independent
/// increments `N(Δλ, Δρ)` on every grid cell.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    grid: Grid,
    start: f64,
    drift: Vec<f64>,
    scale: Vec<f64>,
}

impl IncrementSampler {
    pub fn new(spec: &YehSpec, grid: &Grid) -> Result<Self> {
        grid.check_pinned(spec.interval())?;
        let pts = grid.points();
        let lam: Vec<f64> = pts.iter().map(|&t| spec.lambda.value(t)).collect();
        let rho: Vec<f64> = pts.iter().map(|&t| spec.rho.value(t)).collect();
        let mut scale = Vec::with_capacity(grid.cells());
        for (i, w) in rho.windows(2).enumerate() {
            let var = w[1] - w[0];
            if var.is_nan() || var < 0.0 {
                return Err(Error::BadGrid(format!(
                    "negative variance increment {var} on cell {i}; ρ is not increasing"
                )));
            }
            scale.push(var.sqrt());
        }
        Ok(Self {
            grid: grid.clone(),
            start: lam[0],
            drift: lam.windows(2).map(|w| w[1] - w[0]).collect(),
            scale,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Writes the path into `out` (length = grid points). Draw `j` of the
    /// stream drives cell `j`.
    pub fn fill(&self, stream: &mut GaussianStream, out: &mut [f64]) {
        assert_eq!(out.len(), self.grid.len(), "output buffer must match the grid");
        let mut x = self.start;
        out[0] = x;
        for ((slot, &mu), &sd) in out[1..].iter_mut().zip(&self.drift).zip(&self.scale) {
            x += mu + sd * stream.next_gaussian();
            *slot = x;
        }
    }

    pub fn sample(&self, mut stream: GaussianStream) -> SamplePath {
        let mut values = vec![0.0; self.grid.len()];
        self.fill(&mut stream, &mut values);
        SamplePath {
            grid: self.grid.clone(),
            values,
            provenance: Provenance::Increments,
            centered: false,
            seed: stream.seed(),
            stream: stream.index(),
            truncation_defect: None,
        }
    }
}

pub fn sample_increments(spec: &YehSpec, grid: &Grid, stream: GaussianStream) -> Result<SamplePath> {
    Ok(IncrementSampler::new(spec, grid)?.sample(stream))
}

/// Precomputed truncated-series sampler:
/// `X(u) = λ(u) + Σ_{n<N} (∫ₐᵘ φₙ dρ) ξₙ` with `ξₙ` draw `n` of the stream.
#[derive(Debug, Clone)]
pub struct SeriesSampler {
    grid: Grid,
    lambda: Vec<f64>,
    terms: usize,
    /// `terms × grid.len()`, row `n` holds `∫ₐᵘ φₙ dρ` over the grid.
    table: Vec<f64>,
    defect: Arc<[f64]>,
}

impl SeriesSampler {
    pub fn new(spec: &YehSpec, basis: &BasisFamily, terms: usize, grid: &Grid) -> Result<Self> {
        if terms == 0 {
            return Err(Error::InvalidArgument("truncation must be >= 1".into()));
        }
        if basis.rho() != spec.rho() {
            return Err(Error::InvalidArgument("basis must be built on the process's ρ".into()));
        }
        grid.check_pinned(spec.interval())?;
        let pts = grid.points();
        let us: Vec<f64> = pts.iter().map(|&t| spec.rho.value(t)).collect();
        let mut table = Vec::with_capacity(terms * pts.len());
        for n in 0..terms {
            table.extend(us.iter().map(|&u| basis.psi_antiderivative(n, u)));
        }
        let defect = us
            .iter()
            .enumerate()
            .map(|(j, &u)| {
                let captured: f64 = (0..terms).map(|n| table[n * pts.len() + j].powi(2)).sum();
                u - captured
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            lambda: pts.iter().map(|&t| spec.lambda.value(t)).collect(),
            terms,
            table,
            defect,
        })
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn variance_defect(&self) -> &[f64] {
        &self.defect
    }

    /// Writes the centered series `X̃` into `out`.
    pub fn fill_centered(&self, stream: &mut GaussianStream, out: &mut [f64]) {
        let m = self.grid.len();
        assert_eq!(out.len(), m, "output buffer must match the grid");
        out.fill(0.0);
        for row in self.table.chunks_exact(m) {
            let xi = stream.next_gaussian();
            for (o, &a) in out.iter_mut().zip(row) {
                *o += a * xi;
            }
        }
    }

    pub fn sample(&self, mut stream: GaussianStream) -> SamplePath {
        let mut values = vec![0.0; self.grid.len()];
        self.fill_centered(&mut stream, &mut values);
        for (v, l) in values.iter_mut().zip(&self.lambda) {
            *v += l;
        }
        SamplePath {
            grid: self.grid.clone(),
            values,
            provenance: Provenance::Series { terms: self.terms },
            centered: false,
            seed: stream.seed(),
            stream: stream.index(),
            truncation_defect: Some(self.defect.clone()),
        }
    }
}

pub fn sample_series(
    spec: &YehSpec,
    basis: &BasisFamily,
    terms: usize,
    grid: &Grid,
    stream: GaussianStream,
) -> Result<SamplePath> {
    Ok(SeriesSampler::new(spec, basis, terms, grid)?.sample(stream))
}

/// `X̃(u) = X(u) − λ(u)`. Already-centered paths are returned unchanged.
pub fn center(path: &SamplePath, lambda: &MeanFunction) -> Result<SamplePath> {
    if path.centered {
        return Ok(path.clone());
    }
    let iv = lambda.interval();
    let pts = path.grid.points();
    iv.check(pts[0])?;
    iv.check(pts[pts.len() - 1])?;
    let values = pts.iter().zip(&path.values).map(|(&t, &x)| x - lambda.value(t)).collect();
    Ok(SamplePath { values, centered: true, ..path.clone() })
}

/// Sample estimates of `E[X(s)]`, `E[X(t)]`, and `E[X(s)X(t)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMoments {
    pub mean_s: McEstimate,
    pub mean_t: McEstimate,
    pub second_moment: McEstimate,
}

pub fn empirical_moments(paths: &[SamplePath], s: f64, t: f64) -> Result<EmpiricalMoments> {
    if paths.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: paths.len() });
    }
    let grid = paths[0].grid();
    if paths.iter().any(|p| p.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let i = grid.index_of(s).ok_or(Error::GridMismatch)?;
    let j = grid.index_of(t).ok_or(Error::GridMismatch)?;
    let (mut ms, mut mt, mut mst) = (RunningStats::new(), RunningStats::new(), RunningStats::new());
    for p in paths {
        let (x, y) = (p.values[i], p.values[j]);
        ms.push(x);
        mt.push(y);
        mst.push(x * y);
    }
    let seed = Some(paths[0].seed);
    Ok(EmpiricalMoments {
        mean_s: ms.estimate(seed)?,
        mean_t: mt.estimate(seed)?,
        second_moment: mst.estimate(seed)?,
    })
}
