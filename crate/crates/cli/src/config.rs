//! JSON run configuration and its translation into core objects.

use serde::{Deserialize, Serialize};
use yeh_core::funcspace::{BasisFamily, BasisKind, Integrand, StepFunction, DEFAULT_RESOLUTION};
use yeh_core::process::{Grid, StreamPlan, YehSpec, DEFAULT_GRID_POINTS, DEFAULT_TRUNCATION};
use yeh_core::stieltjes::{Interval, MeanFunction, VarianceFunction, DEFAULT_CANTOR_DEPTH};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub interval: [f64; 2],
    #[serde(default = "MeanSpec::zero")]
    pub lambda: MeanSpec,
    #[serde(default = "VarianceSpec::identity")]
    pub rho: VarianceSpec,
    #[serde(default = "IntegrandSpec::identity")]
    pub integrand: IntegrandSpec,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub series: SeriesSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeanSpec {
    Zero,
    Linear {
        slope: f64,
        #[serde(default)]
        intercept: f64,
    },
    Piecewise { knots: Vec<f64>, values: Vec<f64> },
    Table { points: Vec<[f64; 2]> },
    Cantor {
        #[serde(default = "default_depth")]
        depth: u32,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl MeanSpec {
    fn zero() -> Self {
        MeanSpec::Zero
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VarianceSpec {
    Identity,
    Linear { slope: f64 },
    Power { exponent: f64 },
    Piecewise { knots: Vec<f64>, values: Vec<f64> },
    Table { points: Vec<[f64; 2]> },
}

impl VarianceSpec {
    fn identity() -> Self {
        VarianceSpec::Identity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntegrandSpec {
    Step { partition: Vec<f64>, values: Vec<f64> },
    Indicator { from: f64, to: f64 },
    Constant { value: f64 },
    Linear {
        slope: f64,
        #[serde(default)]
        intercept: f64,
    },
    /// Member `index` of the configured basis family.
    Basis { index: usize },
}

impl IntegrandSpec {
    fn identity() -> Self {
        IntegrandSpec::Linear { slope: 1.0, intercept: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    #[default]
    Increments,
    Series,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerKind,
    /// Test fixture: every path reuses stream 0.
    #[serde(default, skip_serializing_if = "is_false")]
    pub stream_reuse: bool,
}

impl Default for McSpec {
    fn default() -> Self {
        Self { paths: default_paths(), seed: default_seed(), sampler: SamplerKind::default(), stream_reuse: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    #[default]
    T,
    Rho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_grid_points")]
    pub points: usize,
    #[serde(default)]
    pub scale: GridScale,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { points: default_grid_points(), scale: GridScale::T }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[default]
    Cosine,
    Haar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    #[serde(rename = "N", default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub family: Family,
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self { truncation: default_truncation(), family: Family::Cosine }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { resolution: default_resolution() }
    }
}

fn default_depth() -> u32 {
    DEFAULT_CANTOR_DEPTH
}
fn one() -> f64 {
    1.0
}
fn default_paths() -> usize {
    10_000
}
fn default_seed() -> u64 {
    1
}
fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}
fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}
fn default_resolution() -> usize {
    DEFAULT_RESOLUTION
}
fn is_false(b: &bool) -> bool {
    !*b
}

/// Command-line overrides, applied on top of the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
    pub grid: Option<usize>,
    pub truncation: Option<usize>,
}

impl Default for Config {
    /// Standard Brownian motion on `[0, 1]` with `f(t) = t`.
    fn default() -> Self {
        Self {
            interval: [0.0, 1.0],
            lambda: MeanSpec::zero(),
            rho: VarianceSpec::identity(),
            integrand: IntegrandSpec::identity(),
            mc: McSpec::default(),
            grid: GridSpec::default(),
            series: SeriesSpec::default(),
            quadrature: QuadratureSpec::default(),
        }
    }
}

fn invalid(field: &str, message: impl ToString) -> CliError {
    CliError::Config { field: field.to_string(), message: message.to_string() }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let field = if field == "." { "<root>".to_string() } else { field };
            invalid(&field, e.into_inner())
        })
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(s) = o.seed {
            self.mc.seed = s;
        }
        if let Some(p) = o.paths {
            self.mc.paths = p;
        }
        if let Some(g) = o.grid {
            self.grid.points = g;
        }
        if let Some(n) = o.truncation {
            self.series.truncation = n;
        }
    }

    /// Canonical serialization used for hashing.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<Model, CliError> {
        let [a, b] = self.interval;
        let interval = Interval::new(a, b).map_err(|e| invalid("interval", e))?;
        let lambda = build_mean(&self.lambda, interval).map_err(|e| invalid("lambda", e))?;
        let rho = build_variance(&self.rho, interval).map_err(|e| invalid("rho", e))?;
        let spec = YehSpec::new(lambda, rho.clone()).map_err(|e| invalid("interval", e))?;
        let basis = BasisFamily::new(
            rho.clone(),
            match self.series.family {
                Family::Cosine => BasisKind::CosinePullback,
                Family::Haar => BasisKind::HaarPullback,
            },
        );
        let integrand = build_integrand(&self.integrand, &basis).map_err(|e| invalid("integrand", e))?;
        if self.mc.paths < 2 {
            return Err(invalid("mc.paths", "need at least 2 paths"));
        }
        if self.series.truncation == 0 {
            return Err(invalid("series.N", "truncation must be ≥ 1"));
        }
        if self.quadrature.resolution == 0 {
            return Err(invalid("quadrature.resolution", "resolution must be ≥ 1"));
        }
        let grid = match self.grid.scale {
            GridScale::T => Grid::uniform(interval, self.grid.points),
            GridScale::Rho => Grid::rho_scale(&rho, self.grid.points),
        }
        .map_err(|e| invalid("grid.points", e))?;
        let streams = if self.mc.stream_reuse {
            StreamPlan::reusing(self.mc.seed)
        } else {
            StreamPlan::new(self.mc.seed)
        };
        Ok(Model {
            spec,
            integrand,
            basis,
            grid,
            paths: self.mc.paths,
            streams,
            sampler: self.mc.sampler,
            truncation: self.series.truncation,
            resolution: self.quadrature.resolution,
        })
    }
}

fn build_mean(spec: &MeanSpec, iv: Interval) -> yeh_core::Result<MeanFunction> {
    match spec {
        MeanSpec::Zero => Ok(MeanFunction::zero(iv)),
        MeanSpec::Linear { slope, intercept } => MeanFunction::linear(iv, *slope, *intercept),
        MeanSpec::Piecewise { knots, values } => MeanFunction::piecewise(iv, knots.clone(), values.clone()),
        MeanSpec::Table { points } => MeanFunction::table(iv, &pairs(points)),
        MeanSpec::Cantor { depth, scale } => MeanFunction::cantor_with(iv, *depth, *scale),
    }
}

fn build_variance(spec: &VarianceSpec, iv: Interval) -> yeh_core::Result<VarianceFunction> {
    match spec {
        VarianceSpec::Identity => Ok(VarianceFunction::identity(iv)),
        VarianceSpec::Linear { slope } => VarianceFunction::linear(iv, *slope),
        VarianceSpec::Power { exponent } => VarianceFunction::power(iv, *exponent),
        VarianceSpec::Piecewise { knots, values } => VarianceFunction::piecewise(iv, knots.clone(), values.clone()),
        VarianceSpec::Table { points } => VarianceFunction::table(iv, &pairs(points)),
    }
}

fn build_integrand(spec: &IntegrandSpec, basis: &BasisFamily) -> yeh_core::Result<Integrand> {
    Ok(match spec {
        IntegrandSpec::Step { partition, values } => StepFunction::new(partition.clone(), values.clone())?.into(),
        IntegrandSpec::Indicator { from, to } => StepFunction::indicator(*from, *to)?.into(),
        IntegrandSpec::Constant { value } => Integrand::constant(*value),
        IntegrandSpec::Linear { slope, intercept } => Integrand::linear(*slope, *intercept),
        IntegrandSpec::Basis { index } => basis.member(*index)?,
    })
}

fn pairs(points: &[[f64; 2]]) -> Vec<(f64, f64)> {
    points.iter().map(|&[t, v]| (t, v)).collect()
}

/// A validated configuration in core terms.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: YehSpec,
    pub integrand: Integrand,
    pub basis: BasisFamily,
    pub grid: Grid,
    pub paths: usize,
    pub streams: StreamPlan,
    pub sampler: SamplerKind,
    pub truncation: usize,
    pub resolution: usize,
}
