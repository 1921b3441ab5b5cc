use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use yeh_core::process::{center, GaussianStream, IncrementSampler, SeriesSampler};
use yeh_core::series::Expansion;
use yeh_core::stats::{par_map_paths, RunningStats};
use yeh_core::stieltjes::Integrator;

use crate::config::{Config, Model, SamplerKind};
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::suites::{rows_to_csv, run_suite, Suite};

/// Paths written individually by `simulate`; summaries always use all paths.
pub const MAX_EXPORTED_PATHS: usize = 1000;
/// Paths sampled per batch while folding `simulate` summaries.
const CHUNK: usize = 1024;

pub struct Output {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Output {
    fn create(dir: &Path, config: &Config) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let out = Self { dir: dir.to_path_buf(), manifest: RunManifest::new(config) };
        out.write("manifest.json", &out.manifest.to_json())?;
        Ok(out)
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(path, e))
    }

    fn write_csv(&self, name: &str, body: &str) -> Result<(), CliError> {
        self.write(name, &(self.manifest.csv_header() + body))
    }
}

enum Source {
    Increments(IncrementSampler),
    Series { sampler: SeriesSampler, lambda: Vec<f64> },
}

impl Source {
    fn new(m: &Model) -> Result<Self, CliError> {
        Ok(match m.sampler {
            SamplerKind::Increments => Source::Increments(IncrementSampler::new(&m.spec, &m.grid)?),
            SamplerKind::Series => Source::Series {
                sampler: SeriesSampler::new(&m.spec, &m.basis, m.truncation, &m.grid)?,
                lambda: m.grid.points().iter().map(|&t| m.spec.lambda().value(t)).collect(),
            },
        })
    }

    fn fill(&self, stream: &mut GaussianStream, out: &mut [f64]) {
        match self {
            Source::Increments(s) => s.fill(stream, out),
            Source::Series { sampler, lambda } => {
                sampler.fill_centered(stream, out);
                out.iter_mut().zip(lambda).for_each(|(v, l)| *v += l);
            }
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct Bundle<'a> {
    manifest_hash: String,
    manifest: &'a RunManifest,
    grid: &'a [f64],
    paths: Vec<Vec<f64>>,
}

/// Writes `manifest.json`, `paths.csv`, `bundle.json` and `summary.csv`.
pub fn simulate(config: &Config, dir: &Path) -> Result<(), CliError> {
    let m = config.build()?;
    let out = Output::create(dir, config)?;
    let source = Source::new(&m)?;
    let points = m.grid.points();
    let sample = |k: usize| {
        let mut v = vec![0.0; points.len()];
        source.fill(&mut m.streams.stream(k as u64), &mut v);
        v
    };

    let mut stats = vec![RunningStats::new(); points.len()];
    let mut exported = Vec::new();
    let mut start = 0;
    while start < m.paths {
        let n = CHUNK.min(m.paths - start);
        let batch = par_map_paths(n, |k| sample(start + k as usize));
        for path in batch {
            for (s, &v) in stats.iter_mut().zip(&path) {
                s.push(v);
            }
            if exported.len() < MAX_EXPORTED_PATHS {
                exported.push(path);
            }
        }
        start += n;
    }

    let mut csv = String::from("path,t,value\n");
    for (k, path) in exported.iter().enumerate() {
        for (t, v) in points.iter().zip(path) {
            let _ = writeln!(csv, "{k},{},{}", num(*t), num(*v));
        }
    }
    out.write_csv("paths.csv", &csv)?;

    let mut csv = String::from("t,mean,variance,std_error,lambda,rho\n");
    for (&t, s) in points.iter().zip(&stats) {
        let e = s.estimate(Some(m.streams.seed()))?;
        let (l, r) = (m.spec.lambda().value(t), m.spec.rho().value(t));
        let _ = writeln!(csv, "{},{},{},{},{},{}", num(t), num(e.mean), num(e.variance), num(e.std_error), num(l), num(r));
    }
    out.write_csv("summary.csv", &csv)?;

    let bundle = Bundle { manifest_hash: out.manifest.hash(), manifest: &out.manifest, grid: points, paths: exported };
    out.write("bundle.json", &(serde_json::to_string(&bundle).expect("bundle serializes") + "\n"))
}

/// Writes `manifest.json` and `verify_<suite>.csv`; returns whether every
/// check passed.
pub fn verify(config: &Config, suite: Suite, dir: &Path) -> Result<bool, CliError> {
    let m = config.build()?;
    let rows = run_suite(suite, &m)?;
    let out = Output::create(dir, config)?;
    out.write_csv(&format!("verify_{}.csv", suite.name()), &rows_to_csv(&rows))?;
    Ok(rows.iter().all(|r| r.pass))
}

/// Expands the integral of the configured integrand along one centered
/// path (path 0) and writes `expansion.csv`.
pub fn expand(config: &Config, dir: &Path) -> Result<(), CliError> {
    let m = config.build()?;
    let expansion = Expansion::new(&m.integrand, &m.basis, m.truncation, &m.grid, m.grid.cells(), m.resolution)
        .map_err(|e| CliError::Config { field: "integrand".into(), message: e.to_string() })?;
    let path = IncrementSampler::new(&m.spec, &m.grid)?.sample(m.streams.stream(0));
    let path = center(&path, m.spec.lambda())?;
    let report = expansion.apply(&path)?;
    let mut body = Vec::new();
    report.write_csv(&mut body).expect("in-memory write");
    let out = Output::create(dir, config)?;
    let body = String::from_utf8(body).expect("utf-8 csv");
    out.write_csv("expansion.csv", &format!("# target {}\n{body}", num(report.target)))
}
