//! Batch front end for `yeh-core`: simulation, verification batteries and
//! series expansion, driven by a JSON config.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod suites;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Config, Overrides};
use error::CliError;
use suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "yeh", version, about = "Simulate and verify Yeh processes and their Wiener integrals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample paths and write paths.csv, summary.csv and bundle.json.
    Simulate(Common),
    /// Run a verification battery and write verify_<suite>.csv.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Expand the integral along one centered path and write expansion.csv.
    Expand(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config; defaults to Brownian motion on [0, 1] with f(t) = t.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, env = "YEH_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub paths: Option<usize>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Series truncation N.
    #[arg(long)]
    pub truncation: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<Config, CliError> {
        let mut config = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                Config::from_json(&text)?
            }
            None => Config::default(),
        };
        config.apply(Overrides { seed: self.seed, paths: self.paths, grid: self.grid, truncation: self.truncation });
        Ok(config)
    }
}

/// Exit status: 0 success, 1 a verification check failed, 2 invalid input,
/// 3 I/O failure.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Simulate(c) => c.load().and_then(|cfg| commands::simulate(&cfg, &c.out)).map(|()| true),
        Command::Verify { suite, common } => common.load().and_then(|cfg| commands::verify(&cfg, *suite, &common.out)),
        Command::Expand(c) => c.load().and_then(|cfg| commands::expand(&cfg, &c.out)).map(|()| true),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}
