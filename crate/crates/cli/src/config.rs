use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use ctstd_core::Strategy;
use serde::{Deserialize, Serialize};

/// Flags shared by every subcommand. Unset options fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Input root (scan directories), embeddings CSV, or phantom spec JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output root directory (or report path for `analyze`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Half-width k of the (2k+1)^2 mean filter.
    #[arg(long)]
    pub radius: Option<usize>,
    /// Treat dark structures as lung.
    #[arg(long)]
    pub invert: bool,
    /// Drop mask components smaller than this fraction of the slice.
    #[arg(long)]
    pub min_component_fraction: Option<f64>,
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<Strategy>,
    /// Number of slices to keep per scan.
    #[arg(long)]
    pub n_slices: Option<usize>,
    /// Explicit quantile levels for kds, comma separated; overrides --n-slices.
    #[arg(long, value_delimiter = ',')]
    pub percentiles: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; scans are processed independently.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON file with any of the options above.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

/// Contents of a `--config` file; every key optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub radius: Option<usize>,
    pub invert: Option<bool>,
    pub min_component_fraction: Option<f64>,
    pub strategy: Option<Strategy>,
    pub n_slices: Option<usize>,
    pub percentiles: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Effective settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub radius: usize,
    pub invert: bool,
    pub min_component_fraction: f64,
    pub strategy: Strategy,
    pub n_slices: usize,
    pub percentiles: Option<Vec<f64>>,
    pub seed: u64,
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            input: None,
            output: None,
            radius: 1,
            invert: false,
            min_component_fraction: 0.001,
            strategy: Strategy::Kds,
            n_slices: 8,
            percentiles: None,
            seed: 0,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl RunConfig {
    /// Flags override the config file, which overrides defaults.
    pub fn resolve(command: &str, args: &CommonArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            command: command.to_string(),
            input: args.input.clone().or(file.input),
            output: args.output.clone().or(file.output),
            radius: args.radius.or(file.radius).unwrap_or(d.radius),
            invert: args.invert || file.invert.unwrap_or(d.invert),
            min_component_fraction: args
                .min_component_fraction
                .or(file.min_component_fraction)
                .unwrap_or(d.min_component_fraction),
            strategy: args.strategy.or(file.strategy).unwrap_or(d.strategy),
            n_slices: args.n_slices.or(file.n_slices).unwrap_or(d.n_slices),
            percentiles: args.percentiles.clone().or(file.percentiles),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            jobs: args.jobs.or(file.jobs).unwrap_or(d.jobs),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_slices == 0 {
            bail!("--n-slices must be at least 1");
        }
        if self.radius == 0 {
            bail!("--radius must be at least 1");
        }
        if !(0.0..1.0).contains(&self.min_component_fraction) {
            bail!("--min-component-fraction must lie in [0, 1)");
        }
        if self.jobs == 0 {
            bail!("--jobs must be at least 1");
        }
        if let Some(ps) = &self.percentiles {
            if ps.is_empty() {
                bail!("--percentiles needs at least one value");
            }
            if let Some(p) = ps.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                bail!("percentile {p} not in (0, 1)");
            }
        }
        Ok(())
    }

    /// Output-affecting settings as JSON, echoed into every manifest. The
    /// output root and worker count are left out: they never change what is
    /// written.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn require_input(&self) -> Result<&Path> {
        self.input.as_deref().context("--input is required")
    }

    pub fn require_output(&self) -> Result<&Path> {
        self.output.as_deref().context("--output is required")
    }
}
