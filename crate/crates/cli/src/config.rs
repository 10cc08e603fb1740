//! Run configuration shared by the command line and `--config` files.

use std::path::PathBuf;

use modesig_core::GeneratorSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Test,
    Persist,
    Bandwidth,
    Simulate,
}

/// Bandwidth grid. Missing ends default to `0.05 s` and `2 s`, where `s` is
/// the largest marginal standard deviation of the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRange {
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default = "default_grid_count")]
    pub count: usize,
}

impl Default for GridRange {
    fn default() -> Self {
        Self {
            min: None,
            max: None,
            count: default_grid_count(),
        }
    }
}

fn default_grid_count() -> usize {
    modesig_core::bandwidth::DEFAULT_GRID_COUNT
}

fn default_alpha() -> f64 {
    0.10
}

fn default_b() -> usize {
    modesig_core::modetest::DEFAULT_BOOTSTRAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub header: bool,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub grid: Option<GridRange>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_b", rename = "B")]
    pub b: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub grid_res: Option<usize>,
    pub out: PathBuf,
    #[serde(default)]
    pub plots: bool,
}

impl RunConfig {
    /// A config with defaults for everything but the command and output.
    pub fn new(command: Command, out: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: None,
            header: false,
            generator: None,
            h: None,
            grid: None,
            alpha: default_alpha(),
            b: default_b(),
            seed: 0,
            grid_res: None,
            out: out.into(),
            plots: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        match (&self.input, &self.generator) {
            (Some(_), Some(_)) => return bad("give either an input file or a generator spec, not both".into()),
            (None, None) => return bad("an input file or a generator spec is required".into()),
            (Some(_), None) if self.command == Command::Simulate => {
                return bad("simulate needs a generator spec, not an input file".into())
            }
            _ => {}
        }
        if let Some(g) = &self.generator {
            g.validate()?;
        }
        if matches!(self.command, Command::Test | Command::Persist) {
            match self.h {
                Some(h) if h.is_finite() && h > 0.0 => {}
                Some(h) => return bad(format!("h = {h} must be positive")),
                None => return bad("h is required".into()),
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} must lie in (0, 1)", self.alpha));
        }
        if self.b == 0 {
            return bad("B must be at least 1".into());
        }
        if let Some(r) = self.grid_res {
            if r < 2 {
                return bad(format!("grid_res = {r} must be at least 2"));
            }
        }
        if let Some(g) = &self.grid {
            if g.count == 0 {
                return bad("grid count must be at least 1".into());
            }
            for v in [g.min, g.max].into_iter().flatten() {
                if !(v.is_finite() && v > 0.0) {
                    return bad(format!("grid bound {v} must be positive"));
                }
            }
            if let (Some(lo), Some(hi)) = (g.min, g.max) {
                if hi < lo {
                    return bad(format!("grid max {hi} is below grid min {lo}"));
                }
            }
        }
        Ok(())
    }
}
