//! Executes a [`RunConfig`] and writes its artifacts.

use std::path::{Path, PathBuf};

use modesig_core::bandwidth::{default_grid, geometric_grid, scan};
use modesig_core::persist::{default_resolution, persistence_test};
use modesig_core::{generate, run_mode_test, DataMatrix, ModeTestConfig};

use crate::config::{Command, GridRange, RunConfig};
use crate::error::{io_err, CliError, Result};
use crate::input::{load_csv, write_csv};
use crate::report::Report;
use crate::svg;

pub fn load_data(cfg: &RunConfig) -> Result<DataMatrix> {
    match (&cfg.input, &cfg.generator) {
        (Some(path), None) => load_csv(path, cfg.header),
        (None, Some(spec)) => Ok(generate(spec)?),
        _ => Err(CliError::Config("exactly one of input and generator must be set".into())),
    }
}

fn bandwidth_grid(data: &DataMatrix, range: &GridRange) -> Result<Vec<f64>> {
    if range.min.is_none() && range.max.is_none() && range.count == modesig_core::bandwidth::DEFAULT_GRID_COUNT {
        return Ok(default_grid(data)?);
    }
    let s = data.column_std().into_iter().fold(0.0, f64::max);
    let lo = range.min.unwrap_or(0.05 * s);
    let hi = range.max.unwrap_or(2.0 * s);
    Ok(geometric_grid(lo, hi, range.count)?)
}

/// Runs the analysis for `test`, `persist` and `bandwidth`.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let data = load_data(cfg)?;
    execute_on(cfg, &data)
}

pub fn execute_on(cfg: &RunConfig, data: &DataMatrix) -> Result<Report> {
    let report = Report::new(cfg.clone());
    let mt = |h: f64| ModeTestConfig::new(h, cfg.alpha).with_bootstrap(cfg.b).with_seed(cfg.seed);
    match cfg.command {
        Command::Test => {
            let h = cfg.h.expect("validated");
            Ok(report.with_mode_test(&run_mode_test(data, &mt(h))?))
        }
        Command::Persist => {
            let h = cfg.h.expect("validated");
            let res = cfg.grid_res.unwrap_or_else(|| default_resolution(data.d()));
            let (_, diagram) = persistence_test(data, h, res, cfg.alpha, cfg.b, cfg.seed)?;
            Ok(report.with_persistence(&diagram))
        }
        Command::Bandwidth => {
            let grid = bandwidth_grid(data, &cfg.grid.clone().unwrap_or_default())?;
            let s = scan(data, &grid, &mt(grid[0]))?;
            let best = s.report_at_h_hat().expect("scan has one report per grid value");
            Ok(report.with_mode_test(best).with_scan(&s))
        }
        Command::Simulate => Err(CliError::Config("simulate produces data, not a report".into())),
    }
}

fn write(path: PathBuf, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::write(&path, bytes).map_err(io_err(&path))?;
    Ok(path)
}

/// Writes `report.json` and, if asked, the figures that apply.
pub fn emit_report(report: &Report, out_dir: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = vec![write(out_dir.join("report.json"), &report.to_json())?];
    if plots {
        if report.config.command != Command::Persist {
            written.push(write(
                out_dir.join("eigenportrait.svg"),
                svg::eigenportrait(&report.portraits).as_bytes(),
            )?);
        }
        if let Some(p) = &report.persistence {
            written.push(write(out_dir.join("persistence.svg"), svg::persistence(p).as_bytes())?);
        }
        if let Some(s) = &report.scan {
            written.push(write(out_dir.join("bandwidth.svg"), svg::bandwidth(s).as_bytes())?);
        }
    }
    Ok(written)
}

/// Writes the generated sample to `out/data.csv`.
pub fn simulate(cfg: &RunConfig) -> Result<PathBuf> {
    cfg.validate()?;
    let data = load_data(cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
    let path = cfg.out.join("data.csv");
    let mut buf = Vec::new();
    write_csv(&mut buf, &data).map_err(io_err(&path))?;
    write(path, &buf)
}

/// What a completed run produced.
pub enum Outcome {
    Report { report: Box<Report>, files: Vec<PathBuf> },
    Data(PathBuf),
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    if cfg.command == Command::Simulate {
        return simulate(cfg).map(Outcome::Data);
    }
    let report = execute(cfg)?;
    let files = emit_report(&report, &cfg.out, cfg.plots)?;
    Ok(Outcome::Report {
        report: Box::new(report),
        files,
    })
}
