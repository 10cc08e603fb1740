//! Bandwidth selection by maximizing the number of significant modes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::kde::check_bandwidth;
use crate::modetest::{run_on_halves, split, ModeTestConfig, ModeTestReport};

pub const DEFAULT_GRID_COUNT: usize = 30;

/// Significant-mode counts over a bandwidth grid and the selected bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthScan {
    pub h: Vec<f64>,
    /// Candidate counts `k(h)`.
    pub k: Vec<usize>,
    /// Significant counts `N(h)`.
    #[serde(rename = "N")]
    pub n_significant: Vec<usize>,
    pub h_hat: f64,
    /// `max_h N(h)`.
    pub m: usize,
    #[serde(skip)]
    pub reports: Vec<ModeTestReport>,
}

impl BandwidthScan {
    pub fn index_of_h_hat(&self) -> usize {
        self.h.iter().position(|&h| h == self.h_hat).unwrap_or(0)
    }

    pub fn report_at_h_hat(&self) -> Option<&ModeTestReport> {
        self.reports.get(self.index_of_h_hat())
    }
}

/// `count` geometrically spaced bandwidths from `lo` to `hi`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    check_bandwidth(lo)?;
    check_bandwidth(hi)?;
    if count == 0 {
        return Err(invalid("grid_count", "must be at least 1"));
    }
    if hi < lo {
        return Err(invalid("grid_max", format!("{hi} is below grid_min {lo}")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| lo * (ratio * i as f64).exp()).collect();
    grid[count - 1] = hi;
    Ok(grid)
}

/// From `0.05 s` to `2 s`, `s` the largest marginal standard deviation.
pub fn default_grid(data: &DataMatrix) -> Result<Vec<f64>> {
    let s = data.column_std().into_iter().fold(0.0, f64::max);
    if !(s > 0.0) {
        return Err(invalid("data", "zero spread; cannot build a default bandwidth grid"));
    }
    geometric_grid(0.05 * s, 2.0 * s, DEFAULT_GRID_COUNT)
}

/// Runs the mode test at every `h` on one fixed split of `data` and returns
/// the smallest `h` attaining the largest significant-mode count.
/// `cfg.h` is ignored.
pub fn scan(data: &DataMatrix, grid: &[f64], cfg: &ModeTestConfig) -> Result<BandwidthScan> {
    if grid.is_empty() {
        return Err(Error::Empty("bandwidth grid"));
    }
    for &h in grid {
        check_bandwidth(h)?;
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let (x, y) = split(data, cfg.split_seed)?;
    let reports: Vec<ModeTestReport> = sorted
        .par_iter()
        .map(|&h| run_on_halves(&x, &y, &ModeTestConfig { h, ..*cfg }))
        .collect::<Result<_>>()?;

    let k: Vec<usize> = reports.iter().map(|r| r.k).collect();
    let n_significant: Vec<usize> = reports.iter().map(|r| r.significant_count).collect();
    let (h_hat, m) = select(&sorted, &n_significant);
    Ok(BandwidthScan {
        h: sorted,
        k,
        n_significant,
        h_hat,
        m,
        reports,
    })
}

/// Smallest grid value attaining the maximum count.
pub fn select(grid: &[f64], counts: &[usize]) -> (f64, usize) {
    let m = counts.iter().copied().max().unwrap_or(0);
    let i = counts.iter().position(|&c| c == m).unwrap_or(0);
    (grid[i], m)
}
