//! The two-stage local mode test: split the sample, find candidate modes on
//! one half, bootstrap Hessian eigenvalues on the other.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boot::{eigen_portrait, EigenPortrait};
use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::esp::check_level;
use crate::kde::{check_bandwidth, DensityModel};
use crate::modes::{find_modes, MeanShiftOptions, ModeCandidate};

pub const DEFAULT_BOOTSTRAP: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTestConfig {
    pub h: f64,
    pub alpha: f64,
    #[serde(rename = "B")]
    pub b: usize,
    pub split_seed: u64,
    pub boot_seed: u64,
    pub mean_shift: MeanShiftOptions,
}

impl ModeTestConfig {
    pub fn new(h: f64, alpha: f64) -> Self {
        Self {
            h,
            alpha,
            b: DEFAULT_BOOTSTRAP,
            split_seed: 0,
            boot_seed: 1,
            mean_shift: MeanShiftOptions::default(),
        }
    }

    pub fn with_bootstrap(mut self, b: usize) -> Self {
        self.b = b;
        self
    }

    /// Derives both seeds from one run seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.split_seed = seed;
        self.boot_seed = seed ^ 0x5DEE_CE66_D1CE_4E5B;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_bandwidth(self.h)?;
        check_level("alpha", self.alpha)?;
        if self.b == 0 {
            return Err(invalid("B", "need at least one bootstrap replicate"));
        }
        self.mean_shift.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeTestReport {
    pub candidates: Vec<ModeCandidate>,
    pub portraits: Vec<EigenPortrait>,
    pub k: usize,
    pub significant_count: usize,
    /// `||grad p_Y(m_j)||` per candidate.
    pub stage2_gradient_norms: Vec<f64>,
    /// Stage-1 absolute gradient tolerance.
    pub grad_tol: f64,
    /// Stage-1 mesh points that failed to converge.
    pub non_converged: usize,
}

impl ModeTestReport {
    pub fn empty() -> Self {
        Self {
            candidates: Vec::new(),
            portraits: Vec::new(),
            k: 0,
            significant_count: 0,
            stage2_gradient_norms: Vec::new(),
            grad_tol: 0.0,
            non_converged: 0,
        }
    }

    pub fn significant_modes(&self) -> impl Iterator<Item = &EigenPortrait> {
        self.portraits.iter().filter(|p| p.significant)
    }

    /// Significant candidates whose stage-2 gradient norm is at least
    /// `factor * grad_tol`. Purely diagnostic.
    pub fn gradient_exceedances(&self, factor: f64) -> Vec<usize> {
        self.portraits
            .iter()
            .zip(&self.stage2_gradient_norms)
            .enumerate()
            .filter(|(_, (p, &g))| p.significant && g >= factor * self.grad_tol)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Index sets of a random half split: `x` gets `floor(n/2)` rows, `y` the rest.
pub fn split_indices(n: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(invalid("n", format!("cannot split {n} points into two halves")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let y = idx.split_off(n / 2);
    Ok((idx, y))
}

pub fn split(data: &DataMatrix, seed: u64) -> Result<(DataMatrix, DataMatrix)> {
    let (xi, yi) = split_indices(data.n(), seed)?;
    Ok((data.select(&xi)?, data.select(&yi)?))
}

/// Stage 1: candidate modes of the kernel estimate on `x`, meshed at its own
/// points. No converged trajectory means no candidates.
pub fn stage_one(x: &DataMatrix, cfg: &ModeTestConfig) -> Result<(Vec<ModeCandidate>, f64, usize)> {
    let model = DensityModel::new(x.clone(), cfg.h)?;
    match find_modes(&model, x, &cfg.mean_shift) {
        Ok(search) => Ok((search.candidates, search.grad_tol, search.non_converged.len())),
        Err(Error::NoConvergence) => Ok((Vec::new(), 0.0, x.n())),
        Err(e) => Err(e),
    }
}

/// Stage 2: one bootstrap per candidate on `y`, each at level `1 - alpha/k`.
pub fn stage_two(
    y: &DataMatrix,
    candidates: &[ModeCandidate],
    cfg: &ModeTestConfig,
) -> Result<(Vec<EigenPortrait>, Vec<f64>)> {
    let k = candidates.len();
    if k == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let alpha_over_k = cfg.alpha / k as f64;
    let out: Vec<(EigenPortrait, f64)> = candidates
        .par_iter()
        .enumerate()
        .map(|(j, mode)| {
            let (portrait, est) =
                eigen_portrait(y, cfg.h, mode, cfg.b, alpha_over_k, mode_seed(cfg.boot_seed, j))?;
            let gnorm = est.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
            Ok((portrait, gnorm))
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().unzip())
}

/// Bootstrap seed for candidate `j`.
fn mode_seed(seed: u64, j: usize) -> u64 {
    seed.wrapping_add((j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn assemble(
    candidates: Vec<ModeCandidate>,
    portraits: Vec<EigenPortrait>,
    norms: Vec<f64>,
    grad_tol: f64,
    non_converged: usize,
) -> ModeTestReport {
    ModeTestReport {
        k: candidates.len(),
        significant_count: portraits.iter().filter(|p| p.significant).count(),
        candidates,
        portraits,
        stage2_gradient_norms: norms,
        grad_tol,
        non_converged,
    }
}

/// Runs the test on already split halves.
pub fn run_on_halves(x: &DataMatrix, y: &DataMatrix, cfg: &ModeTestConfig) -> Result<ModeTestReport> {
    cfg.validate()?;
    if x.d() != y.d() {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            found: y.d(),
        });
    }
    let (candidates, grad_tol, non_converged) = stage_one(x, cfg)?;
    let (portraits, norms) = stage_two(y, &candidates, cfg)?;
    Ok(assemble(candidates, portraits, norms, grad_tol, non_converged))
}

/// Full pipeline: split, find candidates on the first half, test each on the
/// second half with a Bonferroni-corrected bootstrap.
pub fn run_mode_test(data: &DataMatrix, cfg: &ModeTestConfig) -> Result<ModeTestReport> {
    cfg.validate()?;
    if data.n() < 4 {
        return Err(invalid("n", format!("need at least 4 points, got {}", data.n())));
    }
    let (x, y) = split(data, cfg.split_seed)?;
    run_on_halves(&x, &y, cfg)
}
