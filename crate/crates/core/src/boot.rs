//! Bootstrap of Hessian eigenvalues at a fixed point, with confidence sets
//! built in ESP coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{check_point, DataMatrix};
use crate::error::{invalid, Result};
use crate::esp::{check_level, esp_forward, sym_eigenvalues, EigenValues, EspVector};
use crate::kde::{check_bandwidth, weighted_hessian, HessianEval};
use crate::modes::ModeCandidate;

/// Closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// Bootstrap replicates of the sorted Hessian eigenvalues and their ESP
/// vectors, plus the point estimate from the unresampled data.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapDraws {
    pub lambda_star: Vec<EigenValues>,
    pub s_star: Vec<EspVector>,
    pub lambda_hat: EigenValues,
    pub s_hat: EspVector,
    /// Full point estimate at the evaluation point.
    pub estimate: HessianEval,
}

impl BootstrapDraws {
    pub fn len(&self) -> usize {
        self.s_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_star.is_empty()
    }

    /// `||s*_b - s_hat||_inf` for every replicate.
    pub fn distances(&self) -> Vec<f64> {
        self.s_star.iter().map(|s| s.sup_distance(&self.s_hat)).collect()
    }
}

/// Sup-norm ball around `s_hat` in ESP coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EspConfidenceSet {
    pub center: EspVector,
    pub radius: f64,
    pub level: f64,
}

/// Per-mode confidence rectangles for `gamma = -lambda`, the interval for the
/// leading `gamma_1` and the significance verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPortrait {
    pub mode: ModeCandidate,
    /// Point estimate `-lambda_hat`, ascending.
    pub gamma_hat: Vec<f64>,
    pub gamma_rectangles: Vec<Interval>,
    pub c_interval: Interval,
    pub significant: bool,
    pub level: f64,
    /// Number of replicates inside the ESP confidence set.
    pub retained: usize,
}

/// Rectangles read off the retained replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Rectangles {
    pub gamma: Vec<Interval>,
    pub c_interval: Interval,
    pub retained: Vec<usize>,
}

/// RNG for replicate `b` under `seed`; independent of evaluation order.
pub fn replicate_rng(seed: u64, b: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(b);
    rng
}

/// Multiplicities of a size-`n` resample with replacement from `n` rows.
pub fn resample_counts(rng: &mut impl Rng, n: usize) -> Vec<u32> {
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    counts
}

/// Resamples `y` `b` times, recomputing the kernel Hessian at `point` each
/// time. Replicate `i` draws from [`replicate_rng`]`(seed, i)`.
pub fn bootstrap_hessian(
    y: &DataMatrix,
    h: f64,
    point: &[f64],
    b: usize,
    seed: u64,
) -> Result<BootstrapDraws> {
    check_bandwidth(h)?;
    check_point(point, y.d())?;
    if b == 0 {
        return Err(invalid("B", "need at least one bootstrap replicate"));
    }
    let n = y.n();
    let total = n as f64;
    let estimate = weighted_hessian(y, h, point, std::iter::repeat(1.0), total);
    let lambda_hat = sym_eigenvalues(&estimate.hessian)?;
    let s_hat = esp_forward(&lambda_hat);

    let reps: Vec<(EigenValues, EspVector)> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i as u64);
            let counts = resample_counts(&mut rng, n);
            let he = weighted_hessian(y, h, point, counts.iter().map(|&c| c as f64), total);
            let lambda = sym_eigenvalues(&he.hessian)?;
            let s = esp_forward(&lambda);
            Ok((lambda, s))
        })
        .collect::<Result<_>>()?;
    let (lambda_star, s_star) = reps.into_iter().unzip();
    Ok(BootstrapDraws {
        lambda_star,
        s_star,
        lambda_hat,
        s_hat,
        estimate,
    })
}

/// Smallest `z` among `values` such that the fraction of values strictly
/// above `z` is at most `tail`.
pub fn upper_quantile(values: &[f64], tail: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // Largest admissible count of strict exceedances. The slack absorbs
    // representation error in `tail * n` (0.05 * 100 is not exactly 5).
    let allowed = (tail * n as f64 * (1.0 + 1e-12)).floor() as usize;
    for (i, &z) in sorted.iter().enumerate() {
        let mut above = n - i - 1;
        let mut j = i + 1;
        while j < n && sorted[j] == z {
            above -= 1;
            j += 1;
        }
        if above <= allowed {
            return z;
        }
    }
    sorted[n - 1]
}

/// The radius `q` of the sup-norm ball holding all but an `alpha_over_k`
/// fraction of replicates.
pub fn esp_quantile(draws: &BootstrapDraws, alpha_over_k: f64) -> Result<EspConfidenceSet> {
    check_level("alpha_over_k", alpha_over_k)?;
    let q = upper_quantile(&draws.distances(), alpha_over_k);
    Ok(EspConfidenceSet {
        center: draws.s_hat.clone(),
        radius: q,
        level: 1.0 - alpha_over_k,
    })
}

/// Min/max of `-lambda*_s` over the replicates whose ESP vector lies in `cs`.
pub fn eigen_rectangles(draws: &BootstrapDraws, cs: &EspConfidenceSet) -> Rectangles {
    let retained: Vec<usize> = draws
        .distances()
        .iter()
        .enumerate()
        .filter(|(_, &dist)| dist <= cs.radius)
        .map(|(b, _)| b)
        .collect();
    assert!(!retained.is_empty(), "confidence set retained no replicate");
    let d = draws.lambda_hat.len();
    let gamma: Vec<Interval> = (0..d)
        .map(|s| {
            retained.iter().fold(
                Interval::new(f64::INFINITY, f64::NEG_INFINITY),
                |acc, &b| {
                    let g = -draws.lambda_star[b].as_slice()[s];
                    Interval::new(acc.lo.min(g), acc.hi.max(g))
                },
            )
        })
        .collect();
    Rectangles {
        c_interval: gamma[0],
        gamma,
        retained,
    }
}

/// Rejects `gamma_1 <= 0` when the whole interval sits above zero.
pub fn test_significance(c: &Interval) -> bool {
    c.lo > 0.0
}

/// Bootstrap, quantile, rectangles and verdict for one candidate.
pub fn eigen_portrait(
    y: &DataMatrix,
    h: f64,
    mode: &ModeCandidate,
    b: usize,
    alpha_over_k: f64,
    seed: u64,
) -> Result<(EigenPortrait, HessianEval)> {
    let draws = bootstrap_hessian(y, h, &mode.location, b, seed)?;
    let cs = esp_quantile(&draws, alpha_over_k)?;
    let rect = eigen_rectangles(&draws, &cs);
    let portrait = EigenPortrait {
        mode: mode.clone(),
        gamma_hat: draws.lambda_hat.negated(),
        significant: test_significance(&rect.c_interval),
        c_interval: rect.c_interval,
        gamma_rectangles: rect.gamma,
        level: cs.level,
        retained: rect.retained.len(),
    };
    Ok((portrait, draws.estimate))
}
