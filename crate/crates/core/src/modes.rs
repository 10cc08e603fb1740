//! Mean-shift mode finding and basin assignment.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{check_point, squared_distance, DataMatrix};
use crate::error::{invalid, Error, Result};
use crate::kde::{DensityModel, Kernel};

/// Mean-shift stopping and merging rules. Tolerances are relative: step and
/// merge tolerances are multiplied by `h`, the gradient tolerance by
/// `peak density / h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanShiftOptions {
    pub max_iter: usize,
    pub step_tol: f64,
    pub merge_tol: f64,
    pub grad_tol: f64,
}

impl Default for MeanShiftOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            step_tol: 1e-7,
            merge_tol: 1e-2,
            grad_tol: 1e-6,
        }
    }
}

impl MeanShiftOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        for (name, v) in [
            ("step_tol", self.step_tol),
            ("merge_tol", self.merge_tol),
            ("grad_tol", self.grad_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("{v} must be positive")));
            }
        }
        Ok(())
    }
}

/// A located mode of the density estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCandidate {
    pub location: Vec<f64>,
    pub density_value: f64,
    /// Converged mesh points whose trajectory ended here.
    pub basin_size: usize,
    /// Largest iteration count among those trajectories.
    pub iterations: usize,
}

/// Candidate index for every mesh point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSearch {
    /// Sorted by descending density.
    pub candidates: Vec<ModeCandidate>,
    pub assignment: ClusterAssignment,
    /// Mesh indices whose trajectory hit `max_iter`. They are labelled with
    /// the candidate nearest their last iterate but do not count toward any
    /// basin.
    pub non_converged: Vec<usize>,
    /// Absolute gradient tolerance the candidates were checked against.
    pub grad_tol: f64,
}

/// One mean-shift update: the kernel-weighted mean of the data around `a`.
pub fn mean_shift_step(model: &DensityModel, a: &[f64]) -> Result<Vec<f64>> {
    check_point(a, model.dim())?;
    shift(model, a)
}

fn shift(model: &DensityModel, a: &[f64]) -> Result<Vec<f64>> {
    let d = model.dim();
    let h = model.bandwidth();
    let inv_h2 = 1.0 / (h * h);
    let mut num = vec![0.0; d];
    let mut den = 0.0;
    for xi in model.data().rows() {
        let w = Kernel::Gaussian.profile(squared_distance(a, xi) * inv_h2);
        if w == 0.0 {
            continue;
        }
        den += w;
        for (nj, xj) in num.iter_mut().zip(xi) {
            *nj += w * xj;
        }
    }
    if !(den > 0.0) {
        return Err(Error::EmptyNeighborhood);
    }
    num.iter_mut().for_each(|v| *v /= den);
    Ok(num)
}

/// Outcome of iterating mean shift from one start point.
#[derive(Debug, Clone, PartialEq)]
pub struct Ascent {
    pub end: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Iterates mean shift from `start` until a step shorter than
/// `step_tol * h` or `max_iter` steps.
pub fn ascend(model: &DensityModel, start: &[f64], opts: &MeanShiftOptions) -> Result<Ascent> {
    check_point(start, model.dim())?;
    run_ascent(model, start, opts, |_| {})
}

/// Like [`ascend`] but returns every iterate, starting with `start`.
pub fn trajectory(
    model: &DensityModel,
    start: &[f64],
    opts: &MeanShiftOptions,
) -> Result<Vec<Vec<f64>>> {
    check_point(start, model.dim())?;
    let mut path = vec![start.to_vec()];
    run_ascent(model, start, opts, |p| path.push(p.to_vec()))?;
    Ok(path)
}

fn run_ascent(
    model: &DensityModel,
    start: &[f64],
    opts: &MeanShiftOptions,
    mut visit: impl FnMut(&[f64]),
) -> Result<Ascent> {
    let tol2 = (opts.step_tol * model.bandwidth()).powi(2);
    let mut a = start.to_vec();
    for it in 1..=opts.max_iter {
        let next = shift(model, &a)?;
        visit(&next);
        let step2 = squared_distance(&next, &a);
        a = next;
        if step2 < tol2 {
            return Ok(Ascent {
                end: a,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(Ascent {
        end: a,
        iterations: opts.max_iter,
        converged: false,
    })
}

/// Runs mean shift from every mesh point, merges endpoints closer than
/// `merge_tol * h` (single linkage) and labels each mesh point with its
/// candidate.
pub fn find_modes(
    model: &DensityModel,
    mesh: &DataMatrix,
    opts: &MeanShiftOptions,
) -> Result<ModeSearch> {
    opts.validate()?;
    if mesh.d() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: mesh.d(),
        });
    }
    let ascents: Vec<Ascent> = (0..mesh.n())
        .into_par_iter()
        .map(|i| run_ascent(model, mesh.row(i), opts, |_| {}))
        .collect::<Result<_>>()?;

    let converged: Vec<usize> = (0..ascents.len()).filter(|&i| ascents[i].converged).collect();
    let non_converged: Vec<usize> = (0..ascents.len()).filter(|&i| !ascents[i].converged).collect();
    if converged.is_empty() {
        return Err(Error::NoConvergence);
    }

    let densities: Vec<f64> = converged
        .par_iter()
        .map(|&i| model.density(&ascents[i].end))
        .collect::<Result<_>>()?;

    // Single-linkage clusters of converged endpoints.
    let merge2 = (opts.merge_tol * model.bandwidth()).powi(2);
    let m = converged.len();
    let mut uf = UnionFind::new(m);
    for a in 0..m {
        let pa = &ascents[converged[a]].end;
        for b in (a + 1)..m {
            if squared_distance(pa, &ascents[converged[b]].end) <= merge2 {
                uf.union(a, b);
            }
        }
    }

    // Representative: the highest-density endpoint, earliest mesh index on ties.
    let mut best: Vec<Option<usize>> = vec![None; m];
    let mut sizes = vec![0usize; m];
    let mut iters = vec![0usize; m];
    for a in 0..m {
        let r = uf.find(a);
        sizes[r] += 1;
        iters[r] = iters[r].max(ascents[converged[a]].iterations);
        match best[r] {
            Some(cur) if densities[cur] >= densities[a] => {}
            _ => best[r] = Some(a),
        }
    }
    let mut roots: Vec<usize> = (0..m).filter(|&a| uf.find(a) == a).collect();
    roots.sort_by(|&x, &y| {
        let (bx, by) = (best[x].unwrap(), best[y].unwrap());
        densities[by].total_cmp(&densities[bx]).then(bx.cmp(&by))
    });
    let mut root_to_candidate = vec![usize::MAX; m];
    let candidates: Vec<ModeCandidate> = roots
        .iter()
        .enumerate()
        .map(|(c, &r)| {
            root_to_candidate[r] = c;
            let rep = best[r].unwrap();
            ModeCandidate {
                location: ascents[converged[rep]].end.clone(),
                density_value: densities[rep],
                basin_size: sizes[r],
                iterations: iters[r],
            }
        })
        .collect();

    let mut labels = vec![0usize; mesh.n()];
    for (a, &i) in converged.iter().enumerate() {
        labels[i] = root_to_candidate[uf.find(a)];
    }
    for &i in &non_converged {
        labels[i] = nearest(&candidates, &ascents[i].end);
    }

    let peak = candidates[0].density_value;
    Ok(ModeSearch {
        candidates,
        assignment: ClusterAssignment { labels },
        non_converged,
        grad_tol: opts.grad_tol * peak / model.bandwidth(),
    })
}

fn nearest(candidates: &[ModeCandidate], x: &[f64]) -> usize {
    candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (i, squared_distance(&c.location, x)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Links the larger root under the smaller one, so the root of a set is its
    /// smallest member.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        let (keep, drop) = if ra <= rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep;
        keep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(xs: &[f64], h: f64) -> DensityModel {
        DensityModel::new(DataMatrix::from_column(xs).unwrap(), h).unwrap()
    }

    #[test]
    fn single_point_jumps_in_one_step() {
        let m = DensityModel::new(DataMatrix::from_rows(&[[2.0, -3.0]]).unwrap(), 0.5).unwrap();
        let out = mean_shift_step(&m, &[10.0, 4.0]).unwrap();
        assert!((out[0] - 2.0).abs() < 1e-12 && (out[1] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_point_is_preserved() {
        let m = model(&[-1.0, 1.0], 1.0);
        let out = mean_shift_step(&m, &[0.0]).unwrap();
        assert!(out[0].abs() < 1e-12);
    }

    #[test]
    fn two_term_weighted_mean() {
        let m = model(&[0.0, 2.0], 1.0);
        let w0 = (-0.5f64 * 0.25).exp();
        let w2 = (-0.5f64 * 2.25).exp();
        let expected = 2.0 * w2 / (w0 + w2);
        let got = mean_shift_step(&m, &[0.5]).unwrap()[0];
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.537_9).abs() < 1e-4);
    }

    #[test]
    fn empty_neighborhood() {
        let m = model(&[0.0], 1.0);
        assert!(matches!(mean_shift_step(&m, &[1e3]), Err(Error::EmptyNeighborhood)));
    }

    #[test]
    fn options_validation() {
        let bad = MeanShiftOptions {
            max_iter: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = MeanShiftOptions {
            merge_tol: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn non_converged_points_are_flagged() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let m = model(&xs, 2.0);
        let opts = MeanShiftOptions {
            max_iter: 1,
            ..Default::default()
        };
        let mesh = DataMatrix::from_column(&xs).unwrap();
        match find_modes(&m, &mesh, &opts) {
            Err(Error::NoConvergence) => {}
            Ok(res) => {
                assert!(!res.non_converged.is_empty());
                let counted: usize = res.candidates.iter().map(|c| c.basin_size).sum();
                assert_eq!(counted + res.non_converged.len(), xs.len());
            }
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn union_find_roots_are_minimal() {
        let mut uf = UnionFind::new(5);
        uf.union(4, 2);
        uf.union(2, 3);
        assert_eq!(uf.find(3), 2);
        uf.union(3, 0);
        assert_eq!(uf.find(4), 0);
        assert_eq!(uf.find(1), 1);
    }
}
