//! Zero-dimensional superlevel-set persistence of a gridded density, and a
//! bootstrap sup-norm band for separating real peaks from noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boot::{replicate_rng, resample_counts, upper_quantile};
use crate::data::DataMatrix;
use crate::error::{invalid, Error, Result};
use crate::esp::check_level;
use crate::kde::{check_bandwidth, Kernel};

pub const MAX_GRID_DIM: usize = 3;

/// Default points per axis for a `d`-dimensional grid.
pub fn default_resolution(d: usize) -> usize {
    if d <= 2 {
        128
    } else {
        64
    }
}

/// Function values on a product grid, row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(Vec::is_empty) {
            return Err(Error::Empty("grid axis"));
        }
        let cells: usize = axes.iter().map(Vec::len).product();
        if values.len() != cells {
            return Err(invalid(
                "values",
                format!("{} values for a grid of {cells} cells", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("values", "grid values must be finite and non-negative"));
        }
        if axes.iter().any(|a| a.windows(2).any(|w| !(w[0] < w[1]))) {
            return Err(invalid("axes", "axis coordinates must be strictly increasing"));
        }
        Ok(Self { axes, values })
    }

    /// A 1-d grid with unit spacing; handy for small examples.
    pub fn from_values_1d(values: Vec<f64>) -> Result<Self> {
        let axis = (0..values.len()).map(|i| i as f64).collect();
        Self::new(vec![axis], values)
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Vec::len).collect()
    }

    /// Coordinates of flat index `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        let mut p = vec![0.0; self.axes.len()];
        for (j, axis) in self.axes.iter().enumerate().rev() {
            p[j] = axis[rest % axis.len()];
            rest /= axis.len();
        }
        p
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Flat indices of the axis neighbours of `idx` (at most `2d`).
pub fn grid_neighbors(shape: &[usize], idx: usize, out: &mut Vec<usize>) {
    out.clear();
    let mut stride = 1;
    for &len in shape.iter().rev() {
        let coord = (idx / stride) % len;
        if coord > 0 {
            out.push(idx - stride);
        }
        if coord + 1 < len {
            out.push(idx + stride);
        }
        stride *= len;
    }
}

/// A birth/death pair of a superlevel-set component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub death: f64,
    pub birth: f64,
    /// Grid location of the local maximum that created the component.
    pub birth_point: Vec<f64>,
}

impl PersistencePair {
    pub fn lifetime(&self) -> f64 {
        self.birth - self.death
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
    pub band: f64,
}

impl PersistenceDiagram {
    /// Pairs farther than `2 * band` from the diagonal.
    pub fn significant_pairs(&self) -> Vec<&PersistencePair> {
        self.pairs
            .iter()
            .filter(|p| p.lifetime() > 2.0 * self.band)
            .collect()
    }
}

/// Processing order: decreasing value, ties by increasing flat index.
pub fn filtration_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

/// Persistence pairs of the superlevel filtration by union-find. At a merge
/// the component born later dies. The surviving component gets the grid
/// minimum as its death value. Sorted by descending lifetime.
pub fn superlevel_persistence(f: &GridFunction) -> Vec<PersistencePair> {
    let values = f.values();
    let shape = f.shape();
    let order = filtration_order(values);
    let n = values.len();
    let mut rank = vec![usize::MAX; n];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }

    // parent over flat indices; root carries the rank of its birth vertex.
    let mut parent: Vec<usize> = (0..n).collect();
    let mut birth_rank = vec![usize::MAX; n];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut pairs = Vec::new();
    let mut nbrs = Vec::with_capacity(2 * shape.len());
    let mut roots = Vec::with_capacity(2 * shape.len());
    for (r, &v) in order.iter().enumerate() {
        grid_neighbors(&shape, v, &mut nbrs);
        roots.clear();
        for &u in &nbrs {
            if rank[u] < r {
                let ru = find(&mut parent, u);
                if !roots.contains(&ru) {
                    roots.push(ru);
                }
            }
        }
        if roots.is_empty() {
            birth_rank[v] = r;
            continue;
        }
        // Elder = earliest birth in the filtration.
        let elder = *roots.iter().min_by_key(|&&x| birth_rank[x]).unwrap();
        for &other in &roots {
            if other != elder {
                let b = order[birth_rank[other]];
                pairs.push(PersistencePair {
                    death: values[v],
                    birth: values[b],
                    birth_point: f.point(b),
                });
                parent[other] = elder;
            }
        }
        parent[v] = elder;
    }
    // Grid graphs are connected: exactly one essential class remains.
    let top = order[0];
    pairs.push(PersistencePair {
        death: f.min_value(),
        birth: values[top],
        birth_point: f.point(top),
    });
    sort_pairs(&mut pairs);
    pairs
}

pub(crate) fn sort_pairs(pairs: &mut [PersistencePair]) {
    pairs.sort_by(|a, b| {
        b.lifetime()
            .total_cmp(&a.lifetime())
            .then(b.birth.total_cmp(&a.birth))
            .then(a.death.total_cmp(&b.death))
    });
}

/// Axes spanning the data bounding box padded by `3h`, `res` points each.
pub fn grid_axes(data: &DataMatrix, h: f64, res: usize) -> Result<Vec<Vec<f64>>> {
    check_bandwidth(h)?;
    check_grid_dim(data.d())?;
    if res < 2 {
        return Err(invalid("grid_res", "need at least 2 points per axis"));
    }
    Ok(data
        .bounds()
        .into_iter()
        .map(|(lo, hi)| {
            let (lo, hi) = (lo - 3.0 * h, hi + 3.0 * h);
            let step = (hi - lo) / (res - 1) as f64;
            (0..res).map(|i| lo + step * i as f64).collect()
        })
        .collect())
}

fn check_grid_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_GRID_DIM {
        return Err(invalid(
            "d",
            format!("persistence grids support 1 to {MAX_GRID_DIM} dimensions, got {d}"),
        ));
    }
    Ok(())
}

/// Exact kernel estimate on a product grid with per-row weights, using the
/// product form of the Gaussian kernel.
fn grid_density(
    data: &DataMatrix,
    weights: Option<&[u32]>,
    h: f64,
    axes: &[Vec<f64>],
) -> Vec<f64> {
    let d = data.d();
    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let cells: usize = shape.iter().product();
    let last = shape[d - 1];
    let prefixes = cells / last;
    let inv_h = 1.0 / h;
    let mut out = vec![0.0; cells];
    let mut factors: Vec<Vec<f64>> = shape.iter().map(|&l| vec![0.0; l]).collect();
    let mut coord = vec![0usize; d.saturating_sub(1)];
    for i in 0..data.n() {
        let w = weights.map_or(1.0, |w| w[i] as f64);
        if w == 0.0 {
            continue;
        }
        let xi = data.row(i);
        for j in 0..d {
            for (f, &g) in factors[j].iter_mut().zip(&axes[j]) {
                let u = (g - xi[j]) * inv_h;
                *f = Kernel::Gaussian.profile(u * u);
            }
        }
        coord.iter_mut().for_each(|c| *c = 0);
        for p in 0..prefixes {
            let mut scale = w;
            for (j, &c) in coord.iter().enumerate() {
                scale *= factors[j][c];
            }
            if scale != 0.0 {
                let row = &mut out[p * last..(p + 1) * last];
                for (o, &f) in row.iter_mut().zip(&factors[d - 1]) {
                    *o += scale * f;
                }
            }
            for j in (0..coord.len()).rev() {
                coord[j] += 1;
                if coord[j] < shape[j] {
                    break;
                }
                coord[j] = 0;
            }
        }
    }
    let total = weights.map_or(data.n() as f64, |w| w.iter().map(|&c| c as f64).sum());
    let c = Kernel::Gaussian.normalizer(d) / h.powi(d as i32) / total;
    out.iter_mut().for_each(|v| *v *= c);
    out
}

/// Kernel density estimate of `data` evaluated on `axes`.
pub fn kde_on_grid(data: &DataMatrix, h: f64, axes: Vec<Vec<f64>>) -> Result<GridFunction> {
    check_bandwidth(h)?;
    check_grid_dim(data.d())?;
    if axes.len() != data.d() {
        return Err(Error::DimensionMismatch {
            expected: data.d(),
            found: axes.len(),
        });
    }
    let values = grid_density(data, None, h, &axes);
    GridFunction::new(axes, values)
}

/// Bootstrap quantile of `sup_grid |p*_b - p|`: the smallest deviation whose
/// exceedance fraction is at most `alpha`.
pub fn bootstrap_band(
    data: &DataMatrix,
    h: f64,
    axes: &[Vec<f64>],
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<f64> {
    check_level("alpha", alpha)?;
    if b == 0 {
        return Err(invalid("B", "need at least one bootstrap replicate"));
    }
    let base = kde_on_grid(data, h, axes.to_vec())?;
    let deviations: Vec<f64> = (0..b)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(seed, i as u64);
            let counts = resample_counts(&mut rng, data.n());
            let star = grid_density(data, Some(&counts), h, axes);
            star.iter()
                .zip(base.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(upper_quantile(&deviations, alpha))
}

/// Grid, diagram and band for `data` at bandwidth `h`.
pub fn persistence_test(
    data: &DataMatrix,
    h: f64,
    res: usize,
    alpha: f64,
    b: usize,
    seed: u64,
) -> Result<(GridFunction, PersistenceDiagram)> {
    let axes = grid_axes(data, h, res)?;
    let band = bootstrap_band(data, h, &axes, alpha, b, seed)?;
    let grid = kde_on_grid(data, h, axes)?;
    let pairs = superlevel_persistence(&grid);
    Ok((grid, PersistenceDiagram { pairs, band }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dh(pairs: &[PersistencePair]) -> Vec<(f64, f64)> {
        pairs.iter().map(|p| (p.death, p.birth)).collect()
    }

    #[test]
    fn single_peak() {
        let g = GridFunction::from_values_1d(vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(dh(&superlevel_persistence(&g)), vec![(0.0, 1.0)]);
    }

    #[test]
    fn two_peaks_elder_rule() {
        let g = GridFunction::from_values_1d(vec![0.0, 3.0, 1.0, 2.0, 0.0]).unwrap();
        let p = superlevel_persistence(&g);
        assert_eq!(dh(&p), vec![(0.0, 3.0), (1.0, 2.0)]);
        assert_eq!(p[1].birth_point, vec![3.0]);
    }

    #[test]
    fn constant_grid() {
        let g = GridFunction::from_values_1d(vec![0.5; 6]).unwrap();
        assert_eq!(dh(&superlevel_persistence(&g)), vec![(0.5, 0.5)]);
    }

    #[test]
    fn two_dimensional_neighbors() {
        let mut out = Vec::new();
        grid_neighbors(&[3, 4], 5, &mut out);
        out.sort_unstable();
        assert_eq!(out, vec![1, 4, 6, 9]);
        grid_neighbors(&[3, 4], 0, &mut out);
        out.sort_unstable();
        assert_eq!(out, vec![1, 4]);
    }

    #[test]
    fn significant_pairs_band() {
        let diag = PersistenceDiagram {
            pairs: vec![
                PersistencePair {
                    death: 0.0,
                    birth: 5.0,
                    birth_point: vec![0.0],
                },
                PersistencePair {
                    death: 1.0,
                    birth: 2.5,
                    birth_point: vec![1.0],
                },
            ],
            band: 1.0,
        };
        let kept = diag.significant_pairs();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].birth, 5.0);
    }

    #[test]
    fn grid_validation() {
        assert!(GridFunction::new(vec![vec![0.0, 1.0]], vec![1.0]).is_err());
        assert!(GridFunction::new(vec![vec![0.0, 1.0]], vec![1.0, -1.0]).is_err());
        assert!(GridFunction::new(vec![vec![1.0, 0.0]], vec![1.0, 1.0]).is_err());
        let four_d = DataMatrix::new(vec![0.0; 4], 4).unwrap();
        assert!(grid_axes(&four_d, 1.0, 8).is_err());
    }

    #[test]
    fn grid_density_matches_pointwise_model() {
        let data = DataMatrix::from_rows(&[[0.0, 0.5], [1.0, -0.5], [0.3, 0.2]]).unwrap();
        let axes = grid_axes(&data, 0.6, 7).unwrap();
        let g = kde_on_grid(&data, 0.6, axes).unwrap();
        let model = crate::kde::DensityModel::new(data, 0.6).unwrap();
        for idx in [0, 10, 24, 48] {
            let p = model.density(&g.point(idx)).unwrap();
            assert!((p - g.values()[idx]).abs() <= 1e-14 + 1e-12 * p);
        }
    }

    #[test]
    fn band_single_replicate_and_endpoints() {
        let data = DataMatrix::from_column(&[-1.0, -0.2, 0.1, 0.4, 1.3]).unwrap();
        let axes = grid_axes(&data, 0.5, 32).unwrap();
        let one = bootstrap_band(&data, 0.5, &axes, 0.5, 1, 2).unwrap();
        let base = kde_on_grid(&data, 0.5, axes.clone()).unwrap();
        let mut rng = replicate_rng(2, 0);
        let counts = resample_counts(&mut rng, data.n());
        let star = grid_density(&data, Some(&counts), 0.5, &axes);
        let dev = star
            .iter()
            .zip(base.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert_eq!(one, dev);

        let lo = bootstrap_band(&data, 0.5, &axes, 1.0 - 1e-9, 40, 2).unwrap();
        let hi = bootstrap_band(&data, 0.5, &axes, 0.05, 40, 2).unwrap();
        assert!(lo <= hi);
    }
}
