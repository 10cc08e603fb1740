//! Gaussian kernel density estimate with analytic gradient and Hessian.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{check_point, DataMatrix};
use crate::error::{invalid, Result};
use crate::linalg::SymMatrix;

/// Radial kernel profile. Only the Gaussian ships.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    #[default]
    Gaussian,
}

impl Kernel {
    /// Unnormalized profile `k(r^2)` for a squared scaled radius.
    #[inline]
    pub fn profile(self, r2: f64) -> f64 {
        match self {
            Kernel::Gaussian => (-0.5 * r2).exp(),
        }
    }

    /// Constant making `c * profile(|u|^2)` integrate to one over R^d.
    pub fn normalizer(self, d: usize) -> f64 {
        match self {
            Kernel::Gaussian => (2.0 * PI).powf(-(d as f64) / 2.0),
        }
    }
}

/// A kernel density estimate `p(x) = 1/n sum_i h^-d K((x - X_i) / h)`.
#[derive(Debug, Clone)]
pub struct DensityModel {
    data: DataMatrix,
    bandwidth: f64,
    kernel: Kernel,
}

/// Density, gradient and Hessian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianEval {
    pub point: Vec<f64>,
    pub density: f64,
    pub gradient: Vec<f64>,
    pub hessian: SymMatrix,
}

impl DensityModel {
    pub fn new(data: DataMatrix, bandwidth: f64) -> Result<Self> {
        check_bandwidth(bandwidth)?;
        Ok(Self {
            data,
            bandwidth,
            kernel: Kernel::Gaussian,
        })
    }

    pub fn data(&self) -> &DataMatrix {
        &self.data
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn dim(&self) -> usize {
        self.data.d()
    }

    fn scale(&self) -> f64 {
        let d = self.data.d();
        self.kernel.normalizer(d) / self.bandwidth.powi(d as i32)
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        check_point(x, self.dim())?;
        let inv_h2 = 1.0 / (self.bandwidth * self.bandwidth);
        let sum: f64 = self
            .data
            .rows()
            .map(|xi| self.kernel.profile(sq_dist(x, xi) * inv_h2))
            .sum();
        Ok(self.scale() * sum / self.data.n() as f64)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_point(x, self.dim())?;
        let d = self.dim();
        let inv_h2 = 1.0 / (self.bandwidth * self.bandwidth);
        let mut g = vec![0.0; d];
        for xi in self.data.rows() {
            let w = self.kernel.profile(sq_dist(x, xi) * inv_h2);
            for (gj, (a, b)) in g.iter_mut().zip(x.iter().zip(xi)) {
                *gj -= w * (a - b);
            }
        }
        let c = self.scale() * inv_h2 / self.data.n() as f64;
        g.iter_mut().for_each(|v| *v *= c);
        Ok(g)
    }

    /// Analytic Hessian, symmetrized after accumulation.
    pub fn hessian(&self, x: &[f64]) -> Result<HessianEval> {
        check_point(x, self.dim())?;
        Ok(weighted_hessian(
            &self.data,
            self.bandwidth,
            x,
            self.data.rows().map(|_| 1.0),
            self.data.n() as f64,
        ))
    }

    /// Densities at every row of `points`, evaluated in parallel.
    pub fn density_many(&self, points: &DataMatrix) -> Result<Vec<f64>> {
        check_point(points.row(0), self.dim())?;
        (0..points.n())
            .into_par_iter()
            .map(|i| self.density(points.row(i)))
            .collect()
    }
}

pub(crate) fn check_bandwidth(h: f64) -> Result<()> {
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("bandwidth", format!("{h} is not a positive finite number")));
    }
    Ok(())
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    crate::data::squared_distance(a, b)
}

/// Hessian of the kernel estimate with per-row weights `w_i`, divided by
/// `total`. Equal weights `1` and `total = n` give the plain estimate; bootstrap
/// resample counts give the resampled estimate without copying rows.
pub(crate) fn weighted_hessian(
    data: &DataMatrix,
    h: f64,
    x: &[f64],
    weights: impl Iterator<Item = f64>,
    total: f64,
) -> HessianEval {
    let d = data.d();
    let inv_h2 = 1.0 / (h * h);
    let mut density = 0.0;
    let mut grad = vec![0.0; d];
    // Upper triangle of sum_i w_i k_i u_i u_i^T, u = x - X_i.
    let mut outer = vec![0.0; d * d];
    let mut diff = vec![0.0; d];
    for (xi, wi) in data.rows().zip(weights) {
        if wi == 0.0 {
            continue;
        }
        let mut r2 = 0.0;
        for j in 0..d {
            diff[j] = x[j] - xi[j];
            r2 += diff[j] * diff[j];
        }
        let k = wi * Kernel::Gaussian.profile(r2 * inv_h2);
        if k == 0.0 {
            continue;
        }
        density += k;
        for a in 0..d {
            let ka = k * diff[a];
            grad[a] -= ka;
            let row = &mut outer[a * d..(a + 1) * d];
            for b in a..d {
                row[b] += ka * diff[b];
            }
        }
    }
    let c = Kernel::Gaussian.normalizer(d) / h.powi(d as i32) / total;
    let mut hess = SymMatrix::zeros(d);
    for a in 0..d {
        for b in a..d {
            let mut v = outer[a * d + b] * inv_h2 * inv_h2;
            if a == b {
                v -= density * inv_h2;
            }
            v *= c;
            hess.set(a, b, v);
            hess.set(b, a, v);
        }
    }
    hess.symmetrize();
    HessianEval {
        point: x.to_vec(),
        density: c * density,
        gradient: grad.into_iter().map(|g| g * c * inv_h2).collect(),
        hessian: hess,
    }
}
