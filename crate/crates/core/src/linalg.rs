//! Small dense symmetric matrices and a cyclic Jacobi eigensolver.

use crate::error::{invalid, Error, Result};

/// Largest dimension accepted by the Jacobi solver.
pub const MAX_JACOBI_DIM: usize = 32;

/// Dense `d x d` matrix, row-major. Symmetry is checked by the eigensolver,
/// not enforced by the type.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    d: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            data: vec![0.0; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for i in 0..d {
            m.data[i * d + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *v;
        }
        m
    }

    pub fn from_row_major(d: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != d * d {
            return Err(invalid("data", format!("expected {} entries", d * d)));
        }
        Ok(Self { d, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.len();
        let mut data = Vec::with_capacity(d * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { d, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.d + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Replaces the matrix with `(A + A^T) / 2`.
    pub fn symmetrize(&mut self) {
        let d = self.d;
        for i in 0..d {
            for j in (i + 1)..d {
                let v = 0.5 * (self.data[i * d + j] + self.data[j * d + i]);
                self.data[i * d + j] = v;
                self.data[j * d + i] = v;
            }
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let d = self.d;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_exactly_symmetric(&self) -> bool {
        let d = self.d;
        (0..d).all(|i| (i + 1..d).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Eigenvalues (descending) and matching unit eigenvectors, stored as columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Row-major `d x d`; column `k` is the eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
}

impl SymEigen {
    /// `|| A - Q diag(values) Q^T ||_F`.
    pub fn reconstruction_residual(&self, a: &SymMatrix) -> f64 {
        let d = a.dim();
        let mut ss = 0.0;
        for i in 0..d {
            for j in 0..d {
                let qlq: f64 = (0..d)
                    .map(|k| self.vectors[i * d + k] * self.values[k] * self.vectors[j * d + k])
                    .sum();
                ss += (a.get(i, j) - qlq).powi(2);
            }
        }
        ss.sqrt()
    }
}

fn check_symmetric(a: &SymMatrix) -> Result<()> {
    if a.dim() == 0 {
        return Err(invalid("matrix", "dimension must be at least 1"));
    }
    if a.dim() > MAX_JACOBI_DIM {
        return Err(invalid(
            "matrix",
            format!("dimension {} exceeds {MAX_JACOBI_DIM}", a.dim()),
        ));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix"));
    }
    let asym = a.max_asymmetry();
    if asym > 1e-10 * (1.0 + a.frobenius_norm()) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Cyclic Jacobi sweeps until the off-diagonal mass is negligible.
fn jacobi(a: &SymMatrix, want_vectors: bool) -> Result<SymEigen> {
    check_symmetric(a)?;
    let d = a.dim();
    let mut m = a.clone();
    m.symmetrize();
    let mut v = if want_vectors {
        SymMatrix::identity(d).data
    } else {
        Vec::new()
    };
    let scale = m.frobenius_norm();
    if scale > 0.0 {
        for _sweep in 0..64 {
            let off: f64 = (0..d)
                .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
                .map(|(i, j)| m.get(i, j).powi(2))
                .sum();
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    let apq = m.get(p, q);
                    if apq == 0.0 {
                        continue;
                    }
                    let app = m.get(p, p);
                    let aqq = m.get(q, q);
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let md = m.as_mut_slice();
                    for k in 0..d {
                        let akp = md[k * d + p];
                        let akq = md[k * d + q];
                        md[k * d + p] = c * akp - s * akq;
                        md[k * d + q] = s * akp + c * akq;
                    }
                    for k in 0..d {
                        let apk = md[p * d + k];
                        let aqk = md[q * d + k];
                        md[p * d + k] = c * apk - s * aqk;
                        md[q * d + k] = s * apk + c * aqk;
                    }
                    md[p * d + q] = 0.0;
                    md[q * d + p] = 0.0;
                    if want_vectors {
                        for k in 0..d {
                            let vkp = v[k * d + p];
                            let vkq = v[k * d + q];
                            v[k * d + p] = c * vkp - s * vkq;
                            v[k * d + q] = s * vkp + c * vkq;
                        }
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let vectors = if want_vectors {
        let mut sorted = vec![0.0; d * d];
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..d {
                sorted[r * d + new_col] = v[r * d + old_col];
            }
        }
        sorted
    } else {
        Vec::new()
    };
    Ok(SymEigen { values, vectors })
}

/// Eigenvalues of a symmetric matrix, sorted descending.
pub fn sym_eigenvalues_raw(a: &SymMatrix) -> Result<Vec<f64>> {
    jacobi(a, false).map(|e| e.values)
}

/// Full eigendecomposition of a symmetric matrix.
pub fn sym_eigen(a: &SymMatrix) -> Result<SymEigen> {
    jacobi(a, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_two_by_two() {
        let id = SymMatrix::identity(3);
        assert_eq!(sym_eigenvalues_raw(&id).unwrap(), vec![1.0, 1.0, 1.0]);
        let dg = SymMatrix::from_diagonal(&[-4.0, -1.0]);
        assert_eq!(sym_eigenvalues_raw(&dg).unwrap(), vec![-1.0, -4.0]);
        let a = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let ev = sym_eigenvalues_raw(&a).unwrap();
        assert!((ev[0] - 3.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetric() {
        let a = SymMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigenvalues_raw(&a), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn rejects_oversized() {
        assert!(sym_eigenvalues_raw(&SymMatrix::identity(MAX_JACOBI_DIM + 1)).is_err());
    }

    #[test]
    fn reconstruction_residual_small() {
        let a = SymMatrix::from_rows(&[
            [4.0, 1.0, -2.0, 0.5],
            [1.0, 3.0, 0.0, 1.5],
            [-2.0, 0.0, -1.0, 2.0],
            [0.5, 1.5, 2.0, 0.0],
        ])
        .unwrap();
        let e = sym_eigen(&a).unwrap();
        assert!(e.reconstruction_residual(&a) <= 1e-8 * a.frobenius_norm());
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(sym_eigenvalues_raw(&SymMatrix::zeros(2)).unwrap(), vec![0.0, 0.0]);
    }
}
