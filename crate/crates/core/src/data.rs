use crate::error::{invalid, Error, Result};

/// An `n x d` point cloud stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl DataMatrix {
    /// Builds a matrix from a flat row-major buffer.
    pub fn new(values: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "dimension must be at least 1"));
        }
        if values.is_empty() {
            return Err(Error::Empty("data matrix"));
        }
        if !values.len().is_multiple_of(d) {
            return Err(invalid(
                "values",
                format!("length {} is not a multiple of d = {d}", values.len()),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data matrix"));
        }
        let n = values.len() / d;
        Ok(Self { values, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("data matrix"))?;
        let d = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(values, d)
    }

    /// One-dimensional sample.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec(), 1)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self::new(values, self.d)
    }

    /// Per-column sample standard deviation (denominator `n - 1`, zero when `n = 1`).
    pub fn column_std(&self) -> Vec<f64> {
        let n = self.n as f64;
        (0..self.d)
            .map(|j| {
                if self.n < 2 {
                    return 0.0;
                }
                let mean = self.rows().map(|r| r[j]).sum::<f64>() / n;
                let ss = self.rows().map(|r| (r[j] - mean).powi(2)).sum::<f64>();
                (ss / (n - 1.0)).sqrt()
            })
            .collect()
    }

    /// Per-column `(min, max)`.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        (0..self.d)
            .map(|j| {
                self.rows().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                })
            })
            .collect()
    }
}

pub(crate) fn check_point(x: &[f64], d: usize) -> Result<()> {
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("query point"));
    }
    Ok(())
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_rows() {
        let rows = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            DataMatrix::from_rows(&rows),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(DataMatrix::new(vec![1.0, f64::NAN], 1).is_err());
        assert!(DataMatrix::new(vec![], 1).is_err());
        assert!(DataMatrix::new(vec![1.0], 0).is_err());
    }

    #[test]
    fn select_and_stats() {
        let m = DataMatrix::from_rows(&[[0.0, 10.0], [2.0, 10.0], [4.0, 10.0]]).unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.d(), 2);
        let s = m.select(&[2, 0]).unwrap();
        assert_eq!(s.row(0), &[4.0, 10.0]);
        assert_eq!(m.column_std(), vec![2.0, 0.0]);
        assert_eq!(m.bounds(), vec![(0.0, 4.0), (10.0, 10.0)]);
    }
}
