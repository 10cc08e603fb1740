//! Eigenvalues of symmetric matrices and the elementary symmetric polynomial
//! (ESP) map between sorted eigenvalues and characteristic-polynomial
//! coefficients.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{sym_eigenvalues_raw, SymMatrix};

/// Real eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EigenValues(Vec<f64>);

impl EigenValues {
    /// Sorts `values` descending. Fails on an empty or non-finite input.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("eigenvalues"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("eigenvalues"));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The largest eigenvalue.
    pub fn leading(&self) -> f64 {
        self.0[0]
    }

    /// `gamma = -lambda`, in the same order (so ascending in value).
    pub fn negated(&self) -> Vec<f64> {
        self.0.iter().map(|v| -v).collect()
    }
}

/// `(s_1, ..., s_d)` where `s_k` is the k-th elementary symmetric polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EspVector(Vec<f64>);

impl EspVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("ESP vector"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ESP vector"));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `max_k |s_k - t_k|`.
    pub fn sup_distance(&self, other: &EspVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), sorted descending.
pub fn sym_eigenvalues(a: &SymMatrix) -> Result<EigenValues> {
    EigenValues::new(sym_eigenvalues_raw(a)?)
}

/// Elementary symmetric polynomials of `lambda`, built by multiplying out
/// `prod_i (t + lambda_i)` one factor at a time.
pub fn esp_forward(lambda: &EigenValues) -> EspVector {
    EspVector(esp_of(lambda.as_slice()))
}

pub(crate) fn esp_of(values: &[f64]) -> Vec<f64> {
    let d = values.len();
    // e[k] holds s_k of the factors seen so far; e[0] = 1.
    let mut e = vec![0.0; d + 1];
    e[0] = 1.0;
    for (i, &l) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += l * e[k - 1];
        }
    }
    e.remove(0);
    e
}

/// Complex roots of the monic polynomial `t^d + c[0] t^(d-1) + ... + c[d-1]`,
/// as `(re, im)` pairs, from the eigenvalues of its companion matrix.
pub fn monic_roots(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let d = coeffs.len();
    if d == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        companion[(0, j)] = -coeffs[j];
    }
    for i in 1..d {
        companion[(i, i - 1)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect()
}

fn eval_monic(coeffs: &[f64], t: f64) -> (f64, f64) {
    // Horner for value and derivative.
    let mut p = 1.0;
    let mut dp = 0.0;
    for &c in coeffs {
        dp = dp * t + p;
        p = p * t + c;
    }
    (p, dp)
}

/// Recovers sorted eigenvalues from their ESP vector: the real roots of
/// `prod_i (t - lambda_i) = t^d - s_1 t^(d-1) + s_2 t^(d-2) - ...`.
///
/// Fails with [`Error::NotInImage`] when a root has a non-negligible imaginary
/// part. This is a reference inverse, not used by the bootstrap itself.
pub fn esp_inverse(s: &EspVector) -> Result<EigenValues> {
    let coeffs: Vec<f64> = s
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &sk)| if k % 2 == 0 { -sk } else { sk })
        .collect();
    let roots = monic_roots(&coeffs);
    let scale = 1.0 + roots.iter().map(|(re, im)| re.hypot(*im)).fold(0.0, f64::max);
    let worst_im = roots.iter().map(|(_, im)| im.abs()).fold(0.0, f64::max);
    if worst_im > 1e-6 * scale {
        return Err(Error::NotInImage(worst_im));
    }
    let polished = roots
        .into_iter()
        .map(|(re, _)| {
            // A few guarded Newton steps; only keep a step that shrinks the residual.
            let mut t = re;
            let mut best = eval_monic(&coeffs, t).0.abs();
            for _ in 0..4 {
                let (p, dp) = eval_monic(&coeffs, t);
                if dp == 0.0 || p == 0.0 {
                    break;
                }
                let next = t - p / dp;
                let r = eval_monic(&coeffs, next).0.abs();
                if !(r < best) {
                    break;
                }
                t = next;
                best = r;
            }
            t
        })
        .collect();
    EigenValues::new(polished)
}

/// True iff every eigenvalue behind `s` is strictly negative, read off the
/// signs `(-1)^k s_k > 0`.
pub fn all_negative(s: &EspVector) -> bool {
    s.as_slice().iter().enumerate().all(|(i, &sk)| {
        let k = i + 1;
        if k % 2 == 0 {
            sk > 0.0
        } else {
            -sk > 0.0
        }
    })
}

/// Convenience: ESP vector of the eigenvalues of `a`.
pub fn esp_of_matrix(a: &SymMatrix) -> Result<(EigenValues, EspVector)> {
    let lambda = sym_eigenvalues(a)?;
    let s = esp_forward(&lambda);
    Ok((lambda, s))
}

pub(crate) fn check_level(name: &'static str, value: f64) -> Result<()> {
    if !(value > 0.0 && value < 1.0) {
        return Err(invalid(name, format!("{value} is outside (0, 1)")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[f64]) -> EigenValues {
        EigenValues::new(v.to_vec()).unwrap()
    }

    fn esp(v: &[f64]) -> EspVector {
        EspVector::new(v.to_vec()).unwrap()
    }

    /// Sum over all k-subsets of products, by bitmask enumeration.
    fn brute_force_esp(values: &[f64]) -> Vec<f64> {
        let d = values.len();
        let mut s = vec![0.0; d];
        for mask in 1u32..(1 << d) {
            let k = mask.count_ones() as usize;
            let prod: f64 = (0..d)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| values[i])
                .product();
            s[k - 1] += prod;
        }
        s
    }

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(sym_eigenvalues(&SymMatrix::identity(3)).unwrap(), ev(&[1.0, 1.0, 1.0]));
        let d = SymMatrix::from_diagonal(&[-1.0, -4.0]);
        assert_eq!(sym_eigenvalues(&d).unwrap().as_slice(), &[-1.0, -4.0]);
    }

    #[test]
    fn forward_examples() {
        assert_eq!(esp_forward(&ev(&[-1.0, -2.0])).as_slice(), &[-3.0, 2.0]);
        assert_eq!(esp_forward(&ev(&[0.0, 0.0, 0.0])).as_slice(), &[0.0, 0.0, 0.0]);
        let s = esp_forward(&ev(&[3.0, 1.0, -2.0]));
        assert_eq!(s.as_slice(), brute_force_esp(&[3.0, 1.0, -2.0]).as_slice());
        assert_eq!(s.as_slice(), &[2.0, -5.0, -6.0]);
    }

    #[test]
    fn forward_matches_subset_enumeration() {
        let vals = [0.3, -1.7, 2.25, 0.0, -0.4, 5.5];
        let fast = esp_of(&vals);
        let slow = brute_force_esp(&vals);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn inverse_examples() {
        let l = esp_inverse(&esp(&[-3.0, 2.0])).unwrap();
        assert!((l.as_slice()[0] + 1.0).abs() < 1e-12);
        assert!((l.as_slice()[1] + 2.0).abs() < 1e-12);

        let l = esp_inverse(&esp(&[-2.0, 1.0])).unwrap();
        assert!((l.as_slice()[0] + 1.0).abs() < 1e-7);
        assert!((l.as_slice()[1] + 1.0).abs() < 1e-7);
    }

    #[test]
    fn inverse_rejects_complex_roots() {
        // t^2 + 1
        assert!(matches!(esp_inverse(&esp(&[0.0, 1.0])), Err(Error::NotInImage(_))));
    }

    #[test]
    fn sign_test_examples() {
        assert!(all_negative(&esp(&[-3.0, 2.0])));
        assert!(!all_negative(&esp(&[2.0, -5.0, -6.0])));
        assert!(all_negative(&esp(&[-0.5])));
        assert!(!all_negative(&esp(&[0.0, 0.0])));
    }

    #[test]
    fn triple_root_perturbation_exponent() {
        // (t + 1)^3 with the constant term nudged by eps: roots move by eps^(1/3).
        let base = [3.0, 3.0, 1.0];
        let eps: Vec<f64> = (3..=9).map(|k| 10f64.powi(-k)).collect();
        let shifts: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let c = [base[0], base[1], base[2] + e];
                monic_roots(&c)
                    .iter()
                    .map(|(re, im)| (re + 1.0).hypot(*im))
                    .fold(0.0, f64::max)
            })
            .collect();
        let n = eps.len() as f64;
        let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = shifts.iter().map(|s| s.ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        let target = 1.0 / 3.0;
        assert!(slope > target / 3.0 && slope < target * 3.0, "slope {slope}");
    }

    #[test]
    fn triple_root_real_perturbation_stays_within_cube_root_bound() {
        // Moving inside the image set: lambda = -1 + (t, 0, -t).
        for k in 3..=9 {
            let t = 10f64.powf(-(k as f64) / 2.0);
            let lam = ev(&[-1.0 + t, -1.0, -1.0 - t]);
            let s = esp_forward(&lam);
            let base = esp_forward(&ev(&[-1.0, -1.0, -1.0]));
            let eps = s.sup_distance(&base);
            let moved = (lam.leading() + 1.0).abs();
            assert!(moved <= 3.0 * eps.powf(1.0 / 3.0), "k={k}");
        }
    }
}
