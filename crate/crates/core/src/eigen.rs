//! Cyclic Jacobi eigen-decomposition for small dense symmetric matrices.
//!
//! Rotation order is fixed (row-major sweep over the upper triangle), so the
//! same input bits always produce the same output bits.

use crate::scalar::{lit, Scalar};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (unsorted, in diagonal order) and eigenvectors stored as
/// columns of a row-major `n×n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<T>,
    pub n: usize,
    pub sweeps: usize,
}

impl<T: Scalar> SymmetricEigen<T> {
    /// Component `row` of eigenvector `col`.
    #[inline]
    pub fn vector(&self, row: usize, col: usize) -> T {
        self.vectors[row * self.n + col]
    }
}

/// Diagonalizes the symmetric row-major matrix `a` of size `n×n`. Only the
/// upper triangle is read. Returns `None` if the sweep limit is exhausted.
pub fn symmetric_eigen<T: Scalar>(a: &[T], n: usize) -> Option<SymmetricEigen<T>> {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            m[i * n + j] = m[j * n + i];
        }
    }
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }

    let scale = m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if scale == T::zero() || n < 2 {
        return Some(SymmetricEigen {
            values: (0..n).map(|i| m[i * n + i]).collect(),
            vectors: v,
            n,
            sweeps: 0,
        });
    }
    let tiny = T::epsilon() * T::epsilon() * scale * scale;

    for sweep in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q] * m[p * n + q])
            .sum();
        if off <= tiny {
            return Some(SymmetricEigen {
                values: (0..n).map(|i| m[i * n + i]).collect(),
                vectors: v,
                n,
                sweeps: sweep,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (lit::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                m[p * n + q] = T::zero();
                m[q * n + p] = T::zero();

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &SymmetricEigen<f64>) -> Vec<f64> {
        let n = e.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n).map(|k| e.vector(i, k) * e.values[k] * e.vector(j, k)).sum();
            }
        }
        out
    }

    #[test]
    fn two_by_two_analytic() {
        let e = symmetric_eigen(&[1.0, 2.0, 2.0, 1.0], 2).unwrap();
        let mut vals = e.values.clone();
        vals.sort_by(f64::total_cmp);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn reconstructs_arrowhead() {
        let a = [0.0, 5.4, 1.4, 5.4, 0.3, 0.0, 1.4, 0.0, -2.0];
        let e = symmetric_eigen(&a, 3).unwrap();
        let r = reconstruct(&e);
        for (x, y) in r.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-13, "{r:?}");
        }
        // orthonormal columns
        for p in 0..3 {
            for q in 0..3 {
                let dot: f64 = (0..3).map(|k| e.vector(k, p) * e.vector(k, q)).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn diagonal_input_is_returned_untouched() {
        let e = symmetric_eigen(&[3.0, 0.0, 0.0, -1.0], 2).unwrap();
        assert_eq!(e.values, vec![3.0, -1.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn deterministic_bits() {
        let a = [1.5, 0.25, -0.75, 0.25, 2.0, 0.125, -0.75, 0.125, -3.0];
        assert_eq!(symmetric_eigen(&a, 3), symmetric_eigen(&a, 3));
    }

    #[test]
    fn works_in_f32() {
        let e = symmetric_eigen(&[1.0_f32, 2.0, 2.0, 1.0], 2).unwrap();
        let sum: f32 = e.values.iter().sum();
        assert!((sum - 2.0).abs() < 1e-6);
    }
}
