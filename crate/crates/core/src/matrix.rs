//! Small dense square matrices.
//!
//! Maps in this domain have tens of factors at most, so a row-major `Vec`
//! is all the linear algebra we need.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![S::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    /// Builds from rows; panics on ragged input.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix rows must be square");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<S>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == S::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&mut self, s: S) {
        for a in &mut self.data {
            *a *= s;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == S::zero())
    }

    pub fn max_abs(&self) -> S {
        crate::scalar::max_abs(&self.data)
    }

    /// Spectral norm `‖A‖₂ = sqrt(λ_max(AᵀA))`.
    pub fn norm2(&self) -> S {
        if self.n == 0 {
            return S::zero();
        }
        // Pre-scale so AᵀA neither overflows nor underflows.
        let scale = self.max_abs();
        if scale == S::zero() {
            return S::zero();
        }
        let mut a = self.clone();
        a.scale(S::one() / scale);
        let gram = a.transpose().mul(&a);
        let top = symmetric_eigenvalues(&gram)
            .into_iter()
            .fold(S::zero(), |m, l| m.max(l));
        top.max(S::zero()).sqrt() * scale
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.n + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<S: Scalar>(m: &Matrix<S>) -> Vec<S> {
    let n = m.dim();
    let mut a = m.clone();
    let eps = S::epsilon();
    for _sweep in 0..100 {
        let mut off = S::zero();
        let mut total = S::zero();
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)] * a[(i, j)];
                total += v;
                if i != j {
                    off += v;
                }
            }
        }
        if off <= eps * eps * total || off == S::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == S::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (S::lit(2.0) * apq);
                let t = sign_nonzero(theta) / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

#[inline]
fn sign_nonzero<S: Scalar>(x: S) -> S {
    if x < S::zero() {
        -S::one()
    } else {
        S::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm2_of_diagonal_is_largest_magnitude() {
        let m = Matrix::from_rows(&[vec![0.5, 0.0], vec![0.0, -3.0]]);
        assert!((m.norm2() - 3.0f64).abs() < 1e-14);
    }

    #[test]
    fn norm2_of_rank_one() {
        // u vᵀ has norm |u||v|
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let expected = 5.0f64.sqrt() * 5.0f64.sqrt();
        assert!((m.norm2() - expected).abs() < 1e-12);
    }

    #[test]
    fn norm2_of_nilpotent_shift() {
        let m = Matrix::from_rows(&[vec![0.0, 0.7], vec![0.0, 0.0]]);
        assert!((m.norm2() - 0.7f64).abs() < 1e-14);
    }

    #[test]
    fn jacobi_eigenvalues_3x3() {
        let m = Matrix::from_rows(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ]);
        let mut ev = symmetric_eigenvalues(&m);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let s = 2.0f64.sqrt();
        for (got, want) in ev.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn mul_vec_matches_mul() {
        let a = Matrix::from_rows(&[vec![1.0f32, 2.0], vec![3.0, 4.0]]);
        let v = a.mul_vec(&[1.0, -1.0]);
        assert_eq!(v, vec![-1.0, -1.0]);
        assert_eq!(a.mul(&Matrix::identity(2)), a);
    }
}
