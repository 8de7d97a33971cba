//! Small dense complex matrices (the quantization matrices are K x K with K ~ 3).

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::error::{NumericsError, Result};
use crate::real::{c, Real};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![c(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(c(T::zero(), T::zero()), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).fold(c(T::zero(), T::zero()), |acc, k| acc + self[(i, k)] * other[(k, j)]))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].norm().partial_cmp(&a[(j, col)].norm()).unwrap())
                .unwrap();
            if a[(pivot, col)].norm() <= T::epsilon() * scale * T::lit(16.0) {
                return Err(NumericsError::Singular);
            }
            if pivot != col {
                for k in 0..n {
                    a.data.swap(pivot * n + k, col * n + k);
                    inv.data.swap(pivot * n + k, col * n + k);
                }
            }
            let p = a[(col, col)];
            for k in 0..n {
                a[(col, k)] = a[(col, k)] / p;
                inv[(col, k)] = inv[(col, k)] / p;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a[(row, col)];
                if factor.norm() == T::zero() {
                    continue;
                }
                for k in 0..n {
                    let ak = a[(col, k)];
                    let ik = inv[(col, k)];
                    a[(row, k)] -= factor * ak;
                    inv[(row, k)] -= factor * ik;
                }
            }
        }
        Ok(inv)
    }

    /// Spectral norm, from power iteration on `A^H A`.
    pub fn operator_norm(&self) -> T {
        let n = self.n;
        let gram = self.adjoint().matmul(self);
        let mut v: Vec<Complex<T>> = (0..n).map(|i| c(T::one() + T::lit(0.1) * T::from_usize_lossy(i), T::zero())).collect();
        let mut lambda = T::zero();
        for _ in 0..500 {
            let w: Vec<Complex<T>> = (0..n)
                .map(|i| (0..n).fold(c(T::zero(), T::zero()), |acc, k| acc + gram[(i, k)] * v[k]))
                .collect();
            let norm = w.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr()).sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            let next = norm;
            v = w.into_iter().map(|x| x / norm).collect();
            if (next - lambda).abs() <= T::lit(1e-15) * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    /// Largest `|a_ij a_kl - a_il a_kj| / (|a_ij a_kl| + |a_il a_kj|)` over all 2x2 minors.
    pub fn max_relative_minor(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for k in (i + 1)..n {
                for j in 0..n {
                    for l in (j + 1)..n {
                        let p = self[(i, j)] * self[(k, l)];
                        let q = self[(i, l)] * self[(k, j)];
                        let denom = p.norm() + q.norm();
                        if denom > T::zero() {
                            worst = worst.max((p - q).norm() / denom);
                        }
                    }
                }
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}
