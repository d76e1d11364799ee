// Copyright 2026 The fermicon Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense row-major matrices over a [`Ring`], with a generic matrix exponential.

use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::error::{Error, Result};
use crate::ring::Ring;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Ring>(&self, f: impl FnMut(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex<T::Real>) -> Self {
        self.map(|x| x.scale(c))
    }

    /// Largest entry norm.
    pub fn max_norm(&self) -> T::Real {
        self.data.iter().fold(T::Real::zero(), |acc, x| acc.max(x.norm1()))
    }

    /// Induced ∞-norm with entry norms taken in the ring.
    pub fn inf_norm(&self) -> T::Real {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::Real::zero(), |acc, j| acc + self.get(i, j).norm1()))
            .fold(T::Real::zero(), |a, b| a.max(b))
    }

    pub fn max_deviation(&self, other: &Self) -> Result<T::Real> {
        Ok(self.try_sub(other)?.max_norm())
    }

    /// `exp(scale · self)` by scaling and squaring with a Taylor core.
    ///
    /// The ring norm is submultiplicative, so after scaling to ∞-norm ≤ 1/2 the
    /// Taylor remainder is bounded by the first omitted term.
    pub fn expm(&self, scale: Complex<T::Real>) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("exponential of a non-square matrix".into()));
        }
        let a = self.scale(scale);
        let norm = a.inf_norm();
        if !norm.is_finite() || a.data.iter().any(|x| !x.norm1().is_finite()) {
            return Err(Error::NonFinite);
        }
        let half = T::Real::lit(0.5);
        let mut squarings = 0i32;
        let mut s = T::Real::one();
        while norm * s > half {
            s *= half;
            squarings += 1;
        }
        let a = a.scale(Complex::new(s, T::Real::zero()));
        let eps = T::Real::epsilon() * T::Real::lit(0.25);
        let n = self.rows;
        let mut sum = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=60 {
            let inv_k = T::Real::one() / T::Real::lit(k as f64);
            term = term.try_mul(&a)?.scale(Complex::new(inv_k, T::Real::zero()));
            sum = sum.try_add(&term)?;
            if term.inf_norm() <= eps {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum.try_mul(&sum)?;
        }
        Ok(sum)
    }
}

impl<F: Real> DenseMatrix<Complex<F>> {
    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols)
        })
    }

    pub fn trace(&self) -> Complex<F> {
        (0..self.rows.min(self.cols)).fold(Complex::new(F::zero(), F::zero()), |acc, i| acc + self.get(i, i))
    }

    pub fn diagonal(values: &[Complex<F>]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                values[i]
            } else {
                Complex::new(F::zero(), F::zero())
            }
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Frobenius inner product `tr(self† · other)`.
    pub fn frobenius_dot(&self, other: &Self) -> Complex<F> {
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::new(F::zero(), F::zero()), |acc, (a, b)| acc + a.conj() * b)
    }
}
