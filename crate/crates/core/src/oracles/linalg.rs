//! Dense Gaussian elimination over `f64` or exact rationals.

use std::ops::Neg;

use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Clone + Neg<Output = Self> {
    /// Size used to choose pivots; only zero-ness matters for exact types.
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for BigRational {
    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.abs().to_f64().unwrap_or(f64::MAX).max(f64::MIN_POSITIVE)
        }
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    pub size: usize,
    pub data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(size: usize) -> Self {
        Self {
            size,
            data: vec![T::zero(); size * size],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.size + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.size + c] = v;
    }

    fn pivot_row(&self, col: usize) -> Option<usize> {
        let mut best = None;
        let mut best_mag = 0.0;
        for r in col..self.size {
            let m = self.get(r, col).magnitude();
            if m > best_mag {
                best_mag = m;
                best = Some(r);
            }
        }
        best
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.size {
                self.data.swap(a * self.size + c, b * self.size + c);
            }
        }
    }

    /// Determinant by partial-pivot elimination; consumes the matrix.
    pub fn determinant(mut self) -> T {
        let n = self.size;
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = self.pivot_row(col) else {
                return T::zero();
            };
            if p != col {
                self.swap_rows(p, col);
                det = -det;
            }
            let pivot = self.get(col, col).clone();
            det = det * pivot.clone();
            for r in col + 1..n {
                let f = self.get(r, col).clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = self.get(r, c).clone() - f.clone() * self.get(col, c).clone();
                    self.set(r, c, v);
                }
            }
        }
        det
    }

    /// Solves `self x = rhs`; `None` if singular.
    pub fn solve(mut self, mut rhs: Vec<T>) -> Option<Vec<T>> {
        let n = self.size;
        assert_eq!(rhs.len(), n);
        for col in 0..n {
            let p = self.pivot_row(col)?;
            self.swap_rows(p, col);
            rhs.swap(p, col);
            let pivot = self.get(col, col).clone();
            for r in col + 1..n {
                let f = self.get(r, col).clone() / pivot.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = self.get(r, c).clone() - f.clone() * self.get(col, c).clone();
                    self.set(r, c, v);
                }
                rhs[r] = rhs[r].clone() - f * rhs[col].clone();
            }
        }
        let mut x = vec![T::zero(); n];
        for r in (0..n).rev() {
            let mut acc = rhs[r].clone();
            for c in r + 1..n {
                acc = acc - self.get(r, c).clone() * x[c].clone();
            }
            x[r] = acc / self.get(r, r).clone();
        }
        Some(x)
    }
}
