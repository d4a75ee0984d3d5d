use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::Real;

/// A general (not necessarily symmetric) 3×3 real matrix, stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matrix3<T>(pub [[T; 3]; 3]);

impl<T: Real> Default for Matrix3<T> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real> Matrix3<T> {
    pub fn zeros() -> Self {
        Self(linalg::zeros())
    }

    pub fn identity() -> Self {
        Self(linalg::identity())
    }

    pub fn from_diagonal(d: [T; 3]) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    /// Elementary matrix with a single unit entry at `(i, j)` (zero based).
    pub fn elementary(i: usize, j: usize) -> Self {
        let mut m = Self::zeros();
        m.0[i][j] = T::one();
        m
    }

    /// Converts to `f64` entries.
    pub fn to_f64(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.0[i][j].as_f64())
    }

    pub fn from_f64(m: &Matrix3<f64>) -> Self {
        Self::from_fn(|i, j| T::lit(m.0[i][j]))
    }

    pub fn transpose(&self) -> Self {
        Self(linalg::transpose(&self.0))
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn determinant(&self) -> T {
        linalg::determinant(&self.0)
    }

    pub fn inverse(&self) -> Option<Self> {
        linalg::inverse(&self.0).map(Self)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn frobenius(&self) -> T {
        linalg::frobenius(&self.0)
    }

    pub fn max_abs(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Frobenius inner product `A:B`.
    pub fn ddot(&self, other: &Self) -> T {
        (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| self.0[i][j] * other.0[i][j])
            .sum()
    }

    pub fn symmetric_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(|i, j| half * (self.0[i][j] + self.0[j][i]))
    }

    /// `‖A − Aᵀ‖ / ‖A‖` (zero for the zero matrix).
    pub fn asymmetry(&self) -> T {
        let n = self.frobenius();
        if n == T::zero() {
            return T::zero();
        }
        (*self - self.transpose()).frobenius() / n
    }

    pub fn matvec(&self, v: &[T; 3]) -> [T; 3] {
        linalg::matvec(&self.0, v)
    }

    /// Eigenvalues (descending) and eigenvectors (as columns) of the symmetric part.
    pub fn symmetric_eigen(&self) -> ([T; 3], Self) {
        let (w, v) = linalg::sym_eigen(&self.0);
        (w, Self(v))
    }

    /// 2-norm condition number of a general matrix, via the eigenvalues of `AᵀA`.
    pub fn condition_number(&self) -> T {
        let (w, _) = (self.transpose() * *self).symmetric_eigen();
        if w[2] <= T::zero() {
            return T::infinity();
        }
        (w[0] / w[2]).sqrt()
    }

    pub fn diagonal(&self) -> [T; 3] {
        [self.0[0][0], self.0[1][1], self.0[2][2]]
    }
}

impl<T> Index<(usize, usize)> for Matrix3<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Matrix3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Real> AddAssign for Matrix3<T> {
    fn add_assign(&mut self, rhs: Self) {
        for i in 0..3 {
            for j in 0..3 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl<T: Real> Sub for Matrix3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Real> Neg for Matrix3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Matrix3<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(linalg::matmul(&self.0, &rhs.0))
    }
}
