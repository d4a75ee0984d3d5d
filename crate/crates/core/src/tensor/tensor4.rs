use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use super::Matrix3;
use crate::linalg::{self, Square};
use crate::Real;

/// Position of matrix entry `(i, j)` (zero based) in the standard 9-vector
/// ordering: the first index runs fastest, i.e. columns are stacked.
#[inline]
pub const fn vec_index(i: usize, j: usize) -> usize {
    i + 3 * j
}

/// Standard 9-vector slot stored at each position of the block ordering.
///
/// Block order: the diagonal triple (1,1),(2,2),(3,3), then the conjugate
/// pairs (2,1),(1,2) / (3,1),(1,3) / (3,2),(2,3).
pub const BLOCK_ORDER: [usize; 9] = [0, 4, 8, 1, 3, 2, 6, 5, 7];

/// Which ordering the rows and columns of a [`Tensor4`] follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Standard,
    Permuted,
}

/// Direction of a basis permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermuteDirection {
    ToPermuted,
    ToStandard,
}

/// A fourth-order tensor acting on 3×3 matrices, stored as a 9×9 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "Tensor4Repr<T>",
    try_from = "Tensor4Repr<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub struct Tensor4<T> {
    entries: Square<T, 9>,
    basis: Basis,
}

/// Wire form: row-major 81 values plus the basis tag.
#[derive(Serialize, Deserialize)]
struct Tensor4Repr<T> {
    basis: Basis,
    entries: Vec<T>,
}

impl<T: Real> From<Tensor4<T>> for Tensor4Repr<T> {
    fn from(t: Tensor4<T>) -> Self {
        Self {
            basis: t.basis,
            entries: t.entries.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }
}

impl<T: Real> TryFrom<Tensor4Repr<T>> for Tensor4<T> {
    type Error = String;
    fn try_from(r: Tensor4Repr<T>) -> Result<Self, String> {
        if r.entries.len() != 81 {
            return Err(format!("expected 81 tensor entries, got {}", r.entries.len()));
        }
        let mut entries = linalg::zeros::<T, 9>();
        for (k, v) in r.entries.into_iter().enumerate() {
            entries[k / 9][k % 9] = v;
        }
        Ok(Self { entries, basis: r.basis })
    }
}

impl<T: Real> Tensor4<T> {
    pub fn zeros() -> Self {
        Self::from_matrix(linalg::zeros())
    }

    /// The identity tensor (maps every matrix to itself).
    pub fn identity() -> Self {
        Self::from_matrix(linalg::identity())
    }

    /// Wraps a 9×9 matrix given in the standard basis.
    pub fn from_matrix(entries: Square<T, 9>) -> Self {
        Self {
            entries,
            basis: Basis::Standard,
        }
    }

    /// Wraps a 9×9 matrix given in the block (permuted) basis.
    pub fn from_permuted_matrix(entries: Square<T, 9>) -> Self {
        Self {
            entries,
            basis: Basis::Permuted,
        }
    }

    /// Builds a standard-basis tensor from its components `X_{ijkl}`.
    pub fn from_components(mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Self {
        let mut e = linalg::zeros::<T, 9>();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        e[vec_index(i, j)][vec_index(k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        Self::from_matrix(e)
    }

    /// The block-diagonal tensor `diag(A, A, A)`, i.e. `P ↦ A P`.
    pub fn left_multiplication(a: &Matrix3<T>) -> Self {
        Self::from_components(|i, j, k, l| if j == l { a[(i, k)] } else { T::zero() })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Raw 9×9 entries in the current basis.
    pub fn matrix(&self) -> &Square<T, 9> {
        &self.entries
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let s = vec_index(i, j);
        match self.basis {
            Basis::Standard => s,
            Basis::Permuted => BLOCK_ORDER.iter().position(|&b| b == s).unwrap(),
        }
    }

    /// Component `X_{ijkl}` (zero based), independent of the storage basis.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.entries[self.slot(i, j)][self.slot(k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: T) {
        let (p, q) = (self.slot(i, j), self.slot(k, l));
        self.entries[p][q] = v;
    }

    /// Conjugation by the block permutation.
    pub fn permute_basis(&self, direction: PermuteDirection) -> Self {
        let target = match direction {
            PermuteDirection::ToPermuted => Basis::Permuted,
            PermuteDirection::ToStandard => Basis::Standard,
        };
        if self.basis == target {
            return *self;
        }
        let mut e = linalg::zeros::<T, 9>();
        for p in 0..9 {
            for q in 0..9 {
                match target {
                    Basis::Permuted => e[p][q] = self.entries[BLOCK_ORDER[p]][BLOCK_ORDER[q]],
                    Basis::Standard => e[BLOCK_ORDER[p]][BLOCK_ORDER[q]] = self.entries[p][q],
                }
            }
        }
        Self {
            entries: e,
            basis: target,
        }
    }

    pub fn to_standard(&self) -> Self {
        self.permute_basis(PermuteDirection::ToStandard)
    }

    pub fn to_permuted(&self) -> Self {
        self.permute_basis(PermuteDirection::ToPermuted)
    }

    /// Applies the tensor to a matrix: `(X P)_{ij} = X_{ijkl} P_{kl}`.
    pub fn apply(&self, p: &Matrix3<T>) -> Matrix3<T> {
        let s = self.to_standard();
        let v = s.entries;
        let pv = mat_to_vec(p);
        vec_to_mat(&linalg::matvec(&v, &pv))
    }

    /// Quadratic form `P : X P`.
    pub fn quadratic(&self, p: &Matrix3<T>) -> T {
        p.ddot(&self.apply(p))
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self {
            entries: linalg::transpose(&self.entries),
            basis: self.basis,
        }
    }

    /// `max |X_pq − X_qp|`.
    pub fn max_asymmetry(&self) -> T {
        let mut m = T::zero();
        for p in 0..9 {
            for q in 0..9 {
                m = m.max((self.entries[p][q] - self.entries[q][p]).abs());
            }
        }
        m
    }

    pub fn symmetrize(&self) -> Self {
        let half = T::lit(0.5);
        let mut out = *self;
        for p in 0..9 {
            for q in 0..9 {
                out.entries[p][q] = half * (self.entries[p][q] + self.entries[q][p]);
            }
        }
        out
    }

    pub fn frobenius(&self) -> T {
        linalg::frobenius(&self.entries)
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .flat_map(|r| r.iter())
            .fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest entrywise difference, comparing in the standard basis.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.to_standard() - other.to_standard()).max_abs()
    }

    /// Eigenvalues of the symmetric part, descending.
    pub fn eigenvalues(&self) -> [T; 9] {
        linalg::sym_eigen(&self.entries).0
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[8]
    }

    pub fn determinant(&self) -> T {
        linalg::determinant(&self.entries)
    }

    pub fn inverse(&self) -> Option<Self> {
        linalg::inverse(&self.entries).map(|entries| Self {
            entries,
            basis: self.basis,
        })
    }

    /// Rotated tensor `Y_{abcd} = R_{ia} R_{jb} R_{kc} R_{ld} X_{ijkl}`.
    ///
    /// This is how a measured tensor transforms when the body is rotated by
    /// `Rᵀ` and the data are replaced by `V⁰(R y)`.
    pub fn rotate(&self, r: &Matrix3<T>) -> Self {
        let x = self.to_standard();
        let rr = |a: usize, b: usize, i: usize, j: usize| r[(i, a)] * r[(j, b)];
        let mut half = linalg::zeros::<T, 9>();
        // contract the first index pair, then the second
        for a in 0..3 {
            for b in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut s = T::zero();
                        for i in 0..3 {
                            for j in 0..3 {
                                s += rr(a, b, i, j) * x.entries[vec_index(i, j)][vec_index(k, l)];
                            }
                        }
                        half[vec_index(a, b)][vec_index(k, l)] = s;
                    }
                }
            }
        }
        let mut out = linalg::zeros::<T, 9>();
        for p in 0..9 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut s = T::zero();
                    for k in 0..3 {
                        for l in 0..3 {
                            s += rr(c, d, k, l) * half[p][vec_index(k, l)];
                        }
                    }
                    out[p][vec_index(c, d)] = s;
                }
            }
        }
        Self::from_matrix(out)
    }

    pub fn to_f64(&self) -> Tensor4<f64> {
        let mut e = [[0.0; 9]; 9];
        for p in 0..9 {
            for q in 0..9 {
                e[p][q] = self.entries[p][q].as_f64();
            }
        }
        Tensor4 {
            entries: e,
            basis: self.basis,
        }
    }
}

impl<T: Real> Add for Tensor4<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let rhs = rhs.permute_basis(match self.basis {
            Basis::Standard => PermuteDirection::ToStandard,
            Basis::Permuted => PermuteDirection::ToPermuted,
        });
        let mut out = self;
        for p in 0..9 {
            for q in 0..9 {
                out.entries[p][q] += rhs.entries[p][q];
            }
        }
        out
    }
}

impl<T: Real> Sub for Tensor4<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-T::one())
    }
}

/// Flattens a matrix in the standard ordering.
pub fn mat_to_vec<T: Real>(p: &Matrix3<T>) -> [T; 9] {
    let mut v = [T::zero(); 9];
    for i in 0..3 {
        for j in 0..3 {
            v[vec_index(i, j)] = p[(i, j)];
        }
    }
    v
}

/// Inverse of [`mat_to_vec`].
pub fn vec_to_mat<T: Real>(v: &[T; 9]) -> Matrix3<T> {
    Matrix3::from_fn(|i, j| v[vec_index(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = Matrix3<f64>> {
        prop::array::uniform3(prop::array::uniform3(-10.0..10.0f64)).prop_map(Matrix3)
    }

    fn arb_tensor() -> impl Strategy<Value = Tensor4<f64>> {
        prop::array::uniform9(prop::array::uniform9(-5.0..5.0f64)).prop_map(Tensor4::from_matrix)
    }

    #[test]
    fn identity_vectorizes_to_diagonal_slots() {
        let v = mat_to_vec(&Matrix3::<f64>::identity());
        assert_eq!(v, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn elementary_12_is_fourth_basis_vector() {
        let v = mat_to_vec(&Matrix3::<f64>::elementary(0, 1));
        let mut e4 = [0.0; 9];
        e4[3] = 1.0;
        assert_eq!(v, e4);
    }

    #[test]
    fn left_multiplication_is_block_diagonal() {
        let a = Matrix3([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]);
        let t = Tensor4::left_multiplication(&a);
        let m = t.matrix();
        for blk in 0..3 {
            for i in 0..3 {
                for k in 0..3 {
                    assert_eq!(m[3 * blk + i][3 * blk + k], a[(i, k)]);
                }
            }
        }
        let p = Matrix3([[0.5, -1.0, 2.0], [1.0, 0.0, 3.0], [-2.0, 1.0, 1.0]]);
        assert_eq!(t.apply(&p), a * p);
    }

    #[test]
    fn serde_round_trip_keeps_basis() {
        let t = Tensor4::<f64>::identity().scale(2.0).to_permuted();
        let s = serde_json_like(&t);
        assert_eq!(s.0, Basis::Permuted);
        assert_eq!(s.1.len(), 81);
    }

    fn serde_json_like(t: &Tensor4<f64>) -> (Basis, Vec<f64>) {
        let r: Tensor4Repr<f64> = (*t).into();
        let back = Tensor4::try_from(Tensor4Repr {
            basis: r.basis,
            entries: r.entries.clone(),
        })
        .unwrap();
        assert_eq!(&back, t);
        (r.basis, r.entries)
    }

    proptest! {
        #[test]
        fn vec_round_trip(p in arb_matrix()) {
            prop_assert_eq!(vec_to_mat(&mat_to_vec(&p)), p);
        }

        #[test]
        fn permutation_round_trip(t in arb_tensor()) {
            let back = t.to_permuted().to_standard();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn permutation_preserves_spectrum(t in arb_tensor()) {
            let s = t.symmetrize();
            let a = s.eigenvalues();
            let b = s.to_permuted().eigenvalues();
            for k in 0..9 {
                prop_assert!((a[k] - b[k]).abs() < 1e-10);
            }
        }

        #[test]
        fn components_are_basis_independent(t in arb_tensor(), i in 0..3usize, j in 0..3usize, k in 0..3usize, l in 0..3usize) {
            prop_assert_eq!(t.get(i, j, k, l), t.to_permuted().get(i, j, k, l));
        }
    }
}
