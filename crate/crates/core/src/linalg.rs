//! Small dense linear algebra on fixed-size square arrays.
//!
//! Everything here works on `[[T; N]; N]` so the 3×3 and 9×9 cases share one
//! implementation. Sizes are tiny, so plain Gauss-Jordan and cyclic Jacobi are
//! accurate and fast enough.

use crate::Real;

pub(crate) type Square<T, const N: usize> = [[T; N]; N];

pub(crate) fn zeros<T: Real, const N: usize>() -> Square<T, N> {
    [[T::zero(); N]; N]
}

pub(crate) fn identity<T: Real, const N: usize>() -> Square<T, N> {
    let mut m = zeros::<T, N>();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

pub(crate) fn transpose<T: Real, const N: usize>(a: &Square<T, N>) -> Square<T, N> {
    let mut t = zeros::<T, N>();
    for i in 0..N {
        for j in 0..N {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub(crate) fn matmul<T: Real, const N: usize>(a: &Square<T, N>, b: &Square<T, N>) -> Square<T, N> {
    let mut c = zeros::<T, N>();
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == T::zero() {
                continue;
            }
            for j in 0..N {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub(crate) fn matvec<T: Real, const N: usize>(a: &Square<T, N>, x: &[T; N]) -> [T; N] {
    let mut y = [T::zero(); N];
    for i in 0..N {
        y[i] = (0..N).map(|j| a[i][j] * x[j]).sum();
    }
    y
}

pub(crate) fn frobenius<T: Real, const N: usize>(a: &Square<T, N>) -> T {
    a.iter()
        .flat_map(|r| r.iter())
        .map(|&x| x * x)
        .sum::<T>()
        .sqrt()
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `N·eps·‖a‖_max`.
pub(crate) fn inverse<T: Real, const N: usize>(a: &Square<T, N>) -> Option<Square<T, N>> {
    let mut m = *a;
    let mut inv = identity::<T, N>();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |acc, &x| acc.max(x.abs()));
    if scale == T::zero() {
        return None;
    }
    let tiny = scale * T::epsilon() * T::from_count(N);
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() <= tiny {
            return None;
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let p = m[col][col];
        for j in 0..N {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..N {
            if i == col {
                continue;
            }
            let f = m[i][col];
            if f == T::zero() {
                continue;
            }
            for j in 0..N {
                m[i][j] = m[i][j] - f * m[col][j];
                inv[i][j] = inv[i][j] - f * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Determinant by LU with partial pivoting.
pub(crate) fn determinant<T: Real, const N: usize>(a: &Square<T, N>) -> T {
    let mut m = *a;
    let mut det = T::one();
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col] == T::zero() {
            return T::zero();
        }
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for i in col + 1..N {
            let f = m[i][col] / p;
            for j in col..N {
                m[i][j] = m[i][j] - f * m[col][j];
            }
        }
    }
    det
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// Only the symmetric part of `a` is used. Eigenvalues come back in descending
/// order; column `k` of the returned matrix is the eigenvector for value `k`.
pub(crate) fn sym_eigen<T: Real, const N: usize>(a: &Square<T, N>) -> ([T; N], Square<T, N>) {
    let half = T::lit(0.5);
    let mut m = zeros::<T, N>();
    for i in 0..N {
        for j in 0..N {
            m[i][j] = half * (a[i][j] + a[j][i]);
        }
    }
    let mut v = identity::<T, N>();
    let norm = frobenius(&m);
    if norm > T::zero() {
        for _sweep in 0..100 {
            let off: T = (0..N)
                .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[i][j] * m[i][j])
                .sum();
            if off.sqrt() <= T::epsilon() * T::lit(1e-2) * norm {
                break;
            }
            for p in 0..N {
                for q in p + 1..N {
                    let apq = m[p][q];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (m[q][q] - m[p][p]) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..N {
                        let mkp = m[k][p];
                        let mkq = m[k][q];
                        m[k][p] = c * mkp - s * mkq;
                        m[k][q] = s * mkp + c * mkq;
                    }
                    for k in 0..N {
                        let mpk = m[p][k];
                        let mqk = m[q][k];
                        m[p][k] = c * mpk - s * mqk;
                        m[q][k] = s * mpk + c * mqk;
                    }
                    for row in v.iter_mut() {
                        let vkp = row[p];
                        let vkq = row[q];
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap());
    let mut values = [T::zero(); N];
    let mut vectors = zeros::<T, N>();
    for (k, &src) in order.iter().enumerate() {
        values[k] = m[src][src];
        for i in 0..N {
            vectors[i][k] = v[i][src];
        }
    }
    (values, vectors)
}
