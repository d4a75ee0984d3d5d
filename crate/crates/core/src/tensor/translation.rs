//! Translation tensors and the translated conductivity tensors built from them.

use super::{Matrix3, Tensor4};
use crate::{Error, Real, Result};

#[inline]
fn delta<T: Real>(i: usize, j: usize) -> T {
    if i == j {
        T::one()
    } else {
        T::zero()
    }
}

/// Levi-Civita symbol `ε_{ijk}` (zero based indices).
pub fn levi_civita<T: Real>(i: usize, j: usize, k: usize) -> T {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => T::one(),
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -T::one(),
        _ => T::zero(),
    }
}

/// The null-Lagrangian translation `P ↦ Tr(P) I − Pᵀ`.
pub fn translation_t<T: Real>(p: &Matrix3<T>) -> Matrix3<T> {
    Matrix3::identity().scale(p.trace()) - p.transpose()
}

/// Tensor form of [`translation_t`]: `T_{ijkl} = δ_ij δ_kl − δ_il δ_jk`.
pub fn translation_t_tensor<T: Real>() -> Tensor4<T> {
    Tensor4::from_components(|i, j, k, l| delta::<T>(i, j) * delta(k, l) - delta::<T>(i, l) * delta(j, k))
}

/// Orthogonal decomposition of a matrix into its hydrostatic, symmetric
/// trace-free and antisymmetric parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projections<T> {
    pub hydrostatic: Matrix3<T>,
    pub deviatoric: Matrix3<T>,
    pub antisymmetric: Matrix3<T>,
}

pub fn projections<T: Real>(p: &Matrix3<T>) -> Projections<T> {
    let half = T::lit(0.5);
    let hydrostatic = Matrix3::identity().scale(p.trace() / T::lit(3.0));
    let sym = (*p + p.transpose()).scale(half);
    Projections {
        hydrostatic,
        deviatoric: sym - hydrostatic,
        antisymmetric: (*p - p.transpose()).scale(half),
    }
}

/// Projector tensors `(Λ_h, Λ_s, Λ_a)`.
pub fn projector_tensors<T: Real>() -> (Tensor4<T>, Tensor4<T>, Tensor4<T>) {
    let third = T::one() / T::lit(3.0);
    let half = T::lit(0.5);
    let h = Tensor4::from_components(|i, j, k, l| third * delta::<T>(i, j) * delta(k, l));
    let sym = Tensor4::from_components(|i, j, k, l| {
        half * (delta::<T>(i, k) * delta(j, l) + delta::<T>(i, l) * delta(j, k))
    });
    let a = Tensor4::from_components(|i, j, k, l| {
        half * (delta::<T>(i, k) * delta(j, l) - delta::<T>(i, l) * delta(j, k))
    });
    (h, sym - h, a)
}

/// The quasiconvex translation `P ↦ P + Pᵀ − Tr(P) I` (equal to `2Λ_s − Λ_h`).
pub fn translation_t_prime<T: Real>(p: &Matrix3<T>) -> Matrix3<T> {
    *p + p.transpose() - Matrix3::identity().scale(p.trace())
}

pub fn translation_t_prime_tensor<T: Real>() -> Tensor4<T> {
    Tensor4::from_components(|i, j, k, l| {
        delta::<T>(i, k) * delta(j, l) + delta::<T>(i, l) * delta(j, k) - delta::<T>(i, j) * delta(k, l)
    })
}

/// Quadratic form `Tr(Pᵀ 𝕋′ P)`.
pub fn t_prime_form<T: Real>(p: &Matrix3<T>) -> T {
    p.ddot(&translation_t_prime(p))
}

/// Whether an assembled translated tensor must be positive definite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    Require,
    Allow,
}

/// `L_c = σ𝕀 + c𝕋`, positive definite iff `−σ/2 < c < σ`.
pub fn assemble_lc<T: Real>(sigma: T, c: T, positivity: Positivity) -> Result<Tensor4<T>> {
    if positivity == Positivity::Require {
        let min_eig = (sigma + T::lit(2.0) * c).min(sigma - c).min(sigma + c);
        if !(min_eig > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                what: format!("L_c (sigma = {sigma}, c = {c})"),
                min_eigenvalue: min_eig.as_f64(),
            });
        }
    }
    Ok(Tensor4::identity().scale(sigma) + translation_t_tensor().scale(c))
}

/// `L′_c = σ⁻¹𝕀 − c𝕋′`, positive definite iff `−1/σ < c < 1/(2σ)`.
pub fn assemble_lc_prime<T: Real>(sigma: T, c: T, positivity: Positivity) -> Result<Tensor4<T>> {
    let inv = sigma.recip();
    if positivity == Positivity::Require {
        let min_eig = (inv + c).min(inv - T::lit(2.0) * c).min(inv);
        if !(min_eig > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                what: format!("L'_c (sigma = {sigma}, c = {c})"),
                min_eigenvalue: min_eig.as_f64(),
            });
        }
    }
    Ok(Tensor4::identity().scale(inv) - translation_t_prime_tensor().scale(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = Matrix3<f64>> {
        prop::array::uniform3(prop::array::uniform3(-3.0..3.0f64)).prop_map(Matrix3)
    }

    /// Rotation from a unit quaternion.
    fn rotation(q: [f64; 4]) -> Matrix3<f64> {
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        let [w, x, y, z] = q.map(|v| v / n);
        Matrix3([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
            [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
            [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
        ])
    }

    fn arb_rotation() -> impl Strategy<Value = Matrix3<f64>> {
        prop::array::uniform4(-1.0..1.0f64)
            .prop_filter("nonzero", |q| q.iter().map(|x| x * x).sum::<f64>() > 1e-3)
            .prop_map(rotation)
    }

    #[test]
    fn t_of_identity_is_twice_identity() {
        assert_eq!(translation_t(&Matrix3::<f64>::identity()), Matrix3::identity().scale(2.0));
    }

    #[test]
    fn t_of_elementary_12_is_minus_elementary_21() {
        assert_eq!(
            translation_t(&Matrix3::<f64>::elementary(0, 1)),
            -Matrix3::elementary(1, 0)
        );
    }

    #[test]
    fn t_tensor_matches_vector_basis_display() {
        #[rustfmt::skip]
        let expected: [[f64; 9]; 9] = [
            [0., 0., 0., 0., 1., 0., 0., 0., 1.],
            [0., 0., 0., -1., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 0., 0., -1., 0., 0.],
            [0., -1., 0., 0., 0., 0., 0., 0., 0.],
            [1., 0., 0., 0., 0., 0., 0., 0., 1.],
            [0., 0., 0., 0., 0., 0., 0., -1., 0.],
            [0., 0., -1., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 0., -1., 0., 0., 0.],
            [1., 0., 0., 0., 1., 0., 0., 0., 0.],
        ];
        let t = translation_t_tensor::<f64>();
        assert_eq!(t.matrix(), &expected);
        assert_eq!(t.max_asymmetry(), 0.0);
    }

    #[test]
    fn permuted_t_has_ones_block() {
        let t = translation_t_tensor::<f64>().to_permuted();
        let m = t.matrix();
        let lead = [[m[0][0], m[0][1], m[0][2]], [m[1][0], m[1][1], m[1][2]], [m[2][0], m[2][1], m[2][2]]];
        assert_eq!(lead, [[0., 1., 1.], [1., 0., 1.], [1., 1., 0.]]);
        for b in 0..3 {
            let p = 3 + 2 * b;
            assert_eq!([m[p][p], m[p][p + 1], m[p + 1][p], m[p + 1][p + 1]], [0., -1., -1., 0.]);
        }
    }

    #[test]
    fn t_prime_of_identity() {
        let i = Matrix3::<f64>::identity();
        assert_eq!(translation_t_prime(&i), -i);
        assert_eq!(t_prime_form(&i), -3.0);
    }

    #[test]
    fn t_prime_null_on_rank_two_family() {
        // zero third row, p11 = p22, p12 = -p21, p13 = p23 = 0
        let p = Matrix3::<f64>([[0.7, -1.3, 0.0], [1.3, 0.7, 0.0], [0.0, 0.0, 0.0]]);
        assert!(t_prime_form(&p).abs() < 1e-15);
        // alpha0 = 1, beta0 = 0, k = e3
        let k = [0.0, 0.0, 1.0];
        let kk: f64 = k.iter().map(|x| x * x).sum();
        let q = Matrix3::from_fn(|i, j| k[i] * k[j] - if i == j { kk } else { 0.0 });
        assert!(t_prime_form(&q).abs() < 1e-15);
    }

    #[test]
    fn t_prime_rank_two_closed_form() {
        let p = Matrix3([[1.0, 2.0, -0.5], [0.3, -1.0, 1.5], [0.0, 0.0, 0.0]]);
        let expected = (1.0f64 - -1.0).powi(2) + (2.0f64 + 0.3).powi(2) + 0.25 + 2.25;
        assert!((t_prime_form(&p) - expected).abs() < 1e-13);
    }

    #[test]
    fn lc_rows_match_display() {
        let l = assemble_lc(2.0, 1.0, Positivity::Require).unwrap();
        assert_eq!(l.matrix()[0], [2., 0., 0., 0., 1., 0., 0., 0., 1.]);
        assert_eq!(l.matrix()[1], [0., 2., 0., -1., 0., 0., 0., 0., 0.]);
        let l0 = assemble_lc(3.0, 0.0, Positivity::Require).unwrap();
        assert_eq!(l0, Tensor4::identity().scale(3.0));
        let blocks = l.to_permuted();
        let m = blocks.matrix();
        assert_eq!([m[0][0], m[0][1], m[0][2]], [2., 1., 1.]);
        assert_eq!([m[3][3], m[3][4]], [2., -1.]);
    }

    #[test]
    fn lc_positivity_window() {
        assert!(assemble_lc(1.0, 1.0, Positivity::Require).is_err());
        assert!(assemble_lc(1.0, -0.5, Positivity::Require).is_err());
        assert!(assemble_lc(1.0, 0.99, Positivity::Require).is_ok());
        assert!(assemble_lc(1.0, 1.0, Positivity::Allow).is_ok());
        assert!(assemble_lc_prime(2.0, 0.25, Positivity::Require).is_err());
        assert!(assemble_lc_prime(2.0, 0.24, Positivity::Require).is_ok());
    }

    #[test]
    fn lc_prime_spectrum() {
        // spectral form: 1.1 on Λ_h (×1), 0.8 on Λ_s (×5), 1.0 on Λ_a (×3)
        let l = assemble_lc_prime(1.0f64, 0.1, Positivity::Require).unwrap();
        let w = l.eigenvalues();
        let expected = [1.1, 1.0, 1.0, 1.0, 0.8, 0.8, 0.8, 0.8, 0.8];
        for k in 0..9 {
            assert!((w[k] - expected[k]).abs() < 1e-12, "{w:?}");
        }
        let (h, s, a) = projector_tensors::<f64>();
        let spectral = h.scale(1.1) + s.scale(0.8) + a.scale(1.0);
        assert!(l.max_abs_diff(&spectral) < 1e-14);
    }

    #[test]
    fn projectors_resolve_identity() {
        let (h, s, a) = projector_tensors::<f64>();
        assert!((h + s + a).max_abs_diff(&Tensor4::identity()) < 1e-15);
        let tp = translation_t_prime_tensor::<f64>();
        assert!(tp.max_abs_diff(&(s.scale(2.0) - h)) < 1e-15);
        assert_eq!(tp.max_asymmetry(), 0.0);
    }

    proptest! {
        #[test]
        fn t_routes_agree(p in arb_matrix(), q in arb_matrix()) {
            let t = translation_t_tensor::<f64>();
            let componentwise = t.apply(&q);
            let direct = translation_t(&q);
            prop_assert!((componentwise - direct).max_abs() < 1e-12);
            // Tr(Pᵀ 𝕋P) = Tr(P)² − Tr(P²)
            let form = p.ddot(&translation_t(&p));
            let expected = p.trace().powi(2) - (p * p).trace();
            prop_assert!((form - expected).abs() < 1e-12);
            prop_assert!((t.quadratic(&p) - form).abs() < 1e-12);
        }

        #[test]
        fn decomposition_sums_to_input(p in arb_matrix()) {
            let d = projections(&p);
            prop_assert!((d.hydrostatic + d.deviatoric + d.antisymmetric - p).max_abs() < 1e-13);
            prop_assert!(d.deviatoric.trace().abs() < 1e-13);
            prop_assert!(d.antisymmetric.symmetric_part().max_abs() < 1e-15);
            let via_proj = d.deviatoric.scale(2.0) - d.hydrostatic;
            prop_assert!((via_proj - translation_t_prime(&p)).max_abs() < 1e-12);
        }

        #[test]
        fn t_prime_isotropic(p in arb_matrix(), r in arb_rotation()) {
            let lhs = translation_t_prime(&(r.transpose() * p * r));
            let rhs = r.transpose() * translation_t_prime(&p) * r;
            prop_assert!((lhs - rhs).max_abs() < 1e-12);
        }

        #[test]
        fn t_prime_nonnegative_on_rank_two(p in arb_matrix(), r in arb_rotation()) {
            let mut q = p;
            for j in 0..3 { q[(2, j)] = 0.0; }
            let rotated = r.transpose() * q * r;
            prop_assert!(t_prime_form(&rotated) >= -1e-12);
        }
    }
}
