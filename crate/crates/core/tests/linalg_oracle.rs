//! Matrix3 / Tensor4 linear algebra against nalgebra.

use approx::assert_relative_eq;
use incbound_core::tensor::{Matrix3, Tensor4};
use nalgebra::{DMatrix, Matrix3 as NaMatrix3, SymmetricEigen};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn matrix3() -> impl Strategy<Value = Matrix3<f64>> {
    prop::array::uniform3(prop::array::uniform3(entry())).prop_map(Matrix3)
}

fn tensor4() -> impl Strategy<Value = Tensor4<f64>> {
    prop::collection::vec(entry(), 81).prop_map(|v| {
        let mut e = [[0.0; 9]; 9];
        for p in 0..9 {
            e[p].copy_from_slice(&v[9 * p..9 * p + 9]);
        }
        Tensor4::from_matrix(e)
    })
}

fn na3(m: &Matrix3<f64>) -> NaMatrix3<f64> {
    NaMatrix3::from_fn(|i, j| m[(i, j)])
}

proptest! {
    #[test]
    fn symmetric_eigenvalues_match(m in matrix3()) {
        let s = m.symmetric_part();
        let (w, v) = s.symmetric_eigen();
        let mut ref_w: Vec<f64> = SymmetricEigen::new(na3(&s)).eigenvalues.iter().copied().collect();
        ref_w.sort_by(|a, b| b.total_cmp(a));
        for k in 0..3 {
            assert_relative_eq!(w[k], ref_w[k], epsilon = 1e-12);
        }
        let back = v * Matrix3::from_diagonal(w) * v.transpose();
        prop_assert!((back - s).max_abs() < 1e-12);
    }

    #[test]
    fn inverse_and_determinant_match(m in matrix3()) {
        let n = na3(&m);
        assert_relative_eq!(m.determinant(), n.determinant(), epsilon = 1e-12);
        if n.determinant().abs() > 1e-3 {
            let inv = m.inverse().unwrap();
            let ni = n.try_inverse().unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert_relative_eq!(inv[(i, j)], ni[(i, j)], epsilon = 1e-9, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn tensor_spectrum_matches(t in tensor4()) {
        let s = t.symmetrize();
        let d = DMatrix::from_fn(9, 9, |p, q| s.matrix()[p][q]);
        let mut ref_w: Vec<f64> = SymmetricEigen::new(d.clone()).eigenvalues.iter().copied().collect();
        ref_w.sort_by(|a, b| b.total_cmp(a));
        let w = s.eigenvalues();
        for k in 0..9 {
            assert_relative_eq!(w[k], ref_w[k], epsilon = 1e-10);
        }
        assert_relative_eq!(s.determinant(), d.determinant(), epsilon = 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn rotation_preserves_spectrum(t in tensor4(), a in 0.0..6.3f64, b in 0.0..6.3f64) {
        let (ca, sa, cb, sb) = (a.cos(), a.sin(), b.cos(), b.sin());
        let rz = Matrix3([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]]);
        let rx = Matrix3([[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]]);
        let s = t.symmetrize();
        let w0 = s.eigenvalues();
        let w1 = s.rotate(&(rz * rx)).eigenvalues();
        for k in 0..9 {
            prop_assert!((w0[k] - w1[k]).abs() < 1e-10);
        }
    }
}
