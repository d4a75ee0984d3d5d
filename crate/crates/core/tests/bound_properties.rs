use incbound_core::bounds::{
    hashin_shtrikman_lower, lower_bound_general, lower_bound_special_neumann, pairwise_bound_affine,
    upper_bound_special, upper_bound_trace,
};
use incbound_core::tensor::{translation_t_tensor, Matrix3};
use proptest::prelude::*;

fn rotation(a: f64, b: f64, c: f64) -> Matrix3<f64> {
    let rx = Matrix3([[1.0, 0.0, 0.0], [0.0, a.cos(), -a.sin()], [0.0, a.sin(), a.cos()]]);
    let ry = Matrix3([[b.cos(), 0.0, b.sin()], [0.0, 1.0, 0.0], [-b.sin(), 0.0, b.cos()]]);
    let rz = Matrix3([[c.cos(), -c.sin(), 0.0], [c.sin(), c.cos(), 0.0], [0.0, 0.0, 1.0]]);
    rz * ry * rx
}

/// Contrast `(σ₁, σ₂)` and three values of `t ∈ (0, 1)`.
fn setup() -> impl Strategy<Value = (f64, f64, [f64; 3])> {
    (0.2..5.0f64, 1.2..30.0f64, prop::array::uniform3(0.01..0.99f64)).prop_map(|(s2, ratio, t)| (s2 * ratio, s2, t))
}

fn spectrum(s1: f64, s2: f64, t: [f64; 3]) -> [f64; 3] {
    t.map(|x| s2 + x * (s1 - s2))
}

proptest! {
    #[test]
    fn special_bound_is_sharp_at_hashin_shtrikman(f1 in 0.0..1.0f64, s2 in 0.1..5.0f64, ratio in 1.1..50.0f64) {
        let s1 = s2 * ratio;
        let sd = Matrix3::identity().scale(hashin_shtrikman_lower(f1, s1, s2));
        let b = upper_bound_special(&sd, s1, s2).unwrap();
        prop_assert!((b.raw - f1).abs() < 1e-9);
    }

    #[test]
    fn special_bound_is_rotation_invariant((s1, s2, t) in setup(), a in 0.0..6.3f64, b in 0.0..6.3f64, c in 0.0..6.3f64) {
        let d = Matrix3::from_diagonal(spectrum(s1, s2, t));
        let r = rotation(a, b, c);
        let u0 = upper_bound_special(&d, s1, s2).unwrap().raw;
        let u1 = upper_bound_special(&(r * d * r.transpose()), s1, s2).unwrap().raw;
        prop_assert!((u0 - u1).abs() < 1e-9);
        let l0 = lower_bound_special_neumann(&d, s1, s2).unwrap();
        let l1 = lower_bound_special_neumann(&(r * d * r.transpose()), s1, s2).unwrap();
        prop_assert!((l0.translation.raw - l1.translation.raw).abs() < 1e-9);
        prop_assert!((l0.resolvent.raw - l1.resolvent.raw).abs() < 1e-9);
    }

    #[test]
    fn trace_bound_equals_special_bound_for_affine_data((s1, s2, t) in setup()) {
        let l = spectrum(s1, s2, t);
        let a = upper_bound_trace(l, &translation_t_tensor(), s1, s2).unwrap();
        let b = upper_bound_special(&Matrix3::from_diagonal(l), s1, s2).unwrap();
        prop_assert!((a.raw - b.raw).abs() < 1e-12);
    }

    #[test]
    fn upper_bounds_increase_with_conductivity((s1, s2, t) in setup(), k in 0usize..3, dt in 0.0..0.5f64) {
        let mut t2 = t;
        t2[k] = (t[k] + dt * (1.0 - t[k])).min(0.999);
        let lo = upper_bound_special(&Matrix3::from_diagonal(spectrum(s1, s2, t)), s1, s2).unwrap().raw;
        let hi = upper_bound_special(&Matrix3::from_diagonal(spectrum(s1, s2, t2)), s1, s2).unwrap().raw;
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn special_bound_below_pairwise((s1, s2, t) in setup()) {
        let l = spectrum(s1, s2, t);
        let us = upper_bound_special(&Matrix3::from_diagonal(l), s1, s2).unwrap();
        let up = pairwise_bound_affine(l, &translation_t_tensor(), s1, s2).unwrap();
        prop_assert!(us.value <= up.value + 1e-12);
    }

    #[test]
    fn lower_bounds_increase_with_neumann_conductivity((s1, s2, t) in setup(), k in 0usize..3, dt in 0.0..0.5f64) {
        let mut t2 = t;
        t2[k] = (t[k] + dt * (1.0 - t[k])).min(0.999);
        let lo = lower_bound_special_neumann(&Matrix3::from_diagonal(spectrum(s1, s2, t)), s1, s2).unwrap();
        let hi = lower_bound_special_neumann(&Matrix3::from_diagonal(spectrum(s1, s2, t2)), s1, s2).unwrap();
        prop_assert!(hi.translation.raw >= lo.translation.raw - 1e-12);
        prop_assert!(hi.resolvent.raw >= lo.resolvent.raw - 1e-12);
    }

    #[test]
    fn milton_bound_dominates_translation_bound((s1, s2, t) in setup()) {
        let b = lower_bound_special_neumann(&Matrix3::from_diagonal(spectrum(s1, s2, t)), s1, s2).unwrap();
        prop_assert!(b.resolvent.raw >= b.translation.raw - 1e-12);
    }

    #[test]
    fn general_lower_bound_increases_with_g((s1, s2, _t) in setup(), tr in 0.05..3.0f64, g in -3.0..-1.0f64, dg in 0.0..0.5f64) {
        let tr = tr / s2;
        if let (Ok(a), Ok(b)) = (lower_bound_general(tr, g, s1, s2), lower_bound_general(tr, g + dg, s1, s2)) {
            prop_assert!(b.raw >= a.raw - 1e-12);
        }
    }

    #[test]
    fn bounds_are_clamped((s1, s2, t) in setup(), tr in 0.0..10.0f64, g in -10.0..0.0f64) {
        let l = spectrum(s1, s2, t);
        let mut vals = vec![
            upper_bound_special(&Matrix3::from_diagonal(l), s1, s2).unwrap().value,
            pairwise_bound_affine(l, &translation_t_tensor(), s1, s2).unwrap().value,
        ];
        if let Ok(b) = lower_bound_general(tr, g, s1, s2) {
            vals.push(b.value);
        }
        prop_assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

/// `σ₁ + f₂ / (1/(σ₂−σ₁) + f₁/(3σ₁))`, phase 1 as the coating.
fn hashin_shtrikman_upper(f1: f64, s1: f64, s2: f64) -> f64 {
    s1 + (1.0 - f1) / (1.0 / (s2 - s1) + f1 / (3.0 * s1))
}

#[test]
fn lower_bounds_sharp_at_hashin_shtrikman_upper() {
    for &(s1, f1) in &[(2.0, 0.1), (5.0, 0.3), (10.0, 0.7)] {
        let hs = hashin_shtrikman_upper(f1, s1, 1.0);
        let b = lower_bound_special_neumann(&Matrix3::identity().scale(hs), s1, 1.0).unwrap();
        assert!((b.translation.raw - f1).abs() < 1e-12 && (b.resolvent.raw - f1).abs() < 1e-12, "{b:?}");
    }
}
