use serde::{Deserialize, Serialize};

use crate::tensor::{check_conductivities, translation_t_tensor, Matrix3, Tensor4};
use crate::{Error, Real, Result};

/// A bound on `f₁` clamped to `[0, 1]`, with the unclamped value kept.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue<T> {
    pub value: T,
    pub raw: T,
}

impl<T: Real> BoundValue<T> {
    pub fn clamped(raw: T) -> Self {
        let value = if raw.is_nan() { raw } else { raw.max(T::zero()).min(T::one()) };
        Self { value, raw }
    }

    pub fn was_clamped(&self) -> bool {
        self.value != self.raw
    }
}

/// Relative tolerance for spectral preconditions on measured tensors.
pub const SPECTRUM_TOLERANCE: f64 = 1e-8;

/// `1ᵀ Q⁻¹ 1` for symmetric `Q ⪰ 0`, infinite when `1` meets the null space.
fn inverse_quadratic_ones<T: Real>(q: &Matrix3<T>, scale: T) -> Result<T> {
    let (w, v) = q.symmetric_eigen();
    let tol = T::lit(SPECTRUM_TOLERANCE) * scale;
    let mut total = T::zero();
    for k in 0..3 {
        let proj: T = (0..3).map(|i| v[(i, k)]).sum();
        if w[k] < -tol {
            return Err(Error::DataInconsistency(format!(
                "trace-bound matrix is indefinite (eigenvalue {} below -{})",
                w[k], tol
            )));
        }
        if w[k] <= tol {
            if proj.abs() > T::lit(1e-6) {
                return Ok(T::infinity());
            }
            continue;
        }
        total += proj * proj / w[k];
    }
    Ok(total)
}

/// `(σ₁+2σ₂)/(σ₁−σ₂) · 1/(1+σ₂T)`.
fn hs_form<T: Real>(t: T, s1: T, s2: T) -> T {
    if t.is_infinite() {
        return T::zero();
    }
    (s1 + T::lit(2.0) * s2) / (s1 - s2) / (T::one() + s2 * t)
}

/// The matrix `diag(λ − σ₂) + σ₂ offdiag(M_iijj − 1)` whose inverse, sandwiched
/// by `[1,1,1]`, gives `T`.
pub fn trace_bound_matrix<T: Real>(lambda: [T; 3], m: &Tensor4<T>, s2: T) -> Matrix3<T> {
    Matrix3::from_fn(|i, j| {
        if i == j {
            lambda[i] - s2
        } else {
            s2 * (m.get(i, i, j, j) - T::one())
        }
    })
}

/// Upper bound on `f₁` from the eigenvalues of `A` and the diagonal pairs
/// `M_iijj` of the measured tensor.
pub fn upper_bound_trace<T: Real>(lambda: [T; 3], m: &Tensor4<T>, sigma1: T, sigma2: T) -> Result<BoundValue<T>> {
    check_conductivities(sigma1, sigma2)?;
    let tol = T::lit(SPECTRUM_TOLERANCE) * sigma1;
    if let Some(l) = lambda.iter().find(|&&l| l < sigma2 - tol) {
        return Err(Error::DataInconsistency(format!("eigenvalue {l} of A is below sigma2 = {sigma2}")));
    }
    let q = trace_bound_matrix(lambda, m, sigma2);
    let t = inverse_quadratic_ones(&q, sigma1)?;
    Ok(BoundValue::clamped(hs_form(t, sigma1, sigma2)))
}

fn check_spectrum<T: Real>(s: &Matrix3<T>, sigma1: T, sigma2: T, what: &str) -> Result<[T; 3]> {
    let tol = T::lit(SPECTRUM_TOLERANCE) * sigma1;
    if s.asymmetry() > T::lit(SPECTRUM_TOLERANCE) {
        return Err(Error::DataInconsistency(format!("{what} is not symmetric")));
    }
    let (w, _) = s.symmetric_eigen();
    if w[2] < sigma2 - tol || w[0] > sigma1 + tol {
        return Err(Error::DataInconsistency(format!(
            "{what} spectrum {w:?} outside [{sigma2}, {sigma1}]"
        )));
    }
    Ok(w)
}

/// Upper bound from the Dirichlet tensor, `Tr[(σ_D − σ₂I)⁻¹]` form.
pub fn upper_bound_special<T: Real>(sigma_d: &Matrix3<T>, sigma1: T, sigma2: T) -> Result<BoundValue<T>> {
    check_conductivities(sigma1, sigma2)?;
    let w = check_spectrum(sigma_d, sigma1, sigma2, "sigma_D")?;
    upper_bound_trace(w, &translation_t_tensor(), sigma1, sigma2)
}

/// Largest `|M − 𝕋|` accepted as affine data.
pub const AFFINE_M_TOLERANCE: f64 = 1e-6;

/// Pairwise-block bound `(σ₁+σ₂)/(σ₁−σ₂) · 1/(1 + (2/3)σ₂Tr[(σ_D−σ₂I)⁻¹])`.
///
/// Valid only for affine data; a diagnostic that is never tighter than
/// [`upper_bound_special`].
pub fn pairwise_bound_affine<T: Real>(lambda: [T; 3], m: &Tensor4<T>, sigma1: T, sigma2: T) -> Result<BoundValue<T>> {
    check_conductivities(sigma1, sigma2)?;
    let dev = m.max_abs_diff(&translation_t_tensor());
    if dev > T::lit(AFFINE_M_TOLERANCE) {
        return Err(Error::InvalidInput(format!(
            "pairwise bound needs affine data (M = T); measured M deviates by {dev}"
        )));
    }
    let tol = T::lit(SPECTRUM_TOLERANCE) * sigma1;
    let mut tr = T::zero();
    for &l in &lambda {
        if l < sigma2 - tol || l > sigma1 + tol {
            return Err(Error::DataInconsistency(format!("eigenvalue {l} outside [{sigma2}, {sigma1}]")));
        }
        if l - sigma2 <= tol {
            return Ok(BoundValue::clamped(T::zero()));
        }
        tr += (l - sigma2).recip();
    }
    let raw = (sigma1 + sigma2) / (sigma1 - sigma2) / (T::one() + T::lit(2.0 / 3.0) * sigma2 * tr);
    Ok(BoundValue::clamped(raw))
}

/// Hashin–Shtrikman lower value `σ₂ + 3f₁σ₂(σ₁−σ₂)/(3σ₂ + f₂(σ₁−σ₂))`.
pub fn hashin_shtrikman_lower<T: Real>(f1: T, sigma1: T, sigma2: T) -> T {
    let three = T::lit(3.0);
    sigma2 + three * f1 * sigma2 * (sigma1 - sigma2) / (three * sigma2 + (T::one() - f1) * (sigma1 - sigma2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t4() -> Tensor4<f64> {
        translation_t_tensor()
    }

    #[test]
    fn hashin_shtrikman_point() {
        let hs = hashin_shtrikman_lower(0.3f64, 2.0, 1.0);
        assert!((hs - 1.243_243_243_243_243).abs() < 1e-12);
        let b = upper_bound_trace([hs; 3], &t4(), 2.0, 1.0).unwrap();
        assert!((b.value - 0.3).abs() < 1e-9);
    }

    #[test]
    fn substitution_examples() {
        let b = upper_bound_trace([1.2f64; 3], &t4(), 5.0, 1.0).unwrap();
        assert!((b.value - 7.0 / 64.0).abs() < 1e-12);
        assert_eq!(upper_bound_trace([5.0; 3], &t4(), 5.0, 1.0).unwrap().value, 1.0);
        assert_eq!(upper_bound_trace([1.0; 3], &t4(), 5.0, 1.0).unwrap().value, 0.0);
        let s = upper_bound_special(&Matrix3::<f64>::identity().scale(10.0 / 7.0), 2.0, 1.0).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pairwise_examples() {
        let p = pairwise_bound_affine([1.25f64; 3], &t4(), 2.0, 1.0).unwrap();
        assert!((p.value - 1.0 / 3.0).abs() < 1e-12);
        let s = upper_bound_special(&Matrix3::<f64>::identity().scale(1.25), 2.0, 1.0).unwrap();
        assert!((s.value - 4.0 / 13.0).abs() < 1e-12);
        assert!((pairwise_bound_affine([2.0f64; 3], &t4(), 2.0, 1.0).unwrap().value - 1.0).abs() < 1e-12);
        let mut m = t4();
        m.set(0, 1, 1, 0, 0.3);
        assert!(pairwise_bound_affine([1.25; 3], &m, 2.0, 1.0).is_err());
    }

    #[test]
    fn rejects_inconsistent_data() {
        assert!(upper_bound_trace([0.5, 1.2, 1.3], &t4(), 2.0, 1.0).is_err());
        assert!(upper_bound_special(&Matrix3::identity().scale(3.0), 2.0, 1.0).is_err());
    }

    #[test]
    fn partially_singular_matrix_gives_zero() {
        let b = upper_bound_trace([1.0, 1.5, 1.5], &t4(), 2.0, 1.0).unwrap();
        assert_eq!(b.value, 0.0);
    }
}
