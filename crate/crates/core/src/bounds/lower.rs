use serde::{Deserialize, Serialize};

use super::upper::{BoundValue, SPECTRUM_TOLERANCE};
use crate::tensor::{check_conductivities, Matrix3};
use crate::{Error, Real, Result};

/// Lower bound on `f₁` from `Tr A′` and a lower bound `g⁻` on the g-functional:
/// `1 − (2σ₁+σ₂)/(2(σ₁−σ₂)) · [1 − 9/(2σ₁TrA′ − g⁻)]`.
pub fn lower_bound_general<T: Real>(tr_aprime: T, g_minus: T, sigma1: T, sigma2: T) -> Result<BoundValue<T>> {
    check_conductivities(sigma1, sigma2)?;
    let two = T::lit(2.0);
    let den = two * sigma1 * tr_aprime - g_minus;
    if !(den > T::zero()) {
        return Err(Error::DataInconsistency(format!(
            "2 sigma1 Tr A' - g = {den} is not positive"
        )));
    }
    let raw = T::one() - (two * sigma1 + sigma2) / (two * (sigma1 - sigma2)) * (T::one() - T::lit(9.0) / den);
    Ok(BoundValue::clamped(raw))
}

/// Both special-Neumann lower bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialNeumannBounds<T> {
    /// Translation bound with `g = −3`.
    pub translation: BoundValue<T>,
    /// `1 − (2σ₁+σ₂)/(σ₁−σ₂) · 1/(σ₁Tr[(σ₁I−σ_N)⁻¹] − 1)`.
    pub resolvent: BoundValue<T>,
    /// Set when `σ₁I − σ_N` is singular and `resolvent` is its limiting value 1.
    pub resolvent_singular: bool,
}

/// Lower bounds from the Neumann tensor `σ_N` (with `A′ = σ_N⁻¹`).
pub fn lower_bound_special_neumann<T: Real>(sigma_n: &Matrix3<T>, sigma1: T, sigma2: T) -> Result<SpecialNeumannBounds<T>> {
    check_conductivities(sigma1, sigma2)?;
    let tol = T::lit(SPECTRUM_TOLERANCE) * sigma1;
    if sigma_n.asymmetry() > T::lit(SPECTRUM_TOLERANCE) {
        return Err(Error::DataInconsistency("sigma_N is not symmetric".into()));
    }
    let (w, _) = sigma_n.symmetric_eigen();
    if w[2] < sigma2 - tol || w[0] > sigma1 + tol {
        return Err(Error::DataInconsistency(format!("sigma_N spectrum {w:?} outside [{sigma2}, {sigma1}]")));
    }
    let tr_inv: T = w.iter().map(|&x| x.recip()).sum();
    let translation = lower_bound_general(tr_inv, T::lit(-3.0), sigma1, sigma2)?;

    let (resolvent, resolvent_singular) = if w.iter().any(|&x| sigma1 - x <= tol) {
        (BoundValue::clamped(T::one()), true)
    } else {
        let tr: T = w.iter().map(|&x| (sigma1 - x).recip()).sum();
        let raw = T::one() - (T::lit(2.0) * sigma1 + sigma2) / (sigma1 - sigma2) / (sigma1 * tr - T::one());
        (BoundValue::clamped(raw), false)
    };
    Ok(SpecialNeumannBounds { translation, resolvent, resolvent_singular })
}
