use serde::{Deserialize, Serialize};

use crate::tensor::{check_conductivities, limit_tensor_with, Matrix3, PhaseAverage, Tensor4, LIMIT_SCHEDULE};
use crate::{Error, Real, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Number of equispaced points on `[0, 1]` in the pre-scan.
    pub prescan: usize,
    /// Bisection stops when the bracket is narrower than this.
    pub tolerance: f64,
    /// PSD test: smallest eigenvalue `≥ −eps · ‖𝔸 + σ₂𝕄‖_F`.
    pub eps: f64,
    /// Exponents `k` of `c = σ₂(1 − 10⁻ᵏ)` used for the limit tensor.
    pub limit_exponents: Vec<i32>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { prescan: 64, tolerance: 1e-4, eps: 1e-9, limit_exponents: LIMIT_SCHEDULE.to_vec() }
    }
}

/// Result of the positive-semidefinite feasibility test over `f₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    /// Supremum of the PSD-feasible set (lower end of the final bracket).
    pub f1_star: f64,
    /// Upper end of the final bracket.
    pub f1_bracket_high: f64,
    /// Scan intervals on which `det N(f₁) ≥ 0`.
    pub det_nonnegative: Vec<[f64; 2]>,
    /// False when the pre-scan found a feasible point above an infeasible one.
    pub interval_structure: bool,
    pub scan: Vec<ScanPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub f1: f64,
    pub min_eigenvalue: f64,
    pub determinant: f64,
}

/// `N(f₁) = 𝔸 + σ₂𝕄 − lim_{c→σ₂}⟨L_c⁻¹⟩⁻¹`.
pub fn feasibility_tensor<T: Real>(a: &Matrix3<T>, m: &Tensor4<T>, sigma1: T, sigma2: T, f1: T) -> Result<Tensor4<T>> {
    feasibility_tensor_with(a, m, sigma1, sigma2, f1, &LIMIT_SCHEDULE)
}

fn feasibility_tensor_with<T: Real>(
    a: &Matrix3<T>,
    m: &Tensor4<T>,
    sigma1: T,
    sigma2: T,
    f1: T,
    exponents: &[i32],
) -> Result<Tensor4<T>> {
    let base = Tensor4::left_multiplication(a) + m.scale(sigma2);
    let lim = limit_tensor_with(&PhaseAverage::new(f1, sigma1, sigma2)?, exponents)?;
    Ok((base - lim.numeric).symmetrize())
}

struct Engine<'a, T> {
    a: &'a Matrix3<T>,
    m: &'a Tensor4<T>,
    s1: T,
    s2: T,
    threshold: T,
    exponents: &'a [i32],
}

impl<T: Real> Engine<'_, T> {
    fn eval(&self, f: f64) -> Result<(bool, ScanPoint)> {
        let n = feasibility_tensor_with(self.a, self.m, self.s1, self.s2, T::lit(f), self.exponents)?;
        let min = n.min_eigenvalue();
        let pt = ScanPoint { f1: f, min_eigenvalue: min.as_f64(), determinant: n.determinant().as_f64() };
        Ok((min >= -self.threshold, pt))
    }
}

/// Largest `f₁` for which `N(f₁) ⪰ 0`, found by a pre-scan and bisection.
pub fn feasibility_interval<T: Real>(
    a: &Matrix3<T>,
    m: &Tensor4<T>,
    sigma1: T,
    sigma2: T,
    opts: &ScanOptions,
) -> Result<Feasibility> {
    check_conductivities(sigma1, sigma2)?;
    if opts.prescan < 2 || !(opts.tolerance > 0.0) {
        return Err(Error::InvalidInput("feasibility scan needs ≥ 2 points and a positive tolerance".into()));
    }
    let base = Tensor4::left_multiplication(a) + m.scale(sigma2);
    let engine = Engine {
        a,
        m,
        s1: sigma1,
        s2: sigma2,
        threshold: T::lit(opts.eps) * base.frobenius(),
        exponents: &opts.limit_exponents,
    };

    let mut scan = Vec::with_capacity(opts.prescan);
    let mut feasible = Vec::with_capacity(opts.prescan);
    for k in 0..opts.prescan {
        let f = k as f64 / (opts.prescan - 1) as f64;
        let (ok, pt) = engine.eval(f)?;
        feasible.push(ok);
        scan.push(pt);
    }
    if !feasible[0] {
        return Err(Error::DataInconsistency(format!(
            "measurements are infeasible at f1 = 0 (smallest eigenvalue {:e})",
            scan[0].min_eigenvalue
        )));
    }
    let first_bad = feasible.iter().position(|&ok| !ok);
    let interval_structure = match first_bad {
        Some(k) => feasible[k..].iter().all(|&ok| !ok),
        None => true,
    };

    let (f1_star, high) = match first_bad {
        None => (1.0, 1.0),
        Some(_) if !interval_structure => {
            let last = feasible.iter().rposition(|&ok| ok).unwrap_or(0);
            (scan[last].f1, scan.get(last + 1).map_or(1.0, |p| p.f1))
        }
        Some(k) => {
            let (mut lo, mut hi) = (scan[k - 1].f1, scan[k].f1);
            while hi - lo > opts.tolerance {
                let mid = 0.5 * (lo + hi);
                if engine.eval(mid)?.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (lo, hi)
        }
    };

    let mut det_nonnegative: Vec<[f64; 2]> = Vec::new();
    let mut open: Option<f64> = None;
    for (k, p) in scan.iter().enumerate() {
        let ok = p.determinant >= 0.0;
        match (ok, open) {
            (true, None) => open = Some(p.f1),
            (false, Some(s)) => {
                det_nonnegative.push([s, scan[k - 1].f1]);
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        det_nonnegative.push([s, 1.0]);
    }

    Ok(Feasibility { f1_star, f1_bracket_high: high, det_nonnegative, interval_structure, scan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::upper::{hashin_shtrikman_lower, upper_bound_trace};
    use crate::tensor::translation_t_tensor;

    #[test]
    fn homogeneous_collapses_to_zero() {
        let t = translation_t_tensor::<f64>();
        let r = feasibility_interval(&Matrix3::identity(), &t, 3.0, 1.0, &ScanOptions::default()).unwrap();
        assert!(r.f1_star <= 2e-4, "{}", r.f1_star);
        assert!(r.interval_structure);
    }

    #[test]
    fn full_phase_one_is_feasible() {
        let t = translation_t_tensor::<f64>();
        let r = feasibility_interval(&Matrix3::identity().scale(3.0), &t, 3.0, 1.0, &ScanOptions::default()).unwrap();
        assert_eq!(r.f1_star, 1.0);
    }

    #[test]
    fn hashin_shtrikman_data_hits_truth() {
        let t = translation_t_tensor::<f64>();
        for &f in &[0.1, 0.4, 0.8] {
            let hs = hashin_shtrikman_lower(f, 4.0, 1.0);
            let r = feasibility_interval(&Matrix3::identity().scale(hs), &t, 4.0, 1.0, &ScanOptions::default()).unwrap();
            let ub = upper_bound_trace([hs; 3], &t, 4.0, 1.0).unwrap().value;
            assert!(r.f1_star <= ub + 1e-6);
            assert!((r.f1_star - f).abs() < 2e-4, "{} vs {f}", r.f1_star);
        }
    }

    #[test]
    fn infeasible_origin_is_an_error() {
        let t = translation_t_tensor::<f64>();
        let r = feasibility_interval(&Matrix3::identity().scale(0.5), &t, 3.0, 1.0, &ScanOptions::default());
        assert!(matches!(r, Err(Error::DataInconsistency(_))));
    }
}
