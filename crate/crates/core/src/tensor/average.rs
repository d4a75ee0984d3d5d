//! Two-phase averages of translated tensors and their singular `c → σ₂` limit.

use serde::{Deserialize, Serialize};

use super::translation::{assemble_lc, Positivity};
use super::Tensor4;
use crate::{Error, Real, Result};

/// Volume fractions and conductivities of a two-phase body.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseAverage<T> {
    pub f1: T,
    pub sigma1: T,
    pub sigma2: T,
}

impl<T: Real> PhaseAverage<T> {
    /// Validates `0 ≤ f1 ≤ 1` and `σ₁ > σ₂ > 0`.
    pub fn new(f1: T, sigma1: T, sigma2: T) -> Result<Self> {
        if !(f1 >= T::zero() && f1 <= T::one()) {
            return Err(Error::InvalidInput(format!("volume fraction {f1} outside [0, 1]")));
        }
        check_conductivities(sigma1, sigma2)?;
        Ok(Self { f1, sigma1, sigma2 })
    }

    pub fn f2(&self) -> T {
        T::one() - self.f1
    }
}

pub(crate) fn check_conductivities<T: Real>(sigma1: T, sigma2: T) -> Result<()> {
    if !(sigma2 > T::zero() && sigma1 > sigma2 && sigma1.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "conductivities must satisfy sigma1 > sigma2 > 0 (got {sigma1}, {sigma2})"
        )));
    }
    Ok(())
}

/// `⟨L_c⁻¹⟩⁻¹ = (f₁ L_c(σ₁)⁻¹ + f₂ L_c(σ₂)⁻¹)⁻¹` in the standard basis.
///
/// Requires `−σ₂/2 < c < σ₂`; at `c = σ₂` the phase-2 tensor is singular.
pub fn two_phase_inverse_average<T: Real>(pa: &PhaseAverage<T>, c: T) -> Result<Tensor4<T>> {
    if c >= pa.sigma2 {
        return Err(Error::SingularAverage {
            c: c.as_f64(),
            sigma2: pa.sigma2.as_f64(),
        });
    }
    let l1 = assemble_lc(pa.sigma1, c, Positivity::Require)?;
    let l2 = assemble_lc(pa.sigma2, c, Positivity::Require)?;
    let singular = || Error::SingularAverage {
        c: c.as_f64(),
        sigma2: pa.sigma2.as_f64(),
    };
    let mut avg = Tensor4::zeros();
    if pa.f1 > T::zero() {
        avg = avg + l1.inverse().ok_or_else(singular)?.scale(pa.f1);
    }
    if pa.f2() > T::zero() {
        avg = avg + l2.inverse().ok_or_else(singular)?.scale(pa.f2());
    }
    avg.inverse().ok_or_else(singular)
}

/// Exponents `k` of the extrapolation schedule `c = σ₂(1 − 10⁻ᵏ)`.
pub const LIMIT_SCHEDULE: [i32; 5] = [4, 5, 6, 7, 8];

/// The `c → σ₂` limit of `⟨L_c⁻¹⟩⁻¹`, with the closed form kept alongside.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct LimitTensor<T> {
    /// Extrapolated limit (standard basis). This is the value used downstream.
    pub numeric: Tensor4<T>,
    /// Closed form `a·ones ⊕ b[[1,−1],[−1,1]]` with `b = σ₂/f₁` (permuted
    /// layout, stored in the standard basis). `None` when `f₁ = 0`.
    pub closed_form: Option<Tensor4<T>>,
    /// `a = (f₂/σ₂ + 3f₁/(2σ₂+σ₁))⁻¹`.
    pub a_closed: T,
    /// `b = σ₂/f₁`; `None` when `f₁ = 0`.
    pub b_closed: Option<T>,
    /// Leading-block coefficient read off the numeric limit.
    pub a_numeric: T,
    /// Pair-block coefficient read off the numeric limit.
    pub b_numeric: T,
    /// `max |numeric − closed_form|`, when the closed form exists.
    pub discrepancy: Option<T>,
    /// Relative change between extrapolations over the full schedule and the
    /// schedule without its last point.
    pub richardson_consistency: T,
    /// Set when `f₁ = 0`: the result is the `f₁ → 0⁺` limit `L_{σ₂}(σ₂)`.
    pub degenerate: bool,
}

/// Neville extrapolation of samples `(h_k, y_k)` to `h = 0`.
fn extrapolate_to_zero<T: Real>(h: &[T], y: &[T]) -> T {
    let mut p = y.to_vec();
    let n = h.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
        }
    }
    p[0]
}

fn extrapolate_tensor<T: Real>(h: &[T], samples: &[Tensor4<T>]) -> Tensor4<T> {
    let mut e = [[T::zero(); 9]; 9];
    for (p, row) in e.iter_mut().enumerate() {
        for (q, x) in row.iter_mut().enumerate() {
            let ys: Vec<T> = samples.iter().map(|s| s.matrix()[p][q]).collect();
            *x = extrapolate_to_zero(h, &ys);
        }
    }
    Tensor4::from_matrix(e)
}

/// Closed-form limit for given block coefficients, in the standard basis.
pub fn block_limit_form<T: Real>(a: T, b: T) -> Tensor4<T> {
    let mut e = [[T::zero(); 9]; 9];
    for row in e.iter_mut().take(3) {
        for x in row.iter_mut().take(3) {
            *x = a;
        }
    }
    for blk in 0..3 {
        let p = 3 + 2 * blk;
        e[p][p] = b;
        e[p + 1][p + 1] = b;
        e[p][p + 1] = -b;
        e[p + 1][p] = -b;
    }
    Tensor4::from_permuted_matrix(e).to_standard()
}

/// Computes `lim_{c→σ₂} ⟨L_c⁻¹⟩⁻¹` by extrapolating along
/// `c = σ₂(1 − 10⁻ᵏ)`, `k` in [`LIMIT_SCHEDULE`], which is smooth in `σ₂ − c`.
pub fn limit_tensor<T: Real>(pa: &PhaseAverage<T>) -> Result<LimitTensor<T>> {
    limit_tensor_with(pa, &LIMIT_SCHEDULE)
}

/// [`limit_tensor`] with a caller-chosen exponent schedule (at least two
/// distinct exponents).
pub fn limit_tensor_with<T: Real>(pa: &PhaseAverage<T>, exponents: &[i32]) -> Result<LimitTensor<T>> {
    let mut sorted = exponents.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 2 || sorted.len() != exponents.len() || sorted[0] < 1 {
        return Err(Error::InvalidInput(format!("limit schedule {exponents:?} needs ≥ 2 distinct positive exponents")));
    }
    let (s1, s2, f1, f2) = (pa.sigma1, pa.sigma2, pa.f1, pa.f2());
    let a_closed = (f2 / s2 + T::lit(3.0) * f1 / (T::lit(2.0) * s2 + s1)).recip();

    if f1 == T::zero() {
        let numeric = assemble_lc(s2, s2, Positivity::Allow)?;
        let blocks = numeric.to_permuted();
        return Ok(LimitTensor {
            numeric,
            closed_form: None,
            a_closed,
            b_closed: None,
            a_numeric: blocks.matrix()[0][0],
            b_numeric: blocks.matrix()[3][3],
            discrepancy: None,
            richardson_consistency: T::zero(),
            degenerate: true,
        });
    }

    let mut hs = Vec::with_capacity(exponents.len());
    let mut samples = Vec::with_capacity(exponents.len());
    for &k in exponents {
        let h = s2 * T::lit(10f64.powi(-k));
        samples.push(two_phase_inverse_average(pa, s2 - h)?);
        hs.push(h);
    }
    let numeric = extrapolate_tensor(&hs, &samples);
    let shorter = extrapolate_tensor(&hs[..hs.len() - 1], &samples[..samples.len() - 1]);
    let scale = numeric.max_abs().max(T::min_positive_value());
    let richardson_consistency = numeric.max_abs_diff(&shorter) / scale;

    let b_closed = s2 / f1;
    let closed_form = block_limit_form(a_closed, b_closed);
    let blocks = numeric.to_permuted();
    let bm = blocks.matrix();
    let a_numeric = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| bm[i][j]).sum::<T>()
        / T::lit(9.0);
    let b_numeric = (0..3).map(|k| bm[3 + 2 * k][3 + 2 * k]).sum::<T>() / T::lit(3.0);

    Ok(LimitTensor {
        discrepancy: Some(numeric.max_abs_diff(&closed_form)),
        numeric,
        closed_form: Some(closed_form),
        a_closed,
        b_closed: Some(b_closed),
        a_numeric,
        b_numeric,
        richardson_consistency,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::translation::projector_tensors;

    fn pa(f1: f64, s1: f64, s2: f64) -> PhaseAverage<f64> {
        PhaseAverage::new(f1, s1, s2).unwrap()
    }

    /// Isotropic spectral form: every `L_c` is `(σ+2c)Λ_h + (σ−c)Λ_s + (σ+c)Λ_a`,
    /// so the inverse average is the componentwise harmonic mean.
    fn spectral_oracle(p: &PhaseAverage<f64>, c: f64) -> Tensor4<f64> {
        let hm = |g: &dyn Fn(f64) -> f64| 1.0 / (p.f1 / g(p.sigma1) + p.f2() / g(p.sigma2));
        let (h, s, a) = projector_tensors::<f64>();
        h.scale(hm(&|x| x + 2.0 * c)) + s.scale(hm(&|x| x - c)) + a.scale(hm(&|x| x + c))
    }

    #[test]
    fn single_phase_returns_lc() {
        let p = pa(1.0, 3.0, 1.0);
        let t = two_phase_inverse_average(&p, 0.4).unwrap();
        let l = assemble_lc(3.0, 0.4, Positivity::Require).unwrap();
        assert!(t.max_abs_diff(&l) < 1e-13);
    }

    #[test]
    fn zero_translation_is_harmonic_mean() {
        let p = pa(0.3, 4.0, 1.0);
        let t = two_phase_inverse_average(&p, 0.0).unwrap();
        let hm = 1.0 / (0.3 / 4.0 + 0.7 / 1.0);
        assert!(t.max_abs_diff(&Tensor4::identity().scale(hm)) < 1e-13);
    }

    #[test]
    fn pair_block_near_singular() {
        // direct 2×2 arithmetic: block [[σ,−c],[−c,σ]] has eigenvalues σ∓c on (1,±1)/√2
        let (f1, s1, s2, c) = (0.5, 2.0, 1.0, 0.99);
        let hm = |g: fn(f64, f64) -> f64| 1.0 / (f1 / g(s1, c) + (1.0 - f1) / g(s2, c));
        let plus = hm(|s, c| s + c); // antisymmetric direction (1,−1)
        let minus = hm(|s, c| s - c); // symmetric direction (1,1)
        let diag = 0.5 * (plus + minus);
        let off = 0.5 * (minus - plus);
        assert!((diag - 1.2047).abs() < 5e-5 && (off + 1.1849).abs() < 5e-5);

        let t = two_phase_inverse_average(&pa(f1, s1, s2), c).unwrap().to_permuted();
        let m = t.matrix();
        assert!((m[3][3] - diag).abs() < 1e-12);
        assert!((m[3][4] - off).abs() < 1e-12);
    }

    #[test]
    fn matches_spectral_oracle() {
        for &(f1, s1, s2, c) in &[(0.2, 5.0, 1.0, 0.5), (0.7, 2.0, 1.5, -0.3), (0.5, 10.0, 2.0, 1.9)] {
            let p = pa(f1, s1, s2);
            let t = two_phase_inverse_average(&p, c).unwrap();
            assert!(t.max_abs_diff(&spectral_oracle(&p, c)) < 1e-10);
        }
    }

    #[test]
    fn singular_at_sigma2() {
        let err = two_phase_inverse_average(&pa(0.5, 2.0, 1.0), 1.0).unwrap_err();
        assert!(matches!(err, Error::SingularAverage { .. }));
    }

    #[test]
    fn limit_coefficients() {
        let lim = limit_tensor(&pa(0.5, 2.0, 1.0)).unwrap();
        assert!((lim.a_closed - 8.0 / 7.0).abs() < 1e-14);
        assert!((lim.a_numeric - 8.0 / 7.0).abs() < 1e-7);
        assert_eq!(lim.b_closed, Some(2.0));
        // (2f₁/(σ₁+σ₂) + f₂/σ₂)⁻¹
        assert!((lim.b_numeric - 1.2).abs() < 1e-7);
        assert!(lim.discrepancy.unwrap() > 0.5);
        assert!(lim.richardson_consistency < 1e-6);
    }

    #[test]
    fn limit_full_phase_one_is_lc_of_sigma1() {
        let lim = limit_tensor(&pa(1.0, 3.0, 1.0)).unwrap();
        let l = assemble_lc(3.0, 1.0, Positivity::Allow).unwrap();
        assert!(lim.numeric.max_abs_diff(&l) < 1e-8);
    }

    #[test]
    fn limit_at_zero_fraction_is_flagged() {
        let lim = limit_tensor(&pa(0.0, 3.0, 1.0)).unwrap();
        assert!(lim.degenerate);
        assert!(lim.b_closed.is_none());
        let near = limit_tensor(&pa(1e-9, 3.0, 1.0)).unwrap();
        assert!(near.numeric.max_abs_diff(&lim.numeric) < 1e-6);
    }

    #[test]
    fn a_exceeds_sigma2() {
        for k in 1..=10 {
            let f1 = k as f64 / 10.0;
            let lim = limit_tensor(&pa(f1, 4.0, 1.5)).unwrap();
            assert!(lim.a_closed > 1.5);
        }
    }

    #[test]
    fn limit_monotone_in_volume_fraction() {
        let mut prev = limit_tensor(&pa(0.0, 5.0, 1.0)).unwrap().numeric;
        for k in 1..=20 {
            let cur = limit_tensor(&pa(k as f64 / 20.0, 5.0, 1.0)).unwrap().numeric;
            assert!((cur - prev).symmetrize().min_eigenvalue() > -1e-7);
            prev = cur;
        }
    }

    #[test]
    fn deviatoric_part_decreases_with_translation() {
        // The inverse average is not Loewner-monotone in c as a whole: the Λ_h and
        // Λ_a coefficients grow with c. Its Λ_s part is the one that decreases.
        let p = pa(0.4, 3.0, 1.0);
        let (h, s, a) = projector_tensors::<f64>();
        let restrict = |t: &Tensor4<f64>, proj: &Tensor4<f64>| {
            let pm = proj.matrix();
            let tm = t.matrix();
            let mut out = [[0.0; 9]; 9];
            for i in 0..9 {
                for j in 0..9 {
                    for k in 0..9 {
                        for l in 0..9 {
                            out[i][l] += pm[i][j] * tm[j][k] * pm[k][l];
                        }
                    }
                }
            }
            Tensor4::from_matrix(out)
        };
        let grid: Vec<f64> = (0..20).map(|k| 0.99 * k as f64 / 19.0).collect();
        for w in grid.windows(2) {
            let t0 = two_phase_inverse_average(&p, w[0]).unwrap();
            let t1 = two_phase_inverse_average(&p, w[1]).unwrap();
            let d = t0 - t1;
            assert!(restrict(&d, &s).symmetrize().min_eigenvalue() > -1e-12);
            assert!(restrict(&d, &h).symmetrize().eigenvalues()[0] < 1e-12);
            assert!(restrict(&d, &a).symmetrize().eigenvalues()[0] < 1e-12);
        }
    }
}
