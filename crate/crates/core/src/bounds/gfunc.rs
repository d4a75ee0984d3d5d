use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftNum, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::pde::{gauss_legendre, FluxPotentials, Grid, NeumannData};
use crate::tensor::{t_prime_form, translation_t_prime, Matrix3};
use crate::{Error, Real, Result};

/// Where a value of the g-functional came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GSource {
    SpecialNeumann,
    Potentials,
    /// Lower bound from a caller-supplied exterior field.
    UserExterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GValue<T> {
    pub value: T,
    pub source: GSource,
    /// False when `value` is only a lower bound `g⁻ ≤ g`.
    pub exact: bool,
}

/// `g` for `q = −n`.
pub fn g_special_neumann<T: Real>() -> GValue<T> {
    GValue { value: T::lit(-3.0), source: GSource::SpecialNeumann, exact: true }
}

/// Largest pointwise flux mismatch accepted by [`g_from_potentials`],
/// relative to the largest flux magnitude.
pub const GENERATOR_TOLERANCE: f64 = 1e-10;

/// `g = (1/|Ω|)∮ −[xᵀ𝕋′J⁰ + 2∇α]·q`, for fluxes generated by `potentials`.
///
/// `data` is checked against the generators at every face quadrature point.
pub fn g_from_potentials<T: Real>(potentials: &FluxPotentials<T>, data: &NeumannData<T>, grid: &Grid<T>) -> Result<GValue<T>> {
    let faces = grid.boundary_faces();
    if let NeumannData::FaceValues(v) = data {
        if v.len() != faces.len() {
            return Err(Error::GridMismatch(format!("{} face values for {} boundary faces", v.len(), faces.len())));
        }
    }
    let gp = gauss_legendre::<T>(data.quadrature_order());
    let (mut worst, mut scale) = (T::zero(), T::zero());
    for (fi, face) in faces.iter().enumerate() {
        for &(s, _) in &gp {
            for &(t, _) in &gp {
                let x = face.point(s, t);
                let q = data.flux_at(fi, face, x);
                let p = potentials.flux(x, face.normal());
                for l in 0..3 {
                    worst = worst.max((q[l] - p[l]).abs());
                    scale = scale.max(q[l].abs());
                }
            }
        }
    }
    if worst > T::lit(GENERATOR_TOLERANCE) * scale.max(T::one()) {
        return Err(Error::InvalidInput(format!(
            "boundary flux is not generated by the given potentials (mismatch {:e})", worst.as_f64()
        )));
    }

    let tj = translation_t_prime(&potentials.j0);
    let integral = data.surface_integral(grid, |x, _| {
        let ga = potentials.alpha.gradient(x);
        [0, 1, 2].map(|l| {
            let xt: T = (0..3).map(|k| x[k] * tj[(k, l)]).sum();
            -(xt + T::lit(2.0) * ga[l])
        })
    })?;
    let source = if matches!(data, NeumannData::Special) { GSource::SpecialNeumann } else { GSource::Potentials };
    Ok(GValue { value: integral / grid.volume(), source, exact: true })
}

/// Exact `g` when the data carry their generating potentials.
pub fn g_exact<T: Real>(data: &NeumannData<T>, grid: &Grid<T>) -> Result<GValue<T>> {
    match data {
        NeumannData::Special => g_from_potentials(&FluxPotentials::uniform(Matrix3::identity()), data, grid),
        NeumannData::Potentials(p) => g_from_potentials(p, data, grid),
        NeumannData::FaceValues(_) => Err(Error::InvalidInput(
            "g is unknown for raw face fluxes; supply generating potentials or an exterior field".into(),
        )),
    }
}

/// Lower bound `g⁻` from the moments of a divergence-free periodic field on
/// the exterior `Υ∖Ω` of the body within a cube `Υ`.
///
/// `mean_ext = ⟨J̲⟩_{Υ∖Ω}`, `form_mean_ext = ⟨Tr J̲ᵀ𝕋′J̲⟩_{Υ∖Ω}` and `p = |Ω|/|Υ|`.
pub fn g_lower_from_exterior<T: Real>(mean_ext: &Matrix3<T>, form_mean_ext: T, p: T) -> Result<GValue<T>> {
    if !(p > T::zero() && p <= T::one()) {
        return Err(Error::InvalidInput(format!("body fraction p = {p} outside (0, 1]")));
    }
    let q = T::one() - p;
    let mixed = Matrix3::identity().scale(p) + mean_ext.scale(q);
    let value = (t_prime_form(&mixed) - q * form_mean_ext) / p;
    Ok(GValue { value, source: GSource::UserExterior, exact: false })
}

/// Fluxes sampled on a flat face with normal `e₃`, on a periodic
/// `nx × ny` lattice of extent `lx × ly` (x fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSamples<T> {
    pub nx: usize,
    pub ny: usize,
    pub lx: T,
    pub ly: T,
    pub q: Vec<[T; 3]>,
}

/// Face potentials recovered from [`FaceSamples`], each with zero mean.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePotentials<T> {
    pub alpha: Vec<T>,
    pub alpha3: Vec<T>,
    pub beta: Vec<T>,
    /// Means removed from the three sources before solving.
    pub source_means: [T; 3],
}

struct Spectral<T: FftNum> {
    nx: usize,
    ny: usize,
    fx: Arc<dyn Fft<T>>,
    fy: Arc<dyn Fft<T>>,
    ix: Arc<dyn Fft<T>>,
    iy: Arc<dyn Fft<T>>,
    kx: Vec<T>,
    ky: Vec<T>,
}

fn wavenumbers<T: Real>(n: usize, len: T) -> Vec<T> {
    let two_pi = T::lit(2.0) * T::PI();
    (0..n)
        .map(|i| {
            if 2 * i <= n {
                two_pi * T::from_count(i) / len
            } else {
                -two_pi * T::from_count(n - i) / len
            }
        })
        .collect()
}

impl<T: Real + FftNum> Spectral<T> {
    fn new(nx: usize, ny: usize, lx: T, ly: T) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fx: planner.plan_fft_forward(nx),
            fy: planner.plan_fft_forward(ny),
            ix: planner.plan_fft_inverse(nx),
            iy: planner.plan_fft_inverse(ny),
            kx: wavenumbers(nx, lx),
            ky: wavenumbers(ny, ly),
        }
    }

    fn transform(&self, data: &mut [Complex<T>], forward: bool) {
        let (fx, fy) = if forward { (&self.fx, &self.fy) } else { (&self.ix, &self.iy) };
        for row in data.chunks_mut(self.nx) {
            fx.process(row);
        }
        let mut col = vec![Complex::new(T::zero(), T::zero()); self.ny];
        for i in 0..self.nx {
            for j in 0..self.ny {
                col[j] = data[i + self.nx * j];
            }
            fy.process(&mut col);
            for j in 0..self.ny {
                data[i + self.nx * j] = col[j];
            }
        }
        if !forward {
            let s = T::from_count(self.nx * self.ny).recip();
            data.iter_mut().for_each(|z| *z = *z * s);
        }
    }

    fn forward(&self, v: impl Iterator<Item = T>) -> Vec<Complex<T>> {
        let mut d: Vec<Complex<T>> = v.map(|x| Complex::new(x, T::zero())).collect();
        self.transform(&mut d, true);
        d
    }

    /// Solves `Δu = src` given the transformed source; returns `u` and the
    /// source mean.
    fn poisson(&self, mut src: Vec<Complex<T>>) -> (Vec<T>, T) {
        let mean = src[0].re / T::from_count(self.nx * self.ny);
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k2 = self.kx[i] * self.kx[i] + self.ky[j] * self.ky[j];
                let z = &mut src[i + self.nx * j];
                *z = if k2 > T::zero() { *z * (-k2.recip()) } else { Complex::new(T::zero(), T::zero()) };
            }
        }
        self.transform(&mut src, false);
        (src.into_iter().map(|z| z.re).collect(), mean)
    }

    /// Multiplies by `i k_axis`.
    fn derivative(&self, z: &[Complex<T>], axis: usize) -> Vec<Complex<T>> {
        let mut out = z.to_vec();
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = match axis {
                    0 if 2 * i != self.nx => self.kx[i],
                    1 if 2 * j != self.ny => self.ky[j],
                    _ => T::zero(),
                };
                let w = &mut out[i + self.nx * j];
                *w = Complex::new(-k * w.im, k * w.re);
            }
        }
        out
    }
}

/// Recovers `α`, `α₃ = ∂α/∂x₃` and `β` on a flat face from its fluxes by
/// solving the three periodic Poisson problems
/// `Δα = q₃ + J⁰₃₃`, `Δα₃ = −∂₁q₁ − ∂₂q₂`, `Δβ = ∂₁q₂ − ∂₂q₁`.
pub fn face_poisson_diagnostic<T: Real + FftNum>(face: &FaceSamples<T>, j0_33: T) -> Result<FacePotentials<T>> {
    let (nx, ny) = (face.nx, face.ny);
    if nx < 2 || ny < 2 || face.q.len() != nx * ny || !(face.lx > T::zero() && face.ly > T::zero()) {
        return Err(Error::InvalidInput("face samples need nx, ny ≥ 2, positive extent and nx·ny values".into()));
    }
    let sp = Spectral::new(nx, ny, face.lx, face.ly);
    let q = [0, 1, 2].map(|l| sp.forward(face.q.iter().map(|v| v[l])));

    let (alpha, m0) = sp.poisson(sp.forward(face.q.iter().map(|v| v[2] + j0_33)));
    let d1q1 = sp.derivative(&q[0], 0);
    let d2q2 = sp.derivative(&q[1], 1);
    let d1q2 = sp.derivative(&q[1], 0);
    let d2q1 = sp.derivative(&q[0], 1);
    let src3: Vec<_> = d1q1.iter().zip(&d2q2).map(|(a, b)| -(*a + *b)).collect();
    let srcb: Vec<_> = d1q2.iter().zip(&d2q1).map(|(a, b)| *a - *b).collect();
    let (alpha3, m1) = sp.poisson(src3);
    let (beta, m2) = sp.poisson(srcb);
    Ok(FacePotentials { alpha, alpha3, beta, source_means: [m0, m1, m2] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::{Series, SeriesTerm, Trig};

    fn grid(n: usize) -> Grid<f64> {
        Grid::from_extent([n; 3], [1.0; 3]).unwrap()
    }

    #[test]
    fn special_neumann_quadrature_is_minus_three() {
        for n in [8, 24] {
            let g = g_exact(&NeumannData::Special, &grid(n)).unwrap();
            assert!((g.value + 3.0).abs() < 1e-12, "{}", g.value);
            assert_eq!(g.source, GSource::SpecialNeumann);
        }
    }

    #[test]
    fn mismatched_generators_are_rejected() {
        let mut p = FluxPotentials::uniform(Matrix3::identity());
        p.j0[(0, 0)] = 2.0;
        assert!(matches!(g_from_potentials(&p, &NeumannData::Special, &grid(6)), Err(Error::InvalidInput(_))));
        assert!(g_exact(&NeumannData::FaceValues(vec![[0.0; 3]; 6 * 36]), &grid(6)).is_err());
    }

    #[test]
    fn exterior_bound_with_uniform_field() {
        let g = g_lower_from_exterior(&Matrix3::<f64>::identity(), -3.0, 0.3).unwrap();
        assert!((g.value + 3.0).abs() < 1e-12);
        assert!(!g.exact);
        assert!(g_lower_from_exterior(&Matrix3::identity(), -3.0, 0.0).is_err());
    }

    fn sample_face(n: usize, f: impl Fn(f64, f64) -> [f64; 3]) -> FaceSamples<f64> {
        let h = 1.0 / n as f64;
        let q = (0..n * n).map(|k| f((k % n) as f64 * h, (k / n) as f64 * h)).collect();
        FaceSamples { nx: n, ny: n, lx: 1.0, ly: 1.0, q }
    }

    #[test]
    fn constant_normal_flux_gives_zero_alpha() {
        let r = face_poisson_diagnostic(&sample_face(16, |_, _| [0.0, 0.0, -1.0]), 1.0).unwrap();
        assert!(r.alpha.iter().all(|a| a.abs() < 1e-14));
        assert!(r.source_means.iter().all(|m| m.abs() < 1e-14));
    }

    #[test]
    fn manufactured_beta_is_recovered() {
        let tp = 2.0 * std::f64::consts::PI;
        let beta = |x: f64, y: f64| (tp * x).sin() * (2.0 * tp * y).cos();
        let r = face_poisson_diagnostic(
            &sample_face(32, |x, y| {
                let d1 = tp * (tp * x).cos() * (2.0 * tp * y).cos();
                let d2 = -2.0 * tp * (tp * x).sin() * (2.0 * tp * y).sin();
                [-d2, d1, 0.0]
            }),
            0.0,
        )
        .unwrap();
        let h = 1.0 / 32.0;
        for (k, b) in r.beta.iter().enumerate() {
            assert!((b - beta((k % 32) as f64 * h, (k / 32) as f64 * h)).abs() < 1e-10);
        }
        assert!(r.alpha3.iter().all(|a| a.abs() < 1e-10));
    }

    #[test]
    fn generated_flux_round_trip_on_top_face() {
        let tp = 2.0 * std::f64::consts::PI;
        let trig2 = |c: f64, x3: u32, a: Trig<f64>, b: Trig<f64>| -> Series<f64> {
            Series {
                terms: vec![SeriesTerm { coeff: c, powers: [0, 0, x3], trig: [a, b, Trig::One] }],
            }
        };
        // α = 0.1 (1 + x₃) sin(2πx₁) cos(2πx₂), β = 0.2 cos(2πx₁) sin(4πx₂)
        let mut alpha = trig2(0.1, 0, Trig::Sin { k: tp }, Trig::Cos { k: tp });
        alpha.terms.extend(trig2(0.1, 1, Trig::Sin { k: tp }, Trig::Cos { k: tp }).terms);
        let beta = trig2(0.2, 0, Trig::Cos { k: tp }, Trig::Sin { k: 2.0 * tp });
        let p = FluxPotentials { alpha, beta, j0: Matrix3::identity() };
        let x3 = 0.5;
        let n = 32;
        let face = sample_face(n, |x, y| p.flux([x, y, x3], [0.0, 0.0, 1.0]));
        let r = face_poisson_diagnostic(&face, 1.0).unwrap();
        let h = 1.0 / n as f64;
        for k in 0..n * n {
            let x = [(k % n) as f64 * h, (k / n) as f64 * h, x3];
            let ga = p.alpha.gradient(x);
            assert!((r.alpha[k] - p.alpha.value(x)).abs() < 1e-10);
            assert!((r.alpha3[k] - ga[2]).abs() < 1e-10);
            assert!((r.beta[k] - p.beta.value(x)).abs() < 1e-10);
        }
    }
}
