use serde::{Deserialize, Serialize};

use super::grid::{FaceCell, Grid};
use crate::tensor::{levi_civita, Matrix3};
use crate::{Error, Real, Result};

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> Vec<(T, T)> {
    let raw: &[(f64, f64)] = match n {
        1 => &[(0.0, 2.0)],
        2 => &[(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)],
        3 => &[
            (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
            (0.0, 0.888_888_888_888_888_9),
            (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
        ],
        4 => &[
            (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
            (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
            (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        ],
        _ => &[
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.0, 0.568_888_888_888_888_9),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ],
    };
    raw.iter()
        .map(|&(x, w)| (T::lit(0.5 * (x + 1.0)), T::lit(0.5 * w)))
        .collect()
}

/// One-dimensional trigonometric factor of a series term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trig<T> {
    #[default]
    One,
    Sin { k: T },
    Cos { k: T },
}

impl<T: Real> Trig<T> {
    /// Value, first and second derivative at `x`.
    fn eval(&self, x: T) -> [T; 3] {
        match *self {
            Trig::One => [T::one(), T::zero(), T::zero()],
            Trig::Sin { k } => {
                let (s, c) = (k * x).sin_cos();
                [s, k * c, -k * k * s]
            }
            Trig::Cos { k } => {
                let (s, c) = (k * x).sin_cos();
                [c, -k * s, -k * k * c]
            }
        }
    }
}

/// `coeff · Π_a x_a^{p_a} · trig_a(x_a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct SeriesTerm<T> {
    pub coeff: T,
    #[serde(default)]
    pub powers: [u32; 3],
    #[serde(default)]
    pub trig: [Trig<T>; 3],
}

impl<T: Real> SeriesTerm<T> {
    pub fn monomial(coeff: T, powers: [u32; 3]) -> Self {
        Self { coeff, powers, trig: [Trig::One; 3] }
    }

    fn axis_factor(&self, a: usize, x: T) -> [T; 3] {
        let p = self.powers[a] as i32;
        let t = self.trig[a].eval(x);
        let pw = |e: i32| if e < 0 { T::zero() } else { x.powi(e) };
        let pf = T::from_count(p as usize);
        let m0 = pw(p);
        let m1 = pf * pw(p - 1);
        let m2 = pf * (pf - T::one()) * pw(p - 2);
        [
            m0 * t[0],
            m1 * t[0] + m0 * t[1],
            m2 * t[0] + T::lit(2.0) * m1 * t[1] + m0 * t[2],
        ]
    }
}

/// Scalar field given as a finite sum of [`SeriesTerm`]s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent, bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct Series<T> {
    pub terms: Vec<SeriesTerm<T>>,
}

impl<T: Real> Series<T> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(axis: usize) -> Self {
        let mut p = [0; 3];
        p[axis] = 1;
        Self { terms: vec![SeriesTerm::monomial(T::one(), p)] }
    }

    /// `Σ_k b_k x_k`.
    pub fn linear(b: [T; 3]) -> Self {
        let terms = (0..3)
            .filter(|&k| b[k] != T::zero())
            .map(|k| {
                let mut p = [0; 3];
                p[k] = 1;
                SeriesTerm::monomial(b[k], p)
            })
            .collect();
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == T::zero())
    }

    pub fn value(&self, x: [T; 3]) -> T {
        self.terms
            .iter()
            .map(|t| {
                let f = [0, 1, 2].map(|a| t.axis_factor(a, x[a]));
                t.coeff * f[0][0] * f[1][0] * f[2][0]
            })
            .sum()
    }

    pub fn gradient(&self, x: [T; 3]) -> [T; 3] {
        let mut g = [T::zero(); 3];
        for t in &self.terms {
            let f = [0, 1, 2].map(|a| t.axis_factor(a, x[a]));
            g[0] += t.coeff * f[0][1] * f[1][0] * f[2][0];
            g[1] += t.coeff * f[0][0] * f[1][1] * f[2][0];
            g[2] += t.coeff * f[0][0] * f[1][0] * f[2][1];
        }
        g
    }

    pub fn hessian(&self, x: [T; 3]) -> Matrix3<T> {
        let mut h = Matrix3::zeros();
        for t in &self.terms {
            let f = [0, 1, 2].map(|a| t.axis_factor(a, x[a]));
            for i in 0..3 {
                for j in 0..3 {
                    let d = |a: usize| usize::from(a == i) + usize::from(a == j);
                    h[(i, j)] += t.coeff * f[0][d(0)] * f[1][d(1)] * f[2][d(2)];
                }
            }
        }
        h
    }
}

/// Divergence-free flux field built from two scalar potentials,
/// `J̲_kl = J⁰_kl + ∂_k∂_l α − δ_kl Δα + ε_klm ∂_m β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Deserialize<'de> + Default"))]
pub struct FluxPotentials<T> {
    #[serde(default)]
    pub alpha: Series<T>,
    #[serde(default)]
    pub beta: Series<T>,
    pub j0: Matrix3<T>,
}

impl<T: Real> FluxPotentials<T> {
    pub fn uniform(j0: Matrix3<T>) -> Self {
        Self { alpha: Series::zero(), beta: Series::zero(), j0 }
    }

    pub fn field(&self, x: [T; 3]) -> Matrix3<T> {
        let h = self.alpha.hessian(x);
        let lap = h.trace();
        let gb = self.beta.gradient(x);
        Matrix3::from_fn(|k, l| {
            let mut v = self.j0[(k, l)] + h[(k, l)];
            if k == l {
                v -= lap;
            }
            for (m, &g) in gb.iter().enumerate() {
                v += levi_civita::<T>(k, l, m) * g;
            }
            v
        })
    }

    /// Boundary flux `q_l = −n_k J̲_kl`.
    pub fn flux(&self, x: [T; 3], n: [T; 3]) -> [T; 3] {
        let j = self.field(x);
        [0, 1, 2].map(|l| -(0..3).map(|k| n[k] * j[(k, l)]).sum::<T>())
    }
}

/// Prescribed boundary potentials for the three measurements.
#[derive(Debug, Clone, PartialEq)]
pub enum DirichletData<T> {
    /// `V_i(x) = Σ_k x_k B_ki`.
    Affine(Matrix3<T>),
    Expr([Series<T>; 3]),
    /// Values at every node; only boundary entries are imposed, interior
    /// entries serve as the initial guess.
    Nodal([Vec<T>; 3]),
}

impl<T: Real> DirichletData<T> {
    pub fn value(&self, i: usize, x: [T; 3]) -> Option<T> {
        match self {
            DirichletData::Affine(b) => Some((0..3).map(|k| x[k] * b[(k, i)]).sum()),
            DirichletData::Expr(s) => Some(s[i].value(x)),
            DirichletData::Nodal(_) => None,
        }
    }

    /// Nodal extension of the data to the whole grid.
    pub fn nodal_values(&self, grid: &Grid<T>) -> Result<[Vec<T>; 3]> {
        if let DirichletData::Nodal(v) = self {
            if v.iter().any(|c| c.len() != grid.n_nodes()) {
                return Err(Error::GridMismatch("nodal dirichlet data has wrong length".into()));
            }
            return Ok(v.clone());
        }
        let pos: Vec<[T; 3]> = (0..grid.n_nodes()).map(|n| grid.node_position(n)).collect();
        Ok([0, 1, 2].map(|i| pos.iter().map(|&x| self.value(i, x).unwrap_or_default()).collect()))
    }
}

/// Prescribed normal current densities for the three measurements, with
/// `n·j_l = −q_l` on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum NeumannData<T> {
    /// `q = −n`.
    Special,
    Potentials(FluxPotentials<T>),
    /// One value per boundary face cell, in [`Grid::boundary_faces`] order.
    FaceValues(Vec<[T; 3]>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryData<T> {
    Dirichlet(DirichletData<T>),
    Neumann(NeumannData<T>),
}

/// Neumann data generated by flux potentials.
pub fn flux_from_potentials<T: Real>(alpha: Series<T>, beta: Series<T>, j0: Matrix3<T>) -> BoundaryData<T> {
    BoundaryData::Neumann(NeumannData::Potentials(FluxPotentials { alpha, beta, j0 }))
}

/// Consistent nodal load `F_b(l) = ∮ q_l φ_b` and its net flux per component.
#[derive(Debug, Clone)]
pub struct NeumannLoad<T> {
    pub load: [Vec<T>; 3],
    pub net_flux: [T; 3],
    pub total_abs_flux: [T; 3],
}

const POTENTIAL_QUADRATURE: usize = 4;

impl<T: Real> NeumannData<T> {
    /// Boundary flux at `x` on `face`, evaluated pointwise.
    pub(crate) fn flux_at(&self, face_index: usize, face: &FaceCell<T>, x: [T; 3]) -> [T; 3] {
        match self {
            NeumannData::Special => face.normal().map(|v| -v),
            NeumannData::Potentials(p) => p.flux(x, face.normal()),
            NeumannData::FaceValues(v) => v[face_index],
        }
    }

    pub(crate) fn quadrature_order(&self) -> usize {
        match self {
            NeumannData::Potentials(_) => POTENTIAL_QUADRATURE,
            _ => 2,
        }
    }

    /// Integrates `∮ w(x) · q(x)` componentwise with the same face quadrature
    /// used for the load.
    pub fn surface_integral(&self, grid: &Grid<T>, mut w: impl FnMut([T; 3], &FaceCell<T>) -> [T; 3]) -> Result<T> {
        let faces = grid.boundary_faces();
        self.check_faces(faces.len())?;
        let gp = gauss_legendre::<T>(self.quadrature_order());
        let mut total = T::zero();
        for (fi, face) in faces.iter().enumerate() {
            let area = face.area();
            for &(s, ws) in &gp {
                for &(t, wt) in &gp {
                    let x = face.point(s, t);
                    let q = self.flux_at(fi, face, x);
                    let wx = w(x, face);
                    total += area * ws * wt * (0..3).map(|l| wx[l] * q[l]).sum::<T>();
                }
            }
        }
        Ok(total)
    }

    fn check_faces(&self, n: usize) -> Result<()> {
        if let NeumannData::FaceValues(v) = self {
            if v.len() != n {
                return Err(Error::GridMismatch(format!("{} face values for {n} boundary faces", v.len())));
            }
        }
        Ok(())
    }

    pub fn assemble_load(&self, grid: &Grid<T>) -> Result<NeumannLoad<T>> {
        let faces = grid.boundary_faces();
        self.check_faces(faces.len())?;
        let gp = gauss_legendre::<T>(self.quadrature_order());
        let nn = grid.n_nodes();
        let mut load = [vec![T::zero(); nn], vec![T::zero(); nn], vec![T::zero(); nn]];
        let mut net = [T::zero(); 3];
        let mut abs = [T::zero(); 3];
        for (fi, face) in faces.iter().enumerate() {
            let area = face.area();
            for &(s, ws) in &gp {
                for &(t, wt) in &gp {
                    let w = area * ws * wt;
                    let q = self.flux_at(fi, face, face.point(s, t));
                    let phi = FaceCell::<T>::shape(s, t);
                    for l in 0..3 {
                        net[l] += w * q[l];
                        abs[l] += w * q[l].abs();
                        for a in 0..4 {
                            load[l][face.nodes[a]] += w * phi[a] * q[l];
                        }
                    }
                }
            }
        }
        Ok(NeumannLoad { load, net_flux: net, total_abs_flux: abs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_series() -> Series<f64> {
        Series {
            terms: vec![
                SeriesTerm { coeff: 0.7, powers: [2, 0, 1], trig: [Trig::One, Trig::Sin { k: 3.0 }, Trig::One] },
                SeriesTerm { coeff: -0.2, powers: [0, 1, 0], trig: [Trig::Cos { k: 2.0 }, Trig::One, Trig::Sin { k: 1.5 }] },
            ],
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let s = sample_series();
        let x = [0.3, -0.2, 0.45];
        let h = 1e-5;
        let g = s.gradient(x);
        let hs = s.hessian(x);
        for a in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[a] += h;
            xm[a] -= h;
            let fd = (s.value(xp) - s.value(xm)) / (2.0 * h);
            assert!((fd - g[a]).abs() < 1e-8);
            let gp = s.gradient(xp);
            let gm = s.gradient(xm);
            for b in 0..3 {
                assert!(((gp[b] - gm[b]) / (2.0 * h) - hs[(a, b)]).abs() < 1e-7);
            }
        }
        assert!(hs.asymmetry() < 1e-14);
    }

    #[test]
    fn gauss_rules_integrate_polynomials() {
        for n in 1..=5 {
            let gp = gauss_legendre::<f64>(n);
            for p in 0..(2 * n) {
                let v: f64 = gp.iter().map(|&(x, w)| w * x.powi(p as i32)).sum();
                assert!((v - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn special_flux_is_minus_normal() {
        let p = FluxPotentials::uniform(Matrix3::<f64>::identity());
        assert_eq!(p.flux([0.1, 0.2, 0.3], [0.0, 0.0, 1.0]), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn potential_flux_is_compatible() {
        let g = Grid::<f64>::from_extent([6, 5, 7], [1.0, 0.8, 1.2]).unwrap();
        let data = NeumannData::Potentials(FluxPotentials {
            alpha: sample_series(),
            beta: Series { terms: vec![SeriesTerm { coeff: 0.3, powers: [1, 1, 0], trig: [Trig::One, Trig::One, Trig::Cos { k: 2.0 }] }] },
            j0: Matrix3([[1.0, 0.2, 0.0], [0.0, 0.8, -0.1], [0.3, 0.0, 1.1]]),
        });
        let load = data.assemble_load(&g).unwrap();
        for l in 0..3 {
            assert!(load.net_flux[l].abs() < 1e-5 * load.total_abs_flux[l], "{:?}", load.net_flux);
            let s: f64 = load.load[l].iter().sum();
            assert!((s - load.net_flux[l]).abs() < 1e-13);
        }
    }
}
