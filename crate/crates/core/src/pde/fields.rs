use rayon::prelude::*;

use super::grid::{FaceCell, Grid};
use super::solver::PotentialSet;
use crate::tensor::{translation_t, Matrix3, Tensor4};
use crate::{Error, Real, Result};

/// Per-cell 3×3 matrix field; column `i` belongs to measurement `i`.
#[derive(Debug, Clone)]
pub struct FieldMatrix<T> {
    grid: Grid<T>,
    values: Vec<Matrix3<T>>,
}

impl<T: Real> FieldMatrix<T> {
    pub fn new(grid: Grid<T>, values: Vec<Matrix3<T>>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::GridMismatch(format!("{} matrices for {} cells", values.len(), grid.n_cells())));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Matrix3<T>] {
        &self.values
    }

    pub fn get(&self, c: usize) -> &Matrix3<T> {
        &self.values[c]
    }

    pub fn mean(&self) -> Matrix3<T> {
        sum_matrices(&self.values).scale(T::one() / T::from_count(self.values.len()))
    }
}

fn sum_matrices<T: Real>(m: &[Matrix3<T>]) -> Matrix3<T> {
    m.iter().fold(Matrix3::zeros(), |acc, &x| acc + x)
}

const GAUSS_2: f64 = 0.211_324_865_405_187_1;

fn gauss_points<T: Real>() -> [[T; 3]; 8] {
    let g = [T::lit(GAUSS_2), T::one() - T::lit(GAUSS_2)];
    std::array::from_fn(|a| [g[a & 1], g[(a >> 1) & 1], g[(a >> 2) & 1]])
}

/// `G_ki = ∂_k V_i` at local coordinates `t ∈ [0,1]³` of cell `c`.
pub fn cell_gradient<T: Real>(v: &PotentialSet<T>, c: usize, t: [T; 3]) -> Matrix3<T> {
    let grid = v.grid();
    let nodes = grid.cell_nodes(c);
    let one = T::one();
    let l = |b: usize, s: T| if b == 0 { one - s } else { s };
    let dl = |b: usize| if b == 0 { -one } else { one };
    let mut dn = [[T::zero(); 3]; 8];
    for (a, d) in dn.iter_mut().enumerate() {
        let (bx, by, bz) = (a & 1, (a >> 1) & 1, (a >> 2) & 1);
        d[0] = dl(bx) * l(by, t[1]) * l(bz, t[2]) / grid.spacing[0];
        d[1] = l(bx, t[0]) * dl(by) * l(bz, t[2]) / grid.spacing[1];
        d[2] = l(bx, t[0]) * l(by, t[1]) * dl(bz) / grid.spacing[2];
    }
    Matrix3::from_fn(|k, i| {
        let vi = v.values(i);
        (0..8).map(|a| dn[a][k] * vi[nodes[a]]).sum()
    })
}

/// Volume average of `f(cell, σ, G)` with 2×2×2 Gauss quadrature per cell,
/// reduced in a fixed order.
pub fn volume_average<T: Real, F>(v: &PotentialSet<T>, f: F) -> Matrix3<T>
where
    F: Fn(usize, T, &Matrix3<T>) -> Matrix3<T> + Sync,
{
    let grid = *v.grid();
    let plane = grid.dims[0] * grid.dims[1];
    let pts = gauss_points::<T>();
    let w = T::lit(0.125);
    let partial: Vec<Matrix3<T>> = (0..grid.dims[2])
        .into_par_iter()
        .map(|k| {
            let mut acc = Matrix3::zeros();
            for c in k * plane..(k + 1) * plane {
                let s = v.sigma()[c];
                for t in &pts {
                    acc += f(c, s, &cell_gradient(v, c, *t)).scale(w);
                }
            }
            acc
        })
        .collect();
    sum_matrices(&partial).scale(T::one() / T::from_count(grid.n_cells()))
}

/// Cell-midpoint `E = −∇V` and `J = σE`.
pub fn extract_fields<T: Real>(v: &PotentialSet<T>) -> (FieldMatrix<T>, FieldMatrix<T>) {
    let grid = *v.grid();
    let mid = [T::lit(0.5); 3];
    let e: Vec<Matrix3<T>> = (0..grid.n_cells())
        .into_par_iter()
        .map(|c| -cell_gradient(v, c, mid))
        .collect();
    let j = e.iter().zip(v.sigma()).map(|(m, &s)| m.scale(s)).collect();
    (FieldMatrix { grid, values: e }, FieldMatrix { grid, values: j })
}

/// Face integral of the bilinear interpolant, returned per face cell.
fn face_mean<T: Real>(face: &FaceCell<T>, vals: &[T]) -> T {
    face.nodes.iter().map(|&n| vals[n]).sum::<T>() * T::lit(0.25)
}

/// `⟨E⟩_ki = −(1/|Ω|)∮ n_k V_i`, evaluated exactly for the bilinear trace.
pub fn boundary_mean_e<T: Real>(v: &PotentialSet<T>) -> Matrix3<T> {
    let grid = v.grid();
    let mut m = Matrix3::zeros();
    for face in grid.boundary_faces() {
        let n = face.normal();
        let area = face.area();
        for i in 0..3 {
            let vi = face_mean(&face, v.values(i)) * area;
            m[(face.axis, i)] -= n[face.axis] * vi;
        }
    }
    m.scale(T::one() / grid.volume())
}

/// Volume average of `E = −∇V`.
pub fn volume_mean_e<T: Real>(v: &PotentialSet<T>) -> Matrix3<T> {
    volume_average(v, |_, _, g| -*g)
}

/// `⟨J⟩_kl = −(1/|Ω|) Σ_b x_k(b) F_b(l)` from the nodal boundary fluxes.
pub fn boundary_mean_j<T: Real>(v: &PotentialSet<T>) -> Matrix3<T> {
    let grid = v.grid();
    let mut m = Matrix3::zeros();
    for n in 0..grid.n_nodes() {
        let f = [v.flux(0)[n], v.flux(1)[n], v.flux(2)[n]];
        if f.iter().all(|&x| x == T::zero()) {
            continue;
        }
        let x = grid.node_position(n);
        for k in 0..3 {
            for l in 0..3 {
                m[(k, l)] -= x[k] * f[l];
            }
        }
    }
    m.scale(T::one() / grid.volume())
}

/// Volume average of `J = −σ∇V`.
pub fn volume_mean_j<T: Real>(v: &PotentialSet<T>) -> Matrix3<T> {
    volume_average(v, |_, s, g| g.scale(-s))
}

/// `⟨σ ∇V_i·∇V_j⟩` by volume quadrature.
pub fn energy_volume<T: Real>(v: &PotentialSet<T>) -> Matrix3<T> {
    volume_average(v, |_, s, g| (g.transpose() * *g).scale(s))
}

/// `(1/|Ω|) Σ_b V_i(b) F_b(j)`, the boundary form of the energy matrix.
pub fn energy_boundary<T: Real>(v: &PotentialSet<T>) -> Matrix3<T> {
    let grid = v.grid();
    let m = Matrix3::from_fn(|i, j| v.values(i).iter().zip(v.flux(j)).map(|(&a, &b)| a * b).sum());
    m.scale(T::one() / grid.volume())
}

/// Tangential derivatives `(∂_u, ∂_v)` of the bilinear trace at `(s, t)`.
fn face_tangential<T: Real>(face: &FaceCell<T>, vals: &[T], s: T, t: T) -> (T, T) {
    let [a, b, c, d] = face.nodes.map(|n| vals[n]);
    let one = T::one();
    let du = ((one - t) * (b - a) + t * (d - c)) / face.hu;
    let dv = ((one - s) * (c - a) + s * (d - b)) / face.hv;
    (du, dv)
}

fn face_value<T: Real>(face: &FaceCell<T>, vals: &[T], s: T, t: T) -> T {
    let phi = FaceCell::<T>::shape(s, t);
    (0..4).map(|a| phi[a] * vals[face.nodes[a]]).sum()
}

/// Visits every face quadrature point with the outward normal sign, the weight,
/// and the local coordinates.
fn for_each_face_point<T: Real>(grid: &Grid<T>, mut f: impl FnMut(&FaceCell<T>, T, T, T, T)) {
    let g = [T::lit(GAUSS_2), T::one() - T::lit(GAUSS_2)];
    for face in grid.boundary_faces() {
        let sign = face.normal()[face.axis];
        let w = face.area() * T::lit(0.25);
        for &s in &g {
            for &t in &g {
                f(&face, sign, w, s, t);
            }
        }
    }
}

/// Both forms of `(1/|Ω|)∫ (∇V¹)ᵀ 𝕋(∇V²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pairing<T> {
    pub volume: Matrix3<T>,
    pub boundary: Matrix3<T>,
}

impl<T: Real> Pairing<T> {
    /// `max |boundary − volume| / max(|volume|, 1)`.
    pub fn discrepancy(&self) -> T {
        (self.boundary - self.volume).max_abs() / self.volume.max_abs().max(T::one())
    }
}

fn check_same_grid<T: Real>(a: &PotentialSet<T>, b: &PotentialSet<T>) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch("potential sets live on different grids".into()));
    }
    Ok(())
}

/// Null-Lagrangian pairing. The boundary form only uses tangential
/// derivatives on each box face.
pub fn null_lagrangian_pairing<T: Real>(v1: &PotentialSet<T>, v2: &PotentialSet<T>) -> Result<Pairing<T>> {
    check_same_grid(v1, v2)?;
    let grid = *v1.grid();
    let volume = {
        let plane = grid.dims[0] * grid.dims[1];
        let pts = gauss_points::<T>();
        let partial: Vec<Matrix3<T>> = (0..grid.dims[2])
            .into_par_iter()
            .map(|k| {
                let mut acc = Matrix3::zeros();
                for c in k * plane..(k + 1) * plane {
                    for t in &pts {
                        let g1 = cell_gradient(v1, c, *t);
                        let g2 = cell_gradient(v2, c, *t);
                        acc += (g1.transpose() * translation_t(&g2)).scale(T::lit(0.125));
                    }
                }
                acc
            })
            .collect();
        sum_matrices(&partial).scale(T::one() / T::from_count(grid.n_cells()))
    };
    let mut boundary = Matrix3::zeros();
    for_each_face_point(&grid, |face, sign, w, s, t| {
        let a = face.axis;
        let mut tan = [[T::zero(); 3]; 3];
        for m in 0..3 {
            let (du, dv) = face_tangential(face, v2.values(m), s, t);
            tan[m][face.u] = du;
            tan[m][face.v] = dv;
        }
        for i in 0..3 {
            let v1i = face_value(face, v1.values(i), s, t);
            for j in 0..3 {
                let nt = if j == a {
                    (0..3).filter(|&m| m != a).map(|m| tan[m][m]).sum::<T>()
                } else {
                    -tan[a][j]
                };
                boundary[(i, j)] += w * v1i * sign * nt;
            }
        }
    });
    Ok(Pairing { volume, boundary: boundary.scale(T::one() / grid.volume()) })
}

/// `⟨∂_j V_i ∂_l V_k − ∂_l V_i ∂_j V_k⟩` by volume quadrature.
pub fn minor_tensor_volume<T: Real>(v: &PotentialSet<T>) -> Tensor4<T> {
    let grid = *v.grid();
    let plane = grid.dims[0] * grid.dims[1];
    let pts = gauss_points::<T>();
    let partial: Vec<[T; 81]> = (0..grid.dims[2])
        .into_par_iter()
        .map(|kz| {
            let mut acc = [T::zero(); 81];
            for c in kz * plane..(kz + 1) * plane {
                for t in &pts {
                    let g = cell_gradient(v, c, *t);
                    for (idx, a) in acc.iter_mut().enumerate() {
                        let (i, j, k, l) = unpack(idx);
                        *a += g[(j, i)] * g[(l, k)] - g[(l, i)] * g[(j, k)];
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = [T::zero(); 81];
    for p in &partial {
        for (t, x) in total.iter_mut().zip(p) {
            *t += *x;
        }
    }
    let scale = T::lit(0.125) / T::from_count(grid.n_cells());
    Tensor4::from_components(|i, j, k, l| total[pack(i, j, k, l)] * scale)
}

/// `(1/|Ω|)∮ V_i [n_j ∂_l V_k − n_l ∂_j V_k]` by face quadrature.
pub fn minor_tensor_boundary<T: Real>(v: &PotentialSet<T>) -> Tensor4<T> {
    let grid = *v.grid();
    let mut total = [T::zero(); 81];
    for_each_face_point(&grid, |face, sign, w, s, t| {
        let a = face.axis;
        let vals = [0, 1, 2].map(|i| face_value(face, v.values(i), s, t));
        let mut tan = [[T::zero(); 3]; 3];
        for k in 0..3 {
            let (du, dv) = face_tangential(face, v.values(k), s, t);
            tan[k][face.u] = du;
            tan[k][face.v] = dv;
        }
        for (idx, acc) in total.iter_mut().enumerate() {
            let (i, j, k, l) = unpack(idx);
            let term = if j == a && l != a {
                tan[k][l]
            } else if l == a && j != a {
                -tan[k][j]
            } else {
                continue;
            };
            *acc += w * sign * vals[i] * term;
        }
    });
    let scale = T::one() / grid.volume();
    Tensor4::from_components(|i, j, k, l| total[pack(i, j, k, l)] * scale)
}

#[inline]
fn pack(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 3 + j) * 3 + k) * 3 + l
}

#[inline]
fn unpack(idx: usize) -> (usize, usize, usize, usize) {
    (idx / 27, (idx / 9) % 3, (idx / 3) % 3, idx % 3)
}

/// Largest weak divergence of `𝕋∇V` over interior nodes, relative to the
/// largest sum of absolute contributions.
pub fn translated_divergence_residual<T: Real>(v: &PotentialSet<T>) -> T {
    let grid = *v.grid();
    let pts = gauss_points::<T>();
    let mut res = vec![[T::zero(); 3]; grid.n_nodes()];
    let mut mag = vec![T::zero(); grid.n_nodes()];
    let one = T::one();
    let l = |b: usize, s: T| if b == 0 { one - s } else { s };
    let dl = |b: usize| if b == 0 { -one } else { one };
    let w = grid.cell_volume() * T::lit(0.125);
    for c in 0..grid.n_cells() {
        let nodes = grid.cell_nodes(c);
        for t in &pts {
            let tg = translation_t(&cell_gradient(v, c, *t));
            for a in 0..8 {
                let (bx, by, bz) = (a & 1, (a >> 1) & 1, (a >> 2) & 1);
                let dphi = [
                    dl(bx) * l(by, t[1]) * l(bz, t[2]) / grid.spacing[0],
                    l(bx, t[0]) * dl(by) * l(bz, t[2]) / grid.spacing[1],
                    l(bx, t[0]) * l(by, t[1]) * dl(bz) / grid.spacing[2],
                ];
                for j in 0..3 {
                    for k in 0..3 {
                        let term = w * dphi[k] * tg[(k, j)];
                        res[nodes[a]][j] += term;
                        mag[nodes[a]] += term.abs();
                    }
                }
            }
        }
    }
    let mut worst = T::zero();
    let mut scale = T::zero();
    for n in 0..grid.n_nodes() {
        if grid.is_boundary_node(n) {
            continue;
        }
        scale = scale.max(mag[n]);
        for r in res[n] {
            worst = worst.max(r.abs());
        }
    }
    if scale > T::zero() {
        worst / scale
    } else {
        worst
    }
}
