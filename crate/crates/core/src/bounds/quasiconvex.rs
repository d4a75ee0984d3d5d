use serde::{Deserialize, Serialize};

use crate::pde::{FieldMatrix, Grid};
use crate::tensor::{levi_civita, t_prime_form, Matrix3};
use crate::{Error, Real, Result};

/// Largest periodic divergence accepted, relative to `max|J̲|/h`.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quasiconvexity<T> {
    /// `⟨Tr J̲ᵀ𝕋′J̲⟩`.
    pub lhs: T,
    /// `Tr ⟨J̲⟩ᵀ𝕋′⟨J̲⟩`.
    pub rhs: T,
    pub gap: T,
    /// Largest periodic divergence found.
    pub divergence: T,
}

/// Centered periodic difference of a cell field along `axis`.
pub fn periodic_difference<T: Real>(grid: &Grid<T>, f: &[T], axis: usize) -> Vec<T> {
    let d = grid.dims;
    let h2 = T::lit(2.0) * grid.spacing[axis];
    (0..grid.n_cells())
        .map(|c| {
            let ijk = grid.cell_coords(c);
            let mut up = ijk;
            let mut dn = ijk;
            up[axis] = (ijk[axis] + 1) % d[axis];
            dn[axis] = (ijk[axis] + d[axis] - 1) % d[axis];
            (f[grid.cell_index(up[0], up[1], up[2])] - f[grid.cell_index(dn[0], dn[1], dn[2])]) / h2
        })
        .collect()
}

fn component<T: Real>(j: &FieldMatrix<T>, k: usize, l: usize) -> Vec<T> {
    j.values().iter().map(|m| m[(k, l)]).collect()
}

/// `max_l max_cells |Σ_k D_k J̲_kl|` with centered periodic differences.
pub fn periodic_divergence<T: Real>(j: &FieldMatrix<T>) -> T {
    let g = j.grid();
    let mut worst = T::zero();
    for l in 0..3 {
        let mut div = vec![T::zero(); g.n_cells()];
        for k in 0..3 {
            for (d, x) in div.iter_mut().zip(periodic_difference(g, &component(j, k, l), k)) {
                *d += x;
            }
        }
        worst = div.iter().fold(worst, |w, x| w.max(x.abs()));
    }
    worst
}

/// Compares the average of the `𝕋′` form with its value on the average for
/// a periodic divergence-free field on a box.
pub fn quasiconvexity_check<T: Real>(j: &FieldMatrix<T>) -> Result<Quasiconvexity<T>> {
    let g = j.grid();
    let divergence = periodic_divergence(j);
    let hmin = g.spacing.iter().fold(T::infinity(), |a, &b| a.min(b));
    let scale = j.values().iter().fold(T::zero(), |a, m| a.max(m.max_abs())) / hmin;
    if divergence > T::lit(DIVERGENCE_TOLERANCE) * scale.max(T::one()) {
        return Err(Error::InvalidInput(format!("field is not divergence free (max divergence {:e})", divergence.as_f64())));
    }
    let n = T::from_count(g.n_cells());
    let lhs = j.values().iter().map(t_prime_form).sum::<T>() / n;
    let rhs = t_prime_form(&j.mean());
    Ok(Quasiconvexity { lhs, rhs, gap: lhs - rhs, divergence })
}

/// `J̲_kl = ε_kmn D_m ψ_nl`, divergence free for the centered differences.
pub fn curl_field<T: Real>(grid: &Grid<T>, psi: &[Matrix3<T>]) -> Result<FieldMatrix<T>> {
    if psi.len() != grid.n_cells() {
        return Err(Error::GridMismatch(format!("{} matrices for {} cells", psi.len(), grid.n_cells())));
    }
    let mut out = vec![Matrix3::zeros(); grid.n_cells()];
    for n in 0..3 {
        for l in 0..3 {
            let p: Vec<T> = psi.iter().map(|m| m[(n, l)]).collect();
            for m in 0..3 {
                let dp = periodic_difference(grid, &p, m);
                for k in 0..3 {
                    let e = levi_civita::<T>(k, m, n);
                    if e != T::zero() {
                        for (o, x) in out.iter_mut().zip(&dp) {
                            o[(k, l)] += e * *x;
                        }
                    }
                }
            }
        }
    }
    FieldMatrix::new(*grid, out)
}

/// `J̲_kl = J⁰_kl + D_kD_lα − δ_kl Σ_m D_mD_mα + ε_klm D_mβ`, the equality
/// class of the quasiconvexity inequality.
pub fn potential_form_field<T: Real>(grid: &Grid<T>, j0: &Matrix3<T>, alpha: &[T], beta: &[T]) -> Result<FieldMatrix<T>> {
    let nc = grid.n_cells();
    if alpha.len() != nc || beta.len() != nc {
        return Err(Error::GridMismatch("potentials must have one value per cell".into()));
    }
    let da: Vec<Vec<T>> = (0..3).map(|k| periodic_difference(grid, alpha, k)).collect();
    let db: Vec<Vec<T>> = (0..3).map(|k| periodic_difference(grid, beta, k)).collect();
    let mut dda = vec![vec![Vec::new(); 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            dda[k][l] = periodic_difference(grid, &da[l], k);
        }
    }
    let values = (0..nc)
        .map(|c| {
            let lap = dda[0][0][c] + dda[1][1][c] + dda[2][2][c];
            Matrix3::from_fn(|k, l| {
                let mut v = j0[(k, l)] + dda[k][l][c];
                if k == l {
                    v -= lap;
                }
                for (m, d) in db.iter().enumerate() {
                    v += levi_civita::<T>(k, l, m) * d[c];
                }
                v
            })
        })
        .collect();
    FieldMatrix::new(*grid, values)
}
