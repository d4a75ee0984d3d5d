use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::boundary::{BoundaryData, NeumannLoad};
use super::grid::{ConductivityField, Grid};
use crate::tensor::Matrix3;
use crate::{Error, Real, Result};

/// Which equation is solved: `∇·σ∇V = 0` or `ΔV = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Conduction,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Relative residual `‖r‖₂ / ‖b‖₂` at which CG stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Relative net-flux tolerance for Neumann compatibility.
    pub compatibility_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 20_000, compatibility_tolerance: 1e-8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    /// Net boundary flux removed from a Neumann load before solving.
    pub load_defect: f64,
}

/// Three node-centred potentials on one grid with their boundary fluxes.
#[derive(Debug, Clone)]
pub struct PotentialSet<T> {
    grid: Grid<T>,
    kind: BoundaryKind,
    sigma: Vec<T>,
    values: [Vec<T>; 3],
    flux: [Vec<T>; 3],
    stats: [SolveStats; 3],
    combination: Matrix3<T>,
}

impl<T: Real> PotentialSet<T> {
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    /// Cell conductivities used in the solve.
    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn values(&self, i: usize) -> &[T] {
        &self.values[i]
    }

    /// Nodal boundary flux `∫ σ∇V_i·∇φ_b`: the reaction at boundary nodes for
    /// Dirichlet data, the assembled load for Neumann data.
    pub fn flux(&self, i: usize) -> &[T] {
        &self.flux[i]
    }

    pub fn stats(&self) -> &[SolveStats; 3] {
        &self.stats
    }

    /// Accumulated combination matrix applied by [`PotentialSet::combine`].
    pub fn combination(&self) -> &Matrix3<T> {
        &self.combination
    }

    pub fn max_iterations(&self) -> usize {
        self.stats.iter().map(|s| s.iterations).max().unwrap_or(0)
    }

    pub fn max_residual(&self) -> f64 {
        self.stats.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    /// `V' = V K`, i.e. `V'_j = Σ_i V_i K_ij`, applied to potentials and fluxes.
    pub fn combine(&self, k: &Matrix3<T>) -> Self {
        let mix = |src: &[Vec<T>; 3]| {
            [0, 1, 2].map(|j| {
                (0..src[0].len())
                    .map(|n| (0..3).map(|i| src[i][n] * k[(i, j)]).sum())
                    .collect::<Vec<T>>()
            })
        };
        Self {
            grid: self.grid,
            kind: self.kind,
            sigma: self.sigma.clone(),
            values: mix(&self.values),
            flux: mix(&self.flux),
            stats: self.stats,
            combination: self.combination * *k,
        }
    }

    /// Assembles a set from externally produced nodal potentials, computing the
    /// boundary reaction from the given cell conductivities.
    pub fn from_nodal(grid: Grid<T>, sigma: Vec<T>, values: [Vec<T>; 3]) -> Result<Self> {
        if sigma.len() != grid.n_cells() || values.iter().any(|v| v.len() != grid.n_nodes()) {
            return Err(Error::GridMismatch("nodal potentials do not match grid".into()));
        }
        let kref = element_matrix(&grid);
        let flux = [0, 1, 2].map(|i| boundary_reaction(&grid, &sigma, &kref, &values[i]));
        let stats = [SolveStats { iterations: 0, residual: 0.0, load_defect: 0.0 }; 3];
        Ok(Self {
            grid,
            kind: BoundaryKind::Dirichlet,
            sigma,
            values,
            flux,
            stats,
            combination: Matrix3::identity(),
        })
    }
}

/// Trilinear element stiffness for unit conductivity, local node `ax + 2ay + 4az`.
pub(crate) fn element_matrix<T: Real>(grid: &Grid<T>) -> [[T; 8]; 8] {
    let [hx, hy, hz] = grid.spacing;
    let s = |a: usize, b: usize| if a == b { T::one() } else { -T::one() };
    let m = |a: usize, b: usize| if a == b { T::lit(1.0 / 3.0) } else { T::lit(1.0 / 6.0) };
    let bit = |a: usize, d: usize| (a >> d) & 1;
    let mut k = [[T::zero(); 8]; 8];
    for a in 0..8 {
        for b in 0..8 {
            let (x, y, z) = ((bit(a, 0), bit(b, 0)), (bit(a, 1), bit(b, 1)), (bit(a, 2), bit(b, 2)));
            k[a][b] = hy * hz / hx * s(x.0, x.1) * m(y.0, y.1) * m(z.0, z.1)
                + hx * hz / hy * m(x.0, x.1) * s(y.0, y.1) * m(z.0, z.1)
                + hx * hy / hz * m(x.0, x.1) * m(y.0, y.1) * s(z.0, z.1);
        }
    }
    k
}

/// `K v` assembled element by element.
pub(crate) fn apply_elementwise<T: Real>(grid: &Grid<T>, sigma: &[T], kref: &[[T; 8]; 8], v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); v.len()];
    for (c, &s) in sigma.iter().enumerate() {
        let nodes = grid.cell_nodes(c);
        let local = nodes.map(|n| v[n]);
        for a in 0..8 {
            let mut acc = T::zero();
            for b in 0..8 {
                acc += kref[a][b] * local[b];
            }
            out[nodes[a]] += s * acc;
        }
    }
    out
}

fn boundary_reaction<T: Real>(grid: &Grid<T>, sigma: &[T], kref: &[[T; 8]; 8], v: &[T]) -> Vec<T> {
    let mut r = apply_elementwise(grid, sigma, kref, v);
    for (n, x) in r.iter_mut().enumerate() {
        if !grid.is_boundary_node(n) {
            *x = T::zero();
        }
    }
    r
}

#[inline]
fn stencil_slot(dx: isize, dy: isize, dz: isize) -> usize {
    ((dx + 1) + 3 * (dy + 1) + 9 * (dz + 1)) as usize
}

/// Assembled 27-point operator.
struct Stencil<T> {
    grid: Grid<T>,
    coef: Vec<[T; 27]>,
}

impl<T: Real> Stencil<T> {
    fn assemble(grid: &Grid<T>, sigma: &[T], kref: &[[T; 8]; 8], pin_boundary: bool) -> Self {
        let mut coef = vec![[T::zero(); 27]; grid.n_nodes()];
        let bit = |a: usize, d: usize| ((a >> d) & 1) as isize;
        for (c, &s) in sigma.iter().enumerate() {
            let nodes = grid.cell_nodes(c);
            for a in 0..8 {
                for b in 0..8 {
                    let slot = stencil_slot(bit(b, 0) - bit(a, 0), bit(b, 1) - bit(a, 1), bit(b, 2) - bit(a, 2));
                    coef[nodes[a]][slot] += s * kref[a][b];
                }
            }
        }
        if pin_boundary {
            let [px, py, _] = grid.node_dims();
            for n in 0..coef.len() {
                if grid.is_boundary_node(n) {
                    let d = coef[n][13];
                    coef[n] = [T::zero(); 27];
                    coef[n][13] = d;
                    continue;
                }
                for slot in 0..27 {
                    let (dx, dy, dz) = ((slot % 3) as isize - 1, ((slot / 3) % 3) as isize - 1, (slot / 9) as isize - 1);
                    let m = (n as isize + dx + dy * px as isize + dz * (px * py) as isize) as usize;
                    if grid.is_boundary_node(m) {
                        coef[n][slot] = T::zero();
                    }
                }
            }
        }
        Self { grid: *grid, coef }
    }

    fn diagonal(&self) -> Vec<T> {
        self.coef.iter().map(|c| c[13]).collect()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        let [px, py, pz] = self.grid.node_dims();
        let plane = px * py;
        y.par_chunks_mut(plane).enumerate().for_each(|(k, yplane)| {
            let zr = (if k > 0 { -1 } else { 0 })..=(if k + 1 < pz { 1 } else { 0 });
            for j in 0..py {
                let yr = (if j > 0 { -1isize } else { 0 })..=(if j + 1 < py { 1 } else { 0 });
                for i in 0..px {
                    let xr = (if i > 0 { -1isize } else { 0 })..=(if i + 1 < px { 1 } else { 0 });
                    let n = i + px * j + plane * k;
                    let c = &self.coef[n];
                    let mut s = T::zero();
                    for dz in zr.clone() {
                        for dy in yr.clone() {
                            let row = (n as isize + dy * px as isize + dz * plane as isize) as usize;
                            let base = stencil_slot(0, dy, dz);
                            for dx in xr.clone() {
                                s += c[(base as isize + dx) as usize] * x[(row as isize + dx) as usize];
                            }
                        }
                    }
                    yplane[i + px * j] = s;
                }
            }
        });
    }
}

/// Dot product with a fixed reduction order, independent of the thread count.
fn dot<T: Real>(a: &[T], b: &[T], chunk: usize) -> T {
    let partial: Vec<T> = a
        .par_chunks(chunk)
        .zip(b.par_chunks(chunk))
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| p * q).sum::<T>())
        .collect();
    partial.into_iter().sum()
}

struct CgOutcome {
    iterations: usize,
    residual: f64,
}

/// Jacobi-preconditioned CG for `A x = b`, starting from `x`.
fn pcg<T: Real>(
    op: &Stencil<T>,
    b: &[T],
    x: &mut [T],
    scale: T,
    opts: &SolverOptions,
) -> Result<CgOutcome> {
    let n = b.len();
    let chunk = op.grid.node_dims()[0] * op.grid.node_dims()[1];
    let inv_diag: Vec<T> = op
        .diagonal()
        .into_iter()
        .map(|d| if d > T::zero() { T::one() / d } else { T::zero() })
        .collect();
    let mut r = vec![T::zero(); n];
    op.apply(x, &mut r);
    r.par_iter_mut().zip(b.par_iter()).for_each(|(ri, &bi)| *ri = bi - *ri);
    let tol = T::lit(opts.tolerance);
    let scale = if scale > T::zero() { scale } else { T::one() };
    let mut history = Vec::new();
    let mut rel = dot(&r, &r, chunk).sqrt() / scale;
    history.push(rel.as_f64());
    if rel <= tol {
        return Ok(CgOutcome { iterations: 0, residual: rel.as_f64() });
    }
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&a, &d)| a * d).collect();
    let mut p = z.clone();
    let mut q = vec![T::zero(); n];
    let mut rz = dot(&r, &z, chunk);
    for it in 1..=opts.max_iterations {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q, chunk);
        if !(pq > T::zero()) {
            return Err(Error::NotConverged { iterations: it, residual: rel.as_f64(), history });
        }
        let alpha = rz / pq;
        x.par_iter_mut().zip(p.par_iter()).for_each(|(xi, &pi)| *xi += alpha * pi);
        r.par_iter_mut().zip(q.par_iter()).for_each(|(ri, &qi)| *ri -= alpha * qi);
        rel = dot(&r, &r, chunk).sqrt() / scale;
        history.push(rel.as_f64());
        if rel <= tol {
            return Ok(CgOutcome { iterations: it, residual: rel.as_f64() });
        }
        z.par_iter_mut()
            .zip(r.par_iter().zip(inv_diag.par_iter()))
            .for_each(|(zi, (&ri, &di))| *zi = ri * di);
        let rz_new = dot(&r, &z, chunk);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(pi, &zi)| *pi = zi + beta * *pi);
    }
    Err(Error::NotConverged { iterations: opts.max_iterations, residual: rel.as_f64(), history })
}

/// Solves the three boundary value problems with default options.
pub fn solve<T: Real>(field: &ConductivityField<T>, bc: &BoundaryData<T>, mode: Mode) -> Result<PotentialSet<T>> {
    solve_with(field, bc, mode, &SolverOptions::default())
}

pub fn solve_with<T: Real>(
    field: &ConductivityField<T>,
    bc: &BoundaryData<T>,
    mode: Mode,
    opts: &SolverOptions,
) -> Result<PotentialSet<T>> {
    let sigma = match mode {
        Mode::Conduction => field.cell_sigmas(),
        Mode::Laplace => vec![T::one(); field.grid().n_cells()],
    };
    solve_cells(*field.grid(), sigma, bc, opts)
}

/// Solves `ΔV = 0` on a bare grid.
pub fn solve_laplace<T: Real>(grid: &Grid<T>, bc: &BoundaryData<T>, opts: &SolverOptions) -> Result<PotentialSet<T>> {
    solve_cells(*grid, vec![T::one(); grid.n_cells()], bc, opts)
}

fn solve_cells<T: Real>(grid: Grid<T>, sigma: Vec<T>, bc: &BoundaryData<T>, opts: &SolverOptions) -> Result<PotentialSet<T>> {
    let kref = element_matrix(&grid);
    match bc {
        BoundaryData::Dirichlet(data) => {
            let init = data.nodal_values(&grid)?;
            let op = Stencil::assemble(&grid, &sigma, &kref, true);
            let mut values: [Vec<T>; 3] = Default::default();
            let mut stats = [SolveStats { iterations: 0, residual: 0.0, load_defect: 0.0 }; 3];
            for i in 0..3 {
                let (v, s) = solve_dirichlet(&grid, &sigma, &kref, &op, &init[i], opts)?;
                values[i] = v;
                stats[i] = s;
            }
            let flux = [0, 1, 2].map(|i| boundary_reaction(&grid, &sigma, &kref, &values[i]));
            Ok(PotentialSet {
                grid,
                kind: BoundaryKind::Dirichlet,
                sigma,
                values,
                flux,
                stats,
                combination: Matrix3::identity(),
            })
        }
        BoundaryData::Neumann(data) => {
            let NeumannLoad { mut load, net_flux, total_abs_flux } = data.assemble_load(&grid)?;
            for l in 0..3 {
                let allowed = T::lit(opts.compatibility_tolerance) * total_abs_flux[l].max(grid.volume().powf(T::lit(2.0 / 3.0)));
                if net_flux[l].abs() > allowed {
                    return Err(Error::IncompatibleNeumann { component: l, net_flux: net_flux[l].as_f64() });
                }
            }
            let op = Stencil::assemble(&grid, &sigma, &kref, false);
            let nn = T::from_count(grid.n_nodes());
            let mut values: [Vec<T>; 3] = Default::default();
            let mut stats = [SolveStats { iterations: 0, residual: 0.0, load_defect: 0.0 }; 3];
            for l in 0..3 {
                let shift = net_flux[l] / nn;
                load[l].iter_mut().for_each(|f| *f -= shift);
                let chunk = grid.node_dims()[0] * grid.node_dims()[1];
                let scale = dot(&load[l], &load[l], chunk).sqrt();
                let mut x = vec![T::zero(); grid.n_nodes()];
                let out = pcg(&op, &load[l], &mut x, scale, opts)?;
                let mean = x.iter().copied().sum::<T>() / nn;
                x.iter_mut().for_each(|v| *v -= mean);
                values[l] = x;
                stats[l] = SolveStats {
                    iterations: out.iterations,
                    residual: out.residual,
                    load_defect: net_flux[l].as_f64(),
                };
            }
            Ok(PotentialSet {
                grid,
                kind: BoundaryKind::Neumann,
                sigma,
                values,
                flux: load,
                stats,
                combination: Matrix3::identity(),
            })
        }
    }
}

fn solve_dirichlet<T: Real>(
    grid: &Grid<T>,
    sigma: &[T],
    kref: &[[T; 8]; 8],
    op: &Stencil<T>,
    init: &[T],
    opts: &SolverOptions,
) -> Result<(Vec<T>, SolveStats)> {
    let boundary: Vec<bool> = (0..grid.n_nodes()).map(|n| grid.is_boundary_node(n)).collect();
    let lifted: Vec<T> = init.iter().zip(&boundary).map(|(&v, &b)| if b { v } else { T::zero() }).collect();
    let mut rhs = apply_elementwise(grid, sigma, kref, &lifted);
    let chunk = grid.node_dims()[0] * grid.node_dims()[1];
    rhs.iter_mut().zip(&boundary).for_each(|(r, &b)| *r = if b { T::zero() } else { -*r });
    let scale = dot(&rhs, &rhs, chunk).sqrt();
    let mut residual0 = apply_elementwise(grid, sigma, kref, init);
    residual0.iter_mut().zip(&boundary).for_each(|(r, &b)| *r = if b { T::zero() } else { -*r });
    let mut delta = vec![T::zero(); init.len()];
    let out = pcg(op, &residual0, &mut delta, scale, opts)?;
    let v = init.iter().zip(&delta).map(|(&a, &d)| a + d).collect();
    Ok((v, SolveStats { iterations: out.iterations, residual: out.residual, load_defect: 0.0 }))
}
