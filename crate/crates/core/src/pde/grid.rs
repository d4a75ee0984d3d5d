use serde::{Deserialize, Serialize};

use crate::tensor::check_conductivities;
use crate::{Error, Real, Result};

/// Minimum number of cells per axis.
pub const MIN_CELLS: usize = 4;

/// Regular voxel grid of a box centred at the origin.
///
/// Nodes are indexed `i + (nx+1)(j + (ny+1)k)` and cells `i + nx(j + ny k)`,
/// both x-fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub dims: [usize; 3],
    pub spacing: [T; 3],
}

impl<T: Real> Grid<T> {
    pub fn new(dims: [usize; 3], spacing: [T; 3]) -> Result<Self> {
        if dims.iter().any(|&n| n < MIN_CELLS) {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_CELLS} cells per axis, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&h| !(h > T::zero()) || !h.is_finite()) {
            return Err(Error::InvalidInput(format!("grid spacing must be positive, got {spacing:?}")));
        }
        Ok(Self { dims, spacing })
    }

    /// Grid covering a box of the given side lengths.
    pub fn from_extent(dims: [usize; 3], extent: [T; 3]) -> Result<Self> {
        let h = [0, 1, 2].map(|a| extent[a] / T::from_count(dims[a].max(1)));
        Self::new(dims, h)
    }

    pub fn node_dims(&self) -> [usize; 3] {
        self.dims.map(|n| n + 1)
    }

    pub fn n_nodes(&self) -> usize {
        self.node_dims().iter().product()
    }

    pub fn n_cells(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn extent(&self) -> [T; 3] {
        [0, 1, 2].map(|a| self.spacing[a] * T::from_count(self.dims[a]))
    }

    pub fn volume(&self) -> T {
        let e = self.extent();
        e[0] * e[1] * e[2]
    }

    pub fn cell_volume(&self) -> T {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    /// Lower corner of the box.
    pub fn origin(&self) -> [T; 3] {
        let half = T::lit(0.5);
        self.extent().map(|e| -half * e)
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        let [px, py, _] = self.node_dims();
        i + px * (j + py * k)
    }

    #[inline]
    pub fn cell_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    #[inline]
    pub fn node_coords(&self, n: usize) -> [usize; 3] {
        let [px, py, _] = self.node_dims();
        [n % px, (n / px) % py, n / (px * py)]
    }

    #[inline]
    pub fn cell_coords(&self, c: usize) -> [usize; 3] {
        let [nx, ny, _] = self.dims;
        [c % nx, (c / nx) % ny, c / (nx * ny)]
    }

    pub fn node_position(&self, n: usize) -> [T; 3] {
        let ijk = self.node_coords(n);
        let o = self.origin();
        [0, 1, 2].map(|a| o[a] + self.spacing[a] * T::from_count(ijk[a]))
    }

    pub fn cell_center(&self, c: usize) -> [T; 3] {
        let ijk = self.cell_coords(c);
        let o = self.origin();
        let half = T::lit(0.5);
        [0, 1, 2].map(|a| o[a] + self.spacing[a] * (T::from_count(ijk[a]) + half))
    }

    pub fn is_boundary_node(&self, n: usize) -> bool {
        let ijk = self.node_coords(n);
        (0..3).any(|a| ijk[a] == 0 || ijk[a] == self.dims[a])
    }

    /// Node indices of a cell's corners, local index `ax + 2ay + 4az`.
    #[inline]
    pub fn cell_nodes(&self, c: usize) -> [usize; 8] {
        let [i, j, k] = self.cell_coords(c);
        let base = self.node_index(i, j, k);
        let [px, py, _] = self.node_dims();
        let sy = px;
        let sz = px * py;
        [
            base,
            base + 1,
            base + sy,
            base + sy + 1,
            base + sz,
            base + sz + 1,
            base + sz + sy,
            base + sz + sy + 1,
        ]
    }

    /// All boundary face cells in canonical order: faces x−, x+, y−, y+, z−, z+,
    /// and within a face the first tangential axis fastest.
    pub fn boundary_faces(&self) -> Vec<FaceCell<T>> {
        let mut out = Vec::new();
        for axis in 0..3 {
            let (u, v) = tangential_axes(axis);
            for side in [Side::Low, Side::High] {
                let layer = match side {
                    Side::Low => 0,
                    Side::High => self.dims[axis],
                };
                for jv in 0..self.dims[v] {
                    for ju in 0..self.dims[u] {
                        let mut nodes = [0usize; 4];
                        for (slot, (du, dv)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
                            let mut ijk = [0usize; 3];
                            ijk[axis] = layer;
                            ijk[u] = ju + du;
                            ijk[v] = jv + dv;
                            nodes[slot] = self.node_index(ijk[0], ijk[1], ijk[2]);
                        }
                        let corner = self.node_position(nodes[0]);
                        out.push(FaceCell {
                            axis,
                            side,
                            u,
                            v,
                            nodes,
                            corner,
                            hu: self.spacing[u],
                            hv: self.spacing[v],
                        });
                    }
                }
            }
        }
        out
    }

    pub fn n_boundary_faces(&self) -> usize {
        let [nx, ny, nz] = self.dims;
        2 * (ny * nz + nx * nz + nx * ny)
    }
}

/// The two tangential axes of a face normal to `axis`, in increasing order.
pub fn tangential_axes(axis: usize) -> (usize, usize) {
    match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Low,
    High,
}

/// One voxel face on the outer boundary.
#[derive(Debug, Clone, Copy)]
pub struct FaceCell<T> {
    pub axis: usize,
    pub side: Side,
    pub u: usize,
    pub v: usize,
    /// Corner nodes ordered `(u0,v0), (u1,v0), (u0,v1), (u1,v1)`.
    pub nodes: [usize; 4],
    pub corner: [T; 3],
    pub hu: T,
    pub hv: T,
}

impl<T: Real> FaceCell<T> {
    /// Outward unit normal.
    pub fn normal(&self) -> [T; 3] {
        let mut n = [T::zero(); 3];
        n[self.axis] = match self.side {
            Side::Low => -T::one(),
            Side::High => T::one(),
        };
        n
    }

    pub fn area(&self) -> T {
        self.hu * self.hv
    }

    /// Physical point at local face coordinates `(s, t) ∈ [0,1]²`.
    pub fn point(&self, s: T, t: T) -> [T; 3] {
        let mut x = self.corner;
        x[self.u] += s * self.hu;
        x[self.v] += t * self.hv;
        x
    }

    /// Bilinear shape function values at `(s, t)`.
    pub fn shape(s: T, t: T) -> [T; 4] {
        let one = T::one();
        [(one - s) * (one - t), s * (one - t), (one - s) * t, s * t]
    }
}

/// Per-cell phase label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Inclusion,
    Matrix,
}

impl Phase {
    pub fn label(self) -> u8 {
        match self {
            Phase::Inclusion => 1,
            Phase::Matrix => 2,
        }
    }

    pub fn from_label(l: u8) -> Option<Self> {
        match l {
            1 => Some(Phase::Inclusion),
            2 => Some(Phase::Matrix),
            _ => None,
        }
    }
}

/// Two-phase piecewise constant conductivity on a voxel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductivityField<T> {
    grid: Grid<T>,
    phase: Vec<Phase>,
    sigma1: T,
    sigma2: T,
}

impl<T: Real> ConductivityField<T> {
    pub fn new(grid: Grid<T>, phase: Vec<Phase>, sigma1: T, sigma2: T) -> Result<Self> {
        check_conductivities(sigma1, sigma2)?;
        if phase.len() != grid.n_cells() {
            return Err(Error::GridMismatch(format!(
                "{} phase labels for {} cells",
                phase.len(),
                grid.n_cells()
            )));
        }
        Ok(Self { grid, phase, sigma1, sigma2 })
    }

    pub fn from_labels(grid: Grid<T>, labels: &[u8], sigma1: T, sigma2: T) -> Result<Self> {
        let phase = labels
            .iter()
            .map(|&l| Phase::from_label(l).ok_or_else(|| Error::InvalidInput(format!("phase label {l}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, phase, sigma1, sigma2)
    }

    /// Labels each cell by evaluating `inside` at its centre.
    pub fn from_indicator(grid: Grid<T>, sigma1: T, sigma2: T, inside: impl Fn([T; 3]) -> bool) -> Result<Self> {
        let phase = (0..grid.n_cells())
            .map(|c| if inside(grid.cell_center(c)) { Phase::Inclusion } else { Phase::Matrix })
            .collect();
        Self::new(grid, phase, sigma1, sigma2)
    }

    pub fn homogeneous(grid: Grid<T>, phase: Phase, sigma1: T, sigma2: T) -> Result<Self> {
        Self::new(grid, vec![phase; grid.n_cells()], sigma1, sigma2)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn phases(&self) -> &[Phase] {
        &self.phase
    }

    pub fn sigma1(&self) -> T {
        self.sigma1
    }

    pub fn sigma2(&self) -> T {
        self.sigma2
    }

    #[inline]
    pub fn sigma(&self, c: usize) -> T {
        match self.phase[c] {
            Phase::Inclusion => self.sigma1,
            Phase::Matrix => self.sigma2,
        }
    }

    pub fn cell_sigmas(&self) -> Vec<T> {
        (0..self.phase.len()).map(|c| self.sigma(c)).collect()
    }

    pub fn n_inclusion(&self) -> usize {
        self.phase.iter().filter(|&&p| p == Phase::Inclusion).count()
    }

    /// Voxel volume fraction of phase 1.
    pub fn f1(&self) -> T {
        T::from_count(self.n_inclusion()) / T::from_count(self.phase.len())
    }

    /// True when no phase-1 cell touches the outer boundary.
    pub fn inclusion_is_interior(&self) -> bool {
        (0..self.phase.len()).all(|c| {
            if self.phase[c] == Phase::Matrix {
                return true;
            }
            let ijk = self.grid.cell_coords(c);
            (0..3).all(|a| ijk[a] > 0 && ijk[a] + 1 < self.grid.dims[a])
        })
    }
}
