//! Voxel forward solver for `∇·σ∇V = 0` on a box and the volume and
//! boundary quadratures built on its solutions.
//!
//! Potentials are trilinear on each voxel and conductivity is constant per
//! voxel. With this discretization every volume/boundary identity used
//! downstream (mean field, energy, null-Lagrangian pairings) holds exactly
//! at the discrete level, up to the linear solver residual.

mod boundary;
mod dump;
mod fields;
mod grid;
mod solver;

pub use boundary::{
    flux_from_potentials, gauss_legendre, BoundaryData, DirichletData, FluxPotentials, NeumannData, NeumannLoad,
    Series, SeriesTerm, Trig,
};
pub use dump::{read_field_dump, write_field_dump, FieldDump, DUMP_MAGIC};
pub use fields::{
    boundary_mean_e, boundary_mean_j, cell_gradient, energy_boundary, energy_volume, extract_fields,
    minor_tensor_boundary, minor_tensor_volume, null_lagrangian_pairing, translated_divergence_residual,
    volume_average, volume_mean_e, volume_mean_j, FieldMatrix, Pairing,
};
pub use grid::{tangential_axes, ConductivityField, FaceCell, Grid, Phase, Side, MIN_CELLS};
pub use solver::{solve, solve_laplace, solve_with, BoundaryKind, Mode, PotentialSet, SolveStats, SolverOptions};
