//! Measurable objects built from boundary data: the response matrices `A`
//! and `A′`, normalization and diagonalization transforms, the `M` tensor
//! and attainability residuals.

use serde::{Deserialize, Serialize};

use crate::pde::{
    boundary_mean_e, boundary_mean_j, energy_boundary, energy_volume, extract_fields, minor_tensor_boundary,
    minor_tensor_volume, solve_laplace, solve_with, volume_mean_e, volume_mean_j, BoundaryData, BoundaryKind,
    ConductivityField, DirichletData, FieldMatrix, Mode, NeumannData, Phase, PotentialSet, SolverOptions,
};
use crate::tensor::{translation_t, Matrix3, Tensor4};
use crate::{Error, Real, Result};

/// Largest acceptable condition number of the mean field or current.
pub const MAX_CONDITION: f64 = 1e8;
/// Relative asymmetry above which a response matrix triggers a warning.
pub const ASYMMETRY_TOLERANCE: f64 = 1e-6;
/// Relative volume/boundary disagreement above which a warning is raised.
pub const ROUTE_TOLERANCE: f64 = 1e-5;

/// A 3×3 quantity evaluated by volume and boundary quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct MatrixRoutes<T> {
    /// Symmetrized boundary value.
    pub value: Matrix3<T>,
    pub volume: Matrix3<T>,
    pub boundary: Matrix3<T>,
    /// `‖boundary − volume‖_max / ‖boundary‖_max`.
    pub route_residual: T,
    /// `‖B − Bᵀ‖_F / ‖B‖_F` of the raw boundary value.
    pub asymmetry: T,
}

impl<T: Real> MatrixRoutes<T> {
    fn new(volume: Matrix3<T>, boundary: Matrix3<T>) -> Self {
        let scale = boundary.max_abs().max(T::min_positive_value());
        Self {
            value: boundary.symmetric_part(),
            volume,
            boundary,
            route_residual: (boundary - volume).max_abs() / scale,
            asymmetry: boundary.asymmetry(),
        }
    }

    pub fn warnings(&self, what: &str) -> Vec<String> {
        let mut w = Vec::new();
        if self.asymmetry > T::lit(ASYMMETRY_TOLERANCE) {
            w.push(format!("{what}: asymmetry {} exceeds {ASYMMETRY_TOLERANCE:e}", self.asymmetry));
        }
        if self.route_residual > T::lit(ROUTE_TOLERANCE) {
            w.push(format!(
                "{what}: volume and boundary routes differ by {} (volume {:?}, boundary {:?})",
                self.route_residual, self.volume.0, self.boundary.0
            ));
        }
        w
    }
}

/// A fourth-order tensor evaluated by volume and boundary quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct TensorRoutes<T> {
    /// Volume value.
    pub value: Tensor4<T>,
    pub boundary: Tensor4<T>,
    pub route_residual: T,
}

impl<T: Real> TensorRoutes<T> {
    fn new(volume: Tensor4<T>, boundary: Tensor4<T>) -> Self {
        let scale = volume.max_abs().max(T::min_positive_value());
        let route_residual = volume.max_abs_diff(&boundary) / scale;
        Self { value: volume, boundary, route_residual }
    }

    pub fn rotate(&self, r: &Matrix3<T>) -> Self {
        Self { value: self.value.rotate(r), boundary: self.boundary.rotate(r), route_residual: self.route_residual }
    }

    pub fn warnings(&self, what: &str) -> Vec<String> {
        if self.route_residual > T::lit(ROUTE_TOLERANCE) {
            vec![format!("{what}: volume and boundary routes differ by {}", self.route_residual)]
        } else {
            Vec::new()
        }
    }
}

fn combine_to_identity<T: Real>(v: &PotentialSet<T>, g: Matrix3<T>) -> Result<(Matrix3<T>, PotentialSet<T>)> {
    let cond = g.condition_number();
    if !(cond.as_f64() <= MAX_CONDITION) {
        return Err(Error::MeasurementDegeneracy { condition: cond.as_f64() });
    }
    let k = g.inverse().ok_or(Error::MeasurementDegeneracy { condition: f64::INFINITY })?;
    Ok((k, v.combine(&k)))
}

/// Recombines Dirichlet potentials so that `⟨E⟩ = I`; returns `K = ⟨E⟩⁻¹`.
pub fn normalize_mean<T: Real>(v: &PotentialSet<T>) -> Result<(Matrix3<T>, PotentialSet<T>)> {
    combine_to_identity(v, boundary_mean_e(v))
}

/// Recombines Neumann potentials so that `⟨J⟩ = I`; returns `K = ⟨J⟩⁻¹`.
pub fn normalize_current<T: Real>(v: &PotentialSet<T>) -> Result<(Matrix3<T>, PotentialSet<T>)> {
    combine_to_identity(v, boundary_mean_j(v))
}

/// `⟨E⟩` by both routes.
pub fn mean_field<T: Real>(v: &PotentialSet<T>) -> MatrixRoutes<T> {
    let mut r = MatrixRoutes::new(volume_mean_e(v), boundary_mean_e(v));
    r.value = r.boundary;
    r
}

/// `⟨J⟩` by both routes.
pub fn mean_current<T: Real>(v: &PotentialSet<T>) -> MatrixRoutes<T> {
    let mut r = MatrixRoutes::new(volume_mean_j(v), boundary_mean_j(v));
    r.value = r.boundary;
    r
}

/// `A = ⟨Eᵀ σ E⟩` for Dirichlet potentials.
pub fn compute_a<T: Real>(v: &PotentialSet<T>) -> Result<MatrixRoutes<T>> {
    if v.kind() != BoundaryKind::Dirichlet {
        return Err(Error::InvalidInput("A needs potentials from Dirichlet data".into()));
    }
    Ok(MatrixRoutes::new(energy_volume(v), energy_boundary(v)))
}

/// `A′ = ⟨Jᵀ σ⁻¹ J⟩` for Neumann potentials.
pub fn compute_aprime<T: Real>(v: &PotentialSet<T>) -> Result<MatrixRoutes<T>> {
    if v.kind() != BoundaryKind::Neumann {
        return Err(Error::InvalidInput("A' needs potentials from Neumann data".into()));
    }
    Ok(MatrixRoutes::new(energy_volume(v), energy_boundary(v)))
}

/// Eigen-decomposition of a symmetric response matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Diagonalization<T> {
    /// Orthogonal, columns are eigenvectors; `RᵀAR = diag(λ)`.
    pub r: Matrix3<T>,
    /// Descending.
    pub lambda: [T; 3],
    pub rotated: Matrix3<T>,
}

/// Diagonalizes `A` with descending eigenvalues; the largest-magnitude entry
/// of each eigenvector is made positive.
pub fn diagonalize<T: Real>(a: &Matrix3<T>) -> Diagonalization<T> {
    let (lambda, mut r) = a.symmetric_eigen();
    for j in 0..3 {
        let mut big = 0;
        for i in 1..3 {
            if r[(i, j)].abs() > r[(big, j)].abs() {
                big = i;
            }
        }
        if r[(big, j)] < T::zero() {
            for i in 0..3 {
                r[(i, j)] = -r[(i, j)];
            }
        }
    }
    let rotated = r.transpose() * *a * r;
    Diagonalization { r, lambda, rotated }
}

/// `M` from the potentials at hand: volume quadrature of the gradient
/// minors and boundary quadrature with tangential derivatives.
pub fn compute_m_from_potentials<T: Real>(v: &PotentialSet<T>) -> TensorRoutes<T> {
    TensorRoutes::new(minor_tensor_volume(v), minor_tensor_boundary(v))
}

/// `M` for Dirichlet data: harmonic extension, then both quadratures.
pub fn compute_m<T: Real>(
    data: &DirichletData<T>,
    grid: &crate::pde::Grid<T>,
    opts: &SolverOptions,
) -> Result<(TensorRoutes<T>, PotentialSet<T>)> {
    let u = solve_laplace(grid, &BoundaryData::Dirichlet(data.clone()), opts)?;
    Ok((compute_m_from_potentials(&u), u))
}

/// Nodal Dirichlet data carrying the boundary values of `v`.
pub fn dirichlet_trace<T: Real>(v: &PotentialSet<T>) -> DirichletData<T> {
    DirichletData::Nodal([0, 1, 2].map(|i| v.values(i).to_vec()))
}

/// Uniformity residuals of a field matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attainability {
    /// Max over phase-1 cells of `‖E − Ē₁‖_F / ‖Ē₁‖_F`; `None` without phase 1.
    pub r1: Option<f64>,
    /// Same, restricted to phase-1 cells whose 26 neighbours are phase 1.
    pub r1_interior: Option<f64>,
    /// Max over cells of `‖L_{σ₂}E − mean‖_F / ‖mean‖_F`.
    pub r2: f64,
}

pub fn attainability_residual<T: Real>(e: &FieldMatrix<T>, field: &ConductivityField<T>) -> Result<Attainability> {
    let grid = field.grid();
    if e.grid() != grid {
        return Err(Error::GridMismatch("field matrix and conductivity differ".into()));
    }
    let phases = field.phases();
    let inside: Vec<usize> = (0..grid.n_cells()).filter(|&c| phases[c] == Phase::Inclusion).collect();
    let (r1, r1_interior) = if inside.is_empty() {
        (None, None)
    } else {
        let mean = inside
            .iter()
            .fold(Matrix3::zeros(), |acc, &c| acc + *e.get(c))
            .scale(T::one() / T::from_count(inside.len()));
        let norm = mean.frobenius().max(T::min_positive_value());
        let dev = |c: usize| ((*e.get(c) - mean).frobenius() / norm).as_f64();
        let all = inside.iter().map(|&c| dev(c)).fold(0.0, f64::max);
        let interior = inside
            .iter()
            .filter(|&&c| surrounded_by_inclusion(field, c))
            .map(|&c| dev(c))
            .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |x| x.max(d))));
        (Some(all), interior)
    };
    let s2 = field.sigma2();
    let lv: Vec<Matrix3<T>> = (0..grid.n_cells())
        .map(|c| e.get(c).scale(field.sigma(c)) + translation_t(e.get(c)).scale(s2))
        .collect();
    let mean = lv.iter().fold(Matrix3::zeros(), |acc, &m| acc + m).scale(T::one() / T::from_count(lv.len()));
    let norm = mean.frobenius().max(T::min_positive_value());
    let r2 = lv.iter().map(|m| ((*m - mean).frobenius() / norm).as_f64()).fold(0.0, f64::max);
    Ok(Attainability { r1, r1_interior, r2 })
}

fn surrounded_by_inclusion<T: Real>(field: &ConductivityField<T>, c: usize) -> bool {
    let grid = field.grid();
    let [i, j, k] = grid.cell_coords(c).map(|x| x as isize);
    let d = grid.dims.map(|x| x as isize);
    for dz in -1..=1 {
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (a, b, cc) = (i + dx, j + dy, k + dz);
                if a < 0 || b < 0 || cc < 0 || a >= d[0] || b >= d[1] || cc >= d[2] {
                    return false;
                }
                if field.phases()[grid.cell_index(a as usize, b as usize, cc as usize)] != Phase::Inclusion {
                    return false;
                }
            }
        }
    }
    true
}

/// Response from Dirichlet measurements after normalization and rotation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct DirichletResponse<T> {
    /// `RᵀAR` (diagonal up to roundoff).
    pub a: Matrix3<T>,
    /// `A` before rotation, with route data.
    pub a_routes: MatrixRoutes<T>,
    pub lambda: [T; 3],
    pub r: Matrix3<T>,
    pub k: Matrix3<T>,
    /// `⟨E⟩` of the normalized potentials.
    pub mean_e: MatrixRoutes<T>,
    /// Rotated `M`.
    pub m: TensorRoutes<T>,
    pub attainability: Attainability,
    pub warnings: Vec<String>,
}

/// Response from Neumann measurements after normalization.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct NeumannResponse<T> {
    pub aprime: MatrixRoutes<T>,
    pub k: Matrix3<T>,
    pub mean_j: MatrixRoutes<T>,
    pub warnings: Vec<String>,
}

/// Solver effort of a measurement run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SolveSummary {
    pub iterations: usize,
    pub residual: f64,
}

impl SolveSummary {
    fn of<T: Real>(v: &PotentialSet<T>) -> Self {
        Self { iterations: v.max_iterations(), residual: v.max_residual() }
    }
}

/// Solve, normalize, measure `A`, diagonalize and measure the rotated `M`.
pub fn measure_dirichlet<T: Real>(
    field: &ConductivityField<T>,
    data: &DirichletData<T>,
    opts: &SolverOptions,
) -> Result<(DirichletResponse<T>, [SolveSummary; 2])> {
    measure_dirichlet_potentials(field, data, opts).map(|(r, s, _)| (r, s))
}

/// [`measure_dirichlet`], also returning the normalized potentials.
pub fn measure_dirichlet_potentials<T: Real>(
    field: &ConductivityField<T>,
    data: &DirichletData<T>,
    opts: &SolverOptions,
) -> Result<(DirichletResponse<T>, [SolveSummary; 2], PotentialSet<T>)> {
    let v = solve_with(field, &BoundaryData::Dirichlet(data.clone()), Mode::Conduction, opts)?;
    let (k, vn) = normalize_mean(&v)?;
    let a_routes = compute_a(&vn)?;
    let diag = diagonalize(&a_routes.value);
    let (m, u) = compute_m(&dirichlet_trace(&vn), field.grid(), opts)?;
    let m = m.rotate(&diag.r);
    let (e, _) = extract_fields(&vn);
    let attainability = attainability_residual(&e, field)?;
    let mean_e = mean_field(&vn);
    let mut warnings = a_routes.warnings("A");
    warnings.extend(m.warnings("M"));
    Ok((
        DirichletResponse {
            a: diag.rotated,
            a_routes,
            lambda: diag.lambda,
            r: diag.r,
            k,
            mean_e,
            m,
            attainability,
            warnings,
        },
        [SolveSummary::of(&v), SolveSummary::of(&u)],
        vn,
    ))
}

/// Solve and normalize Neumann measurements and measure `A′`.
pub fn measure_neumann<T: Real>(
    field: &ConductivityField<T>,
    data: &NeumannData<T>,
    opts: &SolverOptions,
) -> Result<(NeumannResponse<T>, SolveSummary)> {
    measure_neumann_potentials(field, data, opts).map(|(r, s, _)| (r, s))
}

/// [`measure_neumann`], also returning the normalized potentials.
pub fn measure_neumann_potentials<T: Real>(
    field: &ConductivityField<T>,
    data: &NeumannData<T>,
    opts: &SolverOptions,
) -> Result<(NeumannResponse<T>, SolveSummary, PotentialSet<T>)> {
    let v = solve_with(field, &BoundaryData::Neumann(data.clone()), Mode::Conduction, opts)?;
    let (k, vn) = normalize_current(&v)?;
    let aprime = compute_aprime(&vn)?;
    let mean_j = mean_current(&vn);
    let warnings = aprime.warnings("A'");
    Ok((NeumannResponse { aprime, k, mean_j, warnings }, SolveSummary::of(&v), vn))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::translation_t_tensor;

    #[test]
    fn diagonalize_hand_example() {
        let a = Matrix3([[2.0f64, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 3.0]]);
        let d = diagonalize(&a);
        for (x, y) in d.lambda.iter().zip([3.0, 3.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((d.rotated - Matrix3::from_diagonal(d.lambda)).max_abs() < 1e-12);
        assert!((d.r.transpose() * d.r - Matrix3::identity()).max_abs() < 1e-12);
    }

    #[test]
    fn diagonal_input_gives_permutation() {
        let a = Matrix3::from_diagonal([1.0, 5.0, 2.0]);
        let d = diagonalize(&a);
        assert_eq!(d.lambda, [5.0, 2.0, 1.0]);
        let expected = Matrix3([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert!((d.r - expected).max_abs() < 1e-12);
    }

    #[test]
    fn translation_tensor_is_rotation_invariant() {
        let t = translation_t_tensor::<f64>();
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rz = Matrix3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]);
        let (c, s) = (1.1f64.cos(), 1.1f64.sin());
        let rx = Matrix3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]);
        assert!(t.rotate(&(rz * rx)).max_abs_diff(&t) < 1e-12);
    }
}
