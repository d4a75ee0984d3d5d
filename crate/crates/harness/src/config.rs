//! Scenario configuration (TOML) and its validation.

use std::path::{Path, PathBuf};

use incbound_core::bounds::ScanOptions;
use incbound_core::pde::{Series, SolverOptions, MIN_CELLS};
use incbound_core::tensor::{Matrix3, LIMIT_SCHEDULE};
use incbound_core::Matrix3d;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, HarnessResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub domain: DomainConfig,
    pub materials: Materials,
    #[serde(default)]
    pub inclusion: InclusionConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// Box side lengths; the box is centred at the origin.
    #[serde(default = "unit_extent")]
    pub extent: [f64; 3],
    #[serde(default = "default_grid")]
    pub grid: [usize; 3],
}

fn unit_extent() -> [f64; 3] {
    [1.0; 3]
}

fn default_grid() -> [usize; 3] {
    [48; 3]
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { extent: unit_extent(), grid: default_grid() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Materials {
    pub sigma1: f64,
    pub sigma2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SphereSpec {
    #[serde(default)]
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum InclusionConfig {
    Sphere {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
    },
    Ellipsoid {
        #[serde(default)]
        center: [f64; 3],
        semi_axes: [f64; 3],
        /// Rotations about x, then y, then z, in degrees.
        #[serde(default)]
        angles_deg: [f64; 3],
    },
    MultiSphere {
        spheres: Vec<SphereSpec>,
    },
    /// Binary mask in the `TBM1` format; see [`crate::geometry::save_mask`].
    MaskFile {
        path: PathBuf,
    },
}

impl Default for InclusionConfig {
    fn default() -> Self {
        InclusionConfig::Sphere { center: [0.0; 3], radius: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirichletConfig {
    /// `V_i = Σ_k x_k B_ki`.
    AffineDirichlet {
        #[serde(default = "Matrix3::identity")]
        matrix: Matrix3d,
    },
    DirichletExpr {
        components: [Series<f64>; 3],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NeumannConfig {
    /// `q = −n`.
    SpecialNeumann,
    /// Fluxes generated by `(α, β, J⁰)`.
    NeumannPotentials {
        #[serde(default)]
        alpha: Series<f64>,
        #[serde(default)]
        beta: Series<f64>,
        #[serde(default = "Matrix3::identity")]
        j0: Matrix3d,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub dirichlet: Option<DirichletConfig>,
    pub neumann: Option<NeumannConfig>,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            dirichlet: Some(DirichletConfig::AffineDirichlet { matrix: Matrix3::identity() }),
            neumann: Some(NeumannConfig::SpecialNeumann),
        }
    }
}

/// Moments of a caller-built exterior field, for a lower bound on `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExteriorConfig {
    /// `⟨J̲⟩` over the exterior region.
    pub mean: Matrix3d,
    /// `⟨Tr J̲ᵀ𝕋′J̲⟩` over the exterior region.
    pub form_mean: f64,
    /// Volume fraction of the body within the periodic cube.
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default = "default_limit_exponents")]
    pub limit_exponents: Vec<i32>,
    #[serde(default = "default_prescan")]
    pub prescan: usize,
    #[serde(default = "default_f1_tolerance")]
    pub f1_tolerance: f64,
    #[serde(default = "default_psd_eps")]
    pub psd_eps: f64,
    /// Discretization allowance `δ_grid`; derived from the grid when absent.
    pub allowance: Option<f64>,
    pub exterior: Option<ExteriorConfig>,
}

fn default_limit_exponents() -> Vec<i32> {
    LIMIT_SCHEDULE.to_vec()
}

fn default_prescan() -> usize {
    ScanOptions::default().prescan
}

fn default_f1_tolerance() -> f64 {
    ScanOptions::default().tolerance
}

fn default_psd_eps() -> f64 {
    ScanOptions::default().eps
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            limit_exponents: default_limit_exponents(),
            prescan: default_prescan(),
            f1_tolerance: default_f1_tolerance(),
            psd_eps: default_psd_eps(),
            allowance: None,
            exterior: None,
        }
    }
}

impl BoundsConfig {
    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            prescan: self.prescan,
            tolerance: self.f1_tolerance,
            eps: self.psd_eps,
            limit_exponents: self.limit_exponents.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    /// Binary dump of the normalized Dirichlet potentials.
    pub field_dump: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    pub threads: Option<usize>,
}

fn default_tolerance() -> f64 {
    SolverOptions::default().tolerance
}

fn default_max_iterations() -> usize {
    SolverOptions::default().max_iterations
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: default_tolerance(), max_iterations: default_max_iterations(), threads: None }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { tolerance: self.tolerance, max_iterations: self.max_iterations, ..SolverOptions::default() }
    }
}

fn invalid(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

/// Rotation `R_z R_y R_x` from angles in degrees.
pub fn rotation_from_angles(angles_deg: [f64; 3]) -> Matrix3d {
    let [ax, ay, az] = angles_deg.map(f64::to_radians);
    let rx = Matrix3([[1.0, 0.0, 0.0], [0.0, ax.cos(), -ax.sin()], [0.0, ax.sin(), ax.cos()]]);
    let ry = Matrix3([[ay.cos(), 0.0, ay.sin()], [0.0, 1.0, 0.0], [-ay.sin(), 0.0, ay.cos()]]);
    let rz = Matrix3([[az.cos(), -az.sin(), 0.0], [az.sin(), az.cos(), 0.0], [0.0, 0.0, 1.0]]);
    rz * ry * rx
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> HarnessResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| invalid(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config; a relative mask path is resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let InclusionConfig::MaskFile { path: mask } = &mut cfg.inclusion {
            if mask.is_relative() {
                if let Some(dir) = path.parent() {
                    *mask = dir.join(&*mask);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    pub fn with_grid(mut self, grid: [usize; 3]) -> HarnessResult<Self> {
        self.domain.grid = grid;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> HarnessResult<()> {
        let Materials { sigma1, sigma2 } = self.materials;
        if !(sigma2 > 0.0 && sigma1 > sigma2 && sigma1.is_finite()) {
            return Err(invalid(format!("need sigma1 > sigma2 > 0, got sigma1 = {sigma1}, sigma2 = {sigma2}")));
        }
        if self.domain.grid.iter().any(|&n| n < MIN_CELLS) {
            return Err(invalid(format!("grid {:?} below the minimum of {MIN_CELLS} cells per axis", self.domain.grid)));
        }
        if self.domain.extent.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(invalid("box extent must be positive"));
        }
        if !(self.solver.tolerance > 0.0) || self.solver.max_iterations == 0 {
            return Err(invalid("solver tolerance and max_iterations must be positive"));
        }
        if self.solver.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        if self.boundary.dirichlet.is_none() && self.boundary.neumann.is_none() {
            return Err(invalid("at least one of boundary.dirichlet and boundary.neumann is required"));
        }
        let b = &self.bounds;
        if b.prescan < 2 || !(b.f1_tolerance > 0.0) || !(b.psd_eps >= 0.0) {
            return Err(invalid("bounds need prescan >= 2, f1_tolerance > 0 and psd_eps >= 0"));
        }
        let mut ex = b.limit_exponents.clone();
        ex.sort_unstable();
        ex.dedup();
        if ex.len() < 2 || ex.len() != b.limit_exponents.len() || ex[0] < 1 {
            return Err(invalid("limit_exponents needs at least two distinct positive exponents"));
        }
        if let Some(a) = b.allowance {
            if !(a >= 0.0) {
                return Err(invalid("allowance must be nonnegative"));
            }
        }
        if let Some(e) = &b.exterior {
            if !(e.p > 0.0 && e.p <= 1.0) {
                return Err(invalid("exterior.p must lie in (0, 1]"));
            }
        }
        self.validate_inclusion()
    }

    fn validate_inclusion(&self) -> HarnessResult<()> {
        let half = self.domain.extent.map(|e| 0.5 * e);
        let inside = |c: [f64; 3], reach: [f64; 3]| (0..3).all(|a| c[a].abs() + reach[a] < half[a]);
        match &self.inclusion {
            InclusionConfig::Sphere { center, radius } => {
                if !(*radius >= 0.0) {
                    return Err(invalid("sphere radius must be nonnegative"));
                }
                if !inside(*center, [*radius; 3]) {
                    return Err(invalid("sphere must lie strictly inside the box"));
                }
            }
            InclusionConfig::Ellipsoid { center, semi_axes, angles_deg } => {
                if semi_axes.iter().any(|&s| !(s > 0.0)) {
                    return Err(invalid("ellipsoid semi-axes must be positive"));
                }
                let r = rotation_from_angles(*angles_deg);
                let reach = [0, 1, 2].map(|a| (0..3).map(|k| (r[(a, k)] * semi_axes[k]).powi(2)).sum::<f64>().sqrt());
                if !inside(*center, reach) {
                    return Err(invalid("ellipsoid must lie strictly inside the box"));
                }
            }
            InclusionConfig::MultiSphere { spheres } => {
                for s in spheres {
                    if !(s.radius >= 0.0) || !inside(s.center, [s.radius; 3]) {
                        return Err(invalid("every sphere must have radius >= 0 and lie strictly inside the box"));
                    }
                }
            }
            InclusionConfig::MaskFile { .. } => {}
        }
        Ok(())
    }

    /// A sphere scenario with affine Dirichlet and special Neumann data.
    pub fn sphere(n: usize, radius: f64, sigma1: f64, sigma2: f64) -> Self {
        Self {
            domain: DomainConfig { extent: unit_extent(), grid: [n; 3] },
            materials: Materials { sigma1, sigma2 },
            inclusion: InclusionConfig::Sphere { center: [0.0; 3], radius },
            boundary: BoundaryConfig::default(),
            bounds: BoundsConfig::default(),
            output: OutputConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}
