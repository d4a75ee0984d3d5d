//! Voxel geometry from a scenario config, and the binary mask format.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use incbound_core::pde::{ConductivityField, Grid, Phase};
use incbound_core::ConductivityFieldD;
use serde::{Deserialize, Serialize};

use crate::config::{rotation_from_angles, InclusionConfig, ScenarioConfig};
use crate::error::{HarnessError, HarnessResult};

pub const MASK_MAGIC: &[u8; 4] = b"TBM1";

/// Lower floor of the discretization allowance.
pub const MIN_ALLOWANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Geometry {
    pub field: ConductivityFieldD,
    /// Voxel volume fraction of phase 1.
    pub f1: f64,
    /// Analytic volume fraction of the shape, when it has one.
    pub nominal_f1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub realized_f1: f64,
    pub nominal_f1: Option<f64>,
    pub n_inclusion_cells: usize,
    pub inclusion_is_interior: bool,
}

impl Geometry {
    pub fn summary(&self) -> GeometrySummary {
        GeometrySummary {
            realized_f1: self.f1,
            nominal_f1: self.nominal_f1,
            n_inclusion_cells: self.field.n_inclusion(),
            inclusion_is_interior: self.field.inclusion_is_interior(),
        }
    }

    /// `δ_grid = max(1e-6, f₁·h_max/ℓ)` with `ℓ` the radius of the sphere of
    /// volume `f₁|Ω|`.
    pub fn default_allowance(&self) -> f64 {
        let grid = self.field.grid();
        let hmax = grid.spacing.iter().copied().fold(0.0, f64::max);
        if self.f1 <= 0.0 {
            return MIN_ALLOWANCE;
        }
        let ell = (3.0 * self.f1 * grid.volume() / (4.0 * PI)).cbrt();
        (self.f1 * hmax / ell).max(MIN_ALLOWANCE)
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Voxelizes the inclusion by cell-centre membership.
pub fn build_geometry(cfg: &ScenarioConfig) -> HarnessResult<Geometry> {
    let grid = Grid::from_extent(cfg.domain.grid, cfg.domain.extent).map_err(HarnessError::stage("geometry"))?;
    let (s1, s2) = (cfg.materials.sigma1, cfg.materials.sigma2);
    let volume = grid.volume();
    let ball = 4.0 * PI / 3.0;
    let (field, nominal) = match &cfg.inclusion {
        InclusionConfig::Sphere { center, radius } => {
            let r2 = sq(*radius);
            let f = ConductivityField::from_indicator(grid, s1, s2, |x| (0..3).map(|a| sq(x[a] - center[a])).sum::<f64>() < r2);
            (f, Some(ball * radius.powi(3) / volume))
        }
        InclusionConfig::Ellipsoid { center, semi_axes, angles_deg } => {
            let r = rotation_from_angles(*angles_deg);
            let f = ConductivityField::from_indicator(grid, s1, s2, |x| {
                let d = [0, 1, 2].map(|a| x[a] - center[a]);
                // body coordinates y = Rᵀ d
                (0..3).map(|k| sq((0..3).map(|a| r[(a, k)] * d[a]).sum::<f64>() / semi_axes[k])).sum::<f64>() < 1.0
            });
            (f, Some(ball * semi_axes.iter().product::<f64>() / volume))
        }
        InclusionConfig::MultiSphere { spheres } => {
            let f = ConductivityField::from_indicator(grid, s1, s2, |x| {
                spheres.iter().any(|s| (0..3).map(|a| sq(x[a] - s.center[a])).sum::<f64>() < sq(s.radius))
            });
            let disjoint = spheres.iter().enumerate().all(|(i, a)| {
                spheres[i + 1..].iter().all(|b| {
                    (0..3).map(|k| sq(a.center[k] - b.center[k])).sum::<f64>().sqrt() >= a.radius + b.radius
                })
            });
            let nominal = disjoint.then(|| spheres.iter().map(|s| ball * s.radius.powi(3)).sum::<f64>() / volume);
            (f, nominal)
        }
        InclusionConfig::MaskFile { path } => {
            let (dims, labels) = load_mask(path)?;
            if dims != cfg.domain.grid {
                return Err(HarnessError::Config(format!(
                    "mask {} has dims {dims:?} but the grid is {:?}",
                    path.display(),
                    cfg.domain.grid
                )));
            }
            (ConductivityField::from_labels(grid, &labels, s1, s2), None)
        }
    };
    let field = field.map_err(HarnessError::stage("geometry"))?;
    Ok(Geometry { f1: field.f1(), field, nominal_f1: nominal })
}

/// Writes `TBM1`, the cell dims as 3×u64 little-endian, then one label byte
/// per cell (1 inclusion, 2 matrix), x-fastest.
pub fn write_mask<W: Write>(mut w: W, dims: [usize; 3], phases: &[Phase]) -> std::io::Result<()> {
    w.write_all(MASK_MAGIC)?;
    for d in dims {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    let bytes: Vec<u8> = phases.iter().map(|p| p.label()).collect();
    w.write_all(&bytes)?;
    w.flush()
}

pub fn read_mask<R: Read>(mut r: R) -> HarnessResult<([usize; 3], Vec<u8>)> {
    let bad = |m: &str| HarnessError::Config(format!("mask: {m}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
    if &magic != MASK_MAGIC {
        return Err(bad("bad magic"));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        let mut b = [0u8; 8];
        r.read_exact(&mut b).map_err(|_| bad("truncated header"))?;
        *d = usize::try_from(u64::from_le_bytes(b)).map_err(|_| bad("dimension overflow"))?;
    }
    let n = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or_else(|| bad("dimension overflow"))?;
    let mut labels = Vec::new();
    r.read_to_end(&mut labels)?;
    if labels.len() != n {
        return Err(bad(&format!("{} labels for {n} cells", labels.len())));
    }
    if let Some(l) = labels.iter().find(|&&l| Phase::from_label(l).is_none()) {
        return Err(bad(&format!("invalid label {l}")));
    }
    Ok((dims, labels))
}

pub fn save_mask(path: &Path, field: &ConductivityFieldD) -> HarnessResult<()> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    write_mask(std::io::BufWriter::new(file), field.grid().dims, field.phases())?;
    Ok(())
}

pub fn load_mask(path: &Path) -> HarnessResult<([usize; 3], Vec<u8>)> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::Config(format!("mask {}: {e}", path.display())))?;
    read_mask(std::io::BufReader::new(file))
}
