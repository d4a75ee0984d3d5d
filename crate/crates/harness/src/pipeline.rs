//! Solve → measure → bound orchestration and the JSON report.

use std::path::Path;
use std::time::Instant;

use incbound_core::bounds::{
    evaluate, g_exact, g_lower_from_exterior, BoundInputs, BoundValue, DirichletInputs, Feasibility, GValue,
    LimitDiscrepancy, NeumannInputs,
};
use incbound_core::measure::{measure_dirichlet_potentials, measure_neumann_potentials, Attainability, SolveSummary};
use incbound_core::pde::{write_field_dump, DirichletData, FluxPotentials, NeumannData, PotentialSet};
use incbound_core::tensor::{Matrix3, Tensor4};
use incbound_core::{Matrix3d, Tensor4d};
use serde::{Deserialize, Serialize};

use crate::config::{DirichletConfig, NeumannConfig, ScenarioConfig};
use crate::error::{HarnessError, HarnessResult};
use crate::geometry::{build_geometry, GeometrySummary};

/// Relative tolerance for treating the Neumann normalization as `sI`.
pub const SCALAR_NORMALIZATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RouteResiduals {
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "Aprime")]
    pub aprime: Option<f64>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
}

/// Measured response; matrices are row-major, `M` is 81 row-major values
/// in the standard basis, expressed in the eigenbasis of `A`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResponseData {
    #[serde(rename = "A")]
    pub a: Option<Matrix3d>,
    #[serde(rename = "Aprime")]
    pub aprime: Option<Matrix3d>,
    pub lambda: Option<[f64; 3]>,
    #[serde(rename = "R")]
    pub r: Option<Matrix3d>,
    #[serde(rename = "K")]
    pub k: Option<Matrix3d>,
    #[serde(rename = "K_neumann")]
    pub k_neumann: Option<Matrix3d>,
    #[serde(rename = "M")]
    pub m: Option<Vec<f64>>,
    pub affine_dirichlet: bool,
    pub special_neumann: bool,
    pub route_residuals: RouteResiduals,
}

impl ResponseData {
    pub fn m_tensor(&self) -> HarnessResult<Option<Tensor4d>> {
        let Some(v) = &self.m else { return Ok(None) };
        if v.len() != 81 {
            return Err(HarnessError::Config(format!("response M has {} entries, expected 81", v.len())));
        }
        let mut e = [[0.0; 9]; 9];
        for (p, row) in e.iter_mut().enumerate() {
            row.copy_from_slice(&v[9 * p..9 * p + 9]);
        }
        Ok(Some(Tensor4::from_matrix(e)))
    }
}

fn flatten(t: &Tensor4d) -> Vec<f64> {
    t.to_standard().matrix().iter().flat_map(|r| r.iter().copied()).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub threads: Option<usize>,
    /// Potential solve and `M` auxiliary solve.
    pub dirichlet: Option<[SolveSummary; 2]>,
    pub neumann: Option<SolveSummary>,
    pub wall_time_s: f64,
}

/// Output of [`simulate`]: everything [`bound`] needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    pub config: ScenarioConfig,
    pub truth_f1: f64,
    pub geometry: GeometrySummary,
    /// Declared discretization allowance `δ_grid`.
    pub allowance: f64,
    pub response: ResponseData,
    pub g: Option<GValue<f64>>,
    pub attainability: Option<Attainability>,
    pub solver: SolverReport,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsSection {
    pub upper_trace: Option<BoundValue<f64>>,
    pub upper_special: Option<BoundValue<f64>>,
    pub upper_pairwise: Option<BoundValue<f64>>,
    pub feasible_interval: Option<Feasibility>,
    pub lower_general: Option<BoundValue<f64>>,
    pub lower_special_neumann: Option<BoundValue<f64>>,
    pub lower_milton: Option<BoundValue<f64>>,
    pub lower_milton_singular: bool,
    pub allowance: f64,
    pub violations: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: ScenarioConfig,
    pub truth_f1: f64,
    pub geometry: GeometrySummary,
    pub response: ResponseData,
    pub bounds: BoundsSection,
    pub g: Option<GValue<f64>>,
    pub attainability: Option<Attainability>,
    pub limit_tensor: Option<LimitDiscrepancy>,
    pub solver: SolverReport,
    pub notes: Vec<String>,
}

impl Report {
    /// Fails with exit code 4 when the validity sandwich is violated.
    pub fn check(&self) -> HarnessResult<()> {
        if self.bounds.violations.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::Violations(self.bounds.violations.clone()))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs `f` on a dedicated pool when a thread count is given.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> HarnessResult<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn dirichlet_data(c: &DirichletConfig) -> DirichletData<f64> {
    match c {
        DirichletConfig::AffineDirichlet { matrix } => DirichletData::Affine(*matrix),
        DirichletConfig::DirichletExpr { components } => DirichletData::Expr(components.clone()),
    }
}

fn neumann_data(c: &NeumannConfig) -> NeumannData<f64> {
    match c {
        NeumannConfig::SpecialNeumann => NeumannData::Special,
        NeumannConfig::NeumannPotentials { alpha, beta, j0 } => {
            NeumannData::Potentials(FluxPotentials { alpha: alpha.clone(), beta: beta.clone(), j0: *j0 })
        }
    }
}

/// `Some(s)` when `k = sI` to [`SCALAR_NORMALIZATION_TOLERANCE`].
fn scalar_multiple(k: &Matrix3d) -> Option<f64> {
    let s = k.trace() / 3.0;
    let off = (*k - Matrix3::identity().scale(s)).max_abs();
    (s != 0.0 && off <= SCALAR_NORMALIZATION_TOLERANCE * s.abs()).then_some(s)
}

fn write_dump(path: &Path, v: &PotentialSet<f64>) -> HarnessResult<()> {
    let file = std::fs::File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    write_field_dump(std::io::BufWriter::new(file), v.grid(), &[v.values(0), v.values(1), v.values(2)])?;
    Ok(())
}

/// Builds the geometry, solves both branches and measures the response.
pub fn simulate(cfg: &ScenarioConfig) -> HarnessResult<Simulation> {
    cfg.validate()?;
    with_threads(cfg.solver.threads, || simulate_inner(cfg))?
}

fn simulate_inner(cfg: &ScenarioConfig) -> HarnessResult<Simulation> {
    let start = Instant::now();
    let geom = build_geometry(cfg)?;
    let opts = cfg.solver.options();
    let mut response = ResponseData::default();
    let mut notes = Vec::new();
    let mut solver = SolverReport { threads: cfg.solver.threads, ..SolverReport::default() };
    let mut attainability = None;
    let mut dump_source = None;

    if let Some(dc) = &cfg.boundary.dirichlet {
        let (d, summary, vn) =
            measure_dirichlet_potentials(&geom.field, &dirichlet_data(dc), &opts).map_err(HarnessError::stage("dirichlet"))?;
        response.a = Some(d.a_routes.value);
        response.lambda = Some(d.lambda);
        response.r = Some(d.r);
        response.k = Some(d.k);
        response.m = Some(flatten(&d.m.value));
        response.affine_dirichlet = matches!(dc, DirichletConfig::AffineDirichlet { .. });
        response.route_residuals.a = Some(d.a_routes.route_residual);
        response.route_residuals.m = Some(d.m.route_residual);
        attainability = Some(d.attainability);
        solver.dirichlet = Some(summary);
        notes.extend(d.warnings);
        dump_source = Some(vn);
    }

    let mut g = None;
    if let Some(nc) = &cfg.boundary.neumann {
        let data = neumann_data(nc);
        let (n, summary, vn) =
            measure_neumann_potentials(&geom.field, &data, &opts).map_err(HarnessError::stage("neumann"))?;
        response.aprime = Some(n.aprime.value);
        response.k_neumann = Some(n.k);
        response.special_neumann = matches!(nc, NeumannConfig::SpecialNeumann);
        response.route_residuals.aprime = Some(n.aprime.route_residual);
        solver.neumann = Some(summary);
        notes.extend(n.warnings);

        match scalar_multiple(&n.k) {
            Some(s) => {
                let raw = g_exact(&data, geom.field.grid()).map_err(HarnessError::stage("g"))?;
                g = Some(GValue { value: raw.value * s * s, ..raw });
            }
            None => notes.push("g: normalization of the Neumann data is not a scalar multiple of I, exact g unavailable".into()),
        }
        if g.is_none() {
            if let Some(e) = &cfg.bounds.exterior {
                g = Some(g_lower_from_exterior(&e.mean, e.form_mean, e.p).map_err(HarnessError::stage("g"))?);
            }
        }
        if dump_source.is_none() {
            dump_source = Some(vn);
        }
    }

    if let (Some(path), Some(v)) = (&cfg.output.field_dump, &dump_source) {
        write_dump(path, v)?;
    }

    let allowance = cfg.bounds.allowance.unwrap_or_else(|| geom.default_allowance());
    solver.wall_time_s = start.elapsed().as_secs_f64();
    Ok(Simulation {
        config: cfg.clone(),
        truth_f1: geom.f1,
        geometry: geom.summary(),
        allowance,
        response,
        g,
        attainability,
        solver,
        notes,
    })
}

/// Evaluates every bound from a simulated (or loaded) response.
pub fn bound(sim: &Simulation) -> HarnessResult<Report> {
    let cfg = &sim.config;
    cfg.validate()?;
    let r = &sim.response;
    let dirichlet = match (r.lambda, r.m_tensor()?) {
        (Some(lambda), Some(m)) => Some(DirichletInputs { lambda, m, affine: r.affine_dirichlet }),
        _ => None,
    };
    let neumann = r.aprime.map(|aprime| NeumannInputs { aprime, special: r.special_neumann, g: sim.g });
    let inputs = BoundInputs {
        sigma1: cfg.materials.sigma1,
        sigma2: cfg.materials.sigma2,
        dirichlet,
        neumann,
        truth: Some(sim.truth_f1),
        allowance: sim.allowance,
        scan: cfg.bounds.scan_options(),
    };
    let rep = evaluate(&inputs).map_err(HarnessError::stage("bounds"))?;
    let violations = rep.violations();
    Ok(Report {
        config: cfg.clone(),
        truth_f1: sim.truth_f1,
        geometry: sim.geometry,
        response: r.clone(),
        bounds: BoundsSection {
            upper_trace: rep.upper_trace,
            upper_special: rep.upper_special,
            upper_pairwise: rep.upper_pairwise,
            feasible_interval: rep.feasible_interval,
            lower_general: rep.lower_general,
            lower_special_neumann: rep.lower_special_neumann,
            lower_milton: rep.lower_milton,
            lower_milton_singular: rep.lower_milton_singular,
            allowance: rep.allowance,
            violations,
            notes: rep.notes,
        },
        g: rep.g,
        attainability: sim.attainability,
        limit_tensor: rep.limit_tensor,
        solver: sim.solver.clone(),
        notes: sim.notes.clone(),
    })
}

/// [`simulate`] then [`bound`]; writes the report when the config names a path.
pub fn run_scenario(cfg: &ScenarioConfig) -> HarnessResult<Report> {
    let report = bound(&simulate(cfg)?)?;
    if let Some(path) = &cfg.output.report {
        std::fs::write(path, report.to_json()).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(report)
}

/// Removes every `wall_time_s` entry, for run-to-run comparison.
pub fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(map) => {
            map.remove("wall_time_s");
            map.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_multiple_detection() {
        assert_eq!(scalar_multiple(&Matrix3::identity().scale(-2.0)), Some(-2.0));
        assert_eq!(scalar_multiple(&Matrix3::from_diagonal([1.0, 1.0, 1.1])), None);
    }

    #[test]
    fn small_scenario_round_trips_through_json() {
        let cfg = ScenarioConfig::sphere(8, 0.25, 3.0, 1.0);
        let sim = simulate(&cfg).unwrap();
        let text = serde_json::to_string(&sim).unwrap();
        let back: Simulation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sim);
        let a = bound(&sim).unwrap();
        let b = bound(&back).unwrap();
        let strip = |r: &Report| {
            let mut v = serde_json::to_value(r).unwrap();
            strip_timing(&mut v);
            v
        };
        assert_eq!(strip(&a), strip(&b));
        assert!(a.g.unwrap().value + 3.0 < 1e-10 && a.g.unwrap().value + 3.0 > -1e-10);
    }
}
