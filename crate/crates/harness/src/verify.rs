//! Acceptance checks grouped into suites, with machine-readable results.

use std::f64::consts::PI;
use std::str::FromStr;
use std::time::Instant;

use incbound_core::bounds::{
    curl_field, g_exact, hashin_shtrikman_lower, lower_bound_general, lower_bound_special_neumann,
    pairwise_bound_affine, potential_form_field, quasiconvexity_check, upper_bound_special, upper_bound_trace,
};
use incbound_core::measure::measure_dirichlet;
use incbound_core::pde::{
    gauss_legendre, ConductivityField, DirichletData, FluxPotentials, Grid, NeumannData, Phase, Series, SeriesTerm,
    SolverOptions, Trig,
};
use incbound_core::tensor::{limit_tensor, t_prime_form, translation_t_tensor, Matrix3, PhaseAverage};
use incbound_core::Matrix3d;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::config::{DirichletConfig, InclusionConfig, ScenarioConfig};
use crate::error::{HarnessError, HarnessResult};
use crate::geometry::save_mask;
use crate::pipeline::{run_scenario, strip_timing, with_threads, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Algebra,
    Pde,
    Determinism,
    All,
}

impl FromStr for Suite {
    type Err = HarnessError;
    fn from_str(s: &str) -> HarnessResult<Self> {
        match s {
            "algebra" => Ok(Suite::Algebra),
            "pde" => Ok(Suite::Pde),
            "determinism" => Ok(Suite::Determinism),
            "all" => Ok(Suite::All),
            _ => Err(HarnessError::Usage(format!(
                "unknown suite '{s}' (expected algebra, pde, determinism or all)"
            ))),
        }
    }
}

/// One named acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub name: String,
    /// The oracle the observed value is compared against.
    pub provenance: String,
    pub tolerance: f64,
    pub observed: f64,
    pub passed: bool,
    pub detail: String,
    pub time_limit_s: Option<f64>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub threads: Option<usize>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl SuiteResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite result serializes")
    }

    /// JSON with timing fields removed.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("suite result serializes");
        strip_timing(&mut v);
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyOptions {
    pub threads: Option<usize>,
}

struct Outcome {
    observed: f64,
    passed: bool,
    detail: String,
}

struct CheckDef {
    id: &'static str,
    name: &'static str,
    provenance: &'static str,
    tolerance: f64,
    time_limit_s: Option<f64>,
}

fn run_check(def: CheckDef, f: impl FnOnce() -> HarnessResult<Outcome>) -> Check {
    let start = Instant::now();
    let (observed, passed, detail) = match f() {
        Ok(o) => (o.observed, o.passed, o.detail),
        Err(e) => (f64::NAN, false, format!("error: {e}")),
    };
    let wall = start.elapsed().as_secs_f64();
    let in_time = def.time_limit_s.is_none_or(|l| wall <= l);
    let detail = if in_time { detail } else { format!("{detail}; exceeded time limit {} s", def.time_limit_s.unwrap()) };
    Check {
        id: def.id.into(),
        name: def.name.into(),
        provenance: def.provenance.into(),
        tolerance: def.tolerance,
        observed,
        passed: passed && in_time,
        detail,
        time_limit_s: def.time_limit_s,
        wall_time_s: wall,
    }
}

fn core(stage: &'static str) -> impl FnOnce(incbound_core::Error) -> HarnessError {
    HarnessError::stage(stage)
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> HarnessResult<SuiteResult> {
    let checks = with_threads(opts.threads, || match suite {
        Suite::Algebra => algebra_checks(),
        Suite::Pde => pde_checks(),
        Suite::Determinism => vec![determinism_check(opts)],
        Suite::All => {
            let mut c = algebra_checks();
            c.extend(pde_checks());
            c.push(determinism_check(opts));
            c
        }
    })?;
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteResult { suite, threads: opts.threads, checks, passed })
}

pub fn algebra_checks() -> Vec<Check> {
    let mut out = vec![ac1_hashin_shtrikman(), ac2_degenerate(), ac3_ordering(), ac4_limit_tensor()];
    out.push(ac10_quasiconvexity());
    out
}

fn ac1_hashin_shtrikman() -> Check {
    let def = CheckDef {
        id: "AC1",
        name: "special upper bound is sharp at the Hashin-Shtrikman point",
        provenance: "closed-form Hashin-Shtrikman conductivity",
        tolerance: 1e-9,
        time_limit_s: Some(1.0),
    };
    run_check(def, || {
        let mut worst = 0.0f64;
        for s1 in [2.0, 5.0] {
            for f1 in [0.1f64, 0.3, 0.5, 0.9] {
                let sd = Matrix3::identity().scale(hashin_shtrikman_lower(f1, s1, 1.0));
                let b = upper_bound_special(&sd, s1, 1.0).map_err(core("upper_special"))?;
                worst = worst.max((b.value - f1).abs());
            }
        }
        Ok(Outcome { observed: worst, passed: worst <= 1e-9, detail: format!("max |bound - f1| = {worst:e} over 8 cases") })
    })
}

fn ac2_degenerate() -> Check {
    let def = CheckDef {
        id: "AC2",
        name: "full phase 1 gives bounds 1, homogeneous phase 2 gives bounds 0",
        provenance: "limit cases of the closed-form bounds",
        tolerance: 1e-9,
        time_limit_s: None,
    };
    run_check(def, || {
        let t = translation_t_tensor::<f64>();
        let mut worst = 0.0f64;
        let mut lines = Vec::new();
        for s1 in [2.0, 5.0] {
            for (sigma, expect) in [(s1, 1.0), (1.0, 0.0)] {
                let sd = Matrix3::identity().scale(sigma);
                let lb = lower_bound_special_neumann(&sd, s1, 1.0).map_err(core("lower_special_neumann"))?;
                let vals = [
                    upper_bound_trace([sigma; 3], &t, s1, 1.0).map_err(core("upper_trace"))?.value,
                    upper_bound_special(&sd, s1, 1.0).map_err(core("upper_special"))?.value,
                    pairwise_bound_affine([sigma; 3], &t, s1, 1.0).map_err(core("upper_pairwise"))?.value,
                    lower_bound_general(3.0 / sigma, -3.0, s1, 1.0).map_err(core("lower_general"))?.value,
                    lb.translation.value,
                    lb.resolvent.value,
                ];
                for v in vals {
                    worst = worst.max((v - expect).abs());
                }
                lines.push(format!("s1={s1} sigma={sigma}: {vals:?}"));
            }
        }
        Ok(Outcome { observed: worst, passed: worst <= 1e-9, detail: lines.join("; ") })
    })
}

fn ac3_ordering() -> Check {
    let def = CheckDef {
        id: "AC3",
        name: "special upper bound never exceeds the pairwise bound",
        provenance: "ordering property over random Dirichlet tensors",
        tolerance: 1e-12,
        time_limit_s: Some(5.0),
    };
    run_check(def, || {
        let mut rng = StdRng::seed_from_u64(61);
        let t = translation_t_tensor::<f64>();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..1000 {
            let s1 = [2.0, 5.0, 10.0][i % 3];
            let lambda: [f64; 3] = std::array::from_fn(|_| rng.gen_range(1.0..s1));
            let sd = Matrix3::from_diagonal(lambda);
            let us = upper_bound_special(&sd, s1, 1.0).map_err(core("upper_special"))?;
            let up = pairwise_bound_affine(lambda, &t, s1, 1.0).map_err(core("upper_pairwise"))?;
            worst = worst.max(us.value - up.value);
        }
        Ok(Outcome {
            observed: worst,
            passed: worst <= 1e-12,
            detail: format!("max(special - pairwise) = {worst:e} over 1000 tensors"),
        })
    })
}

fn ac4_limit_tensor() -> Check {
    let def = CheckDef {
        id: "AC4",
        name: "numeric limit tensor matches the closed-form leading block",
        provenance: "closed-form coefficient a; Richardson self-consistency",
        tolerance: 1e-6,
        time_limit_s: None,
    };
    run_check(def, || {
        let mut rng = StdRng::seed_from_u64(4);
        let (mut worst_a, mut worst_r, mut worst_b) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..20 {
            let f1: f64 = rng.gen_range(0.05..0.95);
            let s2: f64 = rng.gen_range(0.5..2.0);
            let s1 = s2 * rng.gen_range(1.5..20.0);
            let lim = limit_tensor(&PhaseAverage::new(f1, s1, s2).map_err(core("limit_tensor"))?)
                .map_err(core("limit_tensor"))?;
            worst_a = worst_a.max((lim.a_numeric - lim.a_closed).abs() / lim.a_closed.abs());
            worst_r = worst_r.max(lim.richardson_consistency);
            if let Some(b) = lim.b_closed {
                worst_b = worst_b.max((lim.b_numeric - b).abs() / b.abs());
            }
        }
        let observed = worst_a.max(worst_r);
        Ok(Outcome {
            observed,
            passed: observed <= 1e-6,
            detail: format!(
                "max rel |a_num - a_closed| = {worst_a:e}, max Richardson consistency = {worst_r:e}, \
                 max rel |b_num - sigma2/f1| = {worst_b:.3} (reported, not asserted)"
            ),
        })
    })
}

fn ac10_quasiconvexity() -> Check {
    let def = CheckDef {
        id: "AC10",
        name: "quasiconvexity gap on periodic divergence-free fields",
        provenance: "Fourier-symbol argument; equality class built from two potentials",
        tolerance: 1e-10,
        time_limit_s: Some(60.0),
    };
    run_check(def, || {
        let n = 32;
        let grid = Grid::from_extent([n; 3], [1.0; 3]).map_err(core("grid"))?;
        let cells = grid.n_cells();
        let mut rng = StdRng::seed_from_u64(10);
        let mut min_gap = f64::INFINITY;
        for _ in 0..100 {
            let psi: Vec<Matrix3d> = (0..cells).map(|_| Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0))).collect();
            let shift = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let f = curl_field(&grid, &psi).map_err(core("curl_field"))?;
            let shifted = incbound_core::pde::FieldMatrix::new(grid, f.values().iter().map(|m| *m + shift).collect())
                .map_err(core("curl_field"))?;
            let q = quasiconvexity_check(&shifted).map_err(core("quasiconvexity"))?;
            min_gap = min_gap.min(q.gap);
        }
        let mut max_eq = 0.0f64;
        for _ in 0..10 {
            let alpha: Vec<f64> = (0..cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let beta: Vec<f64> = (0..cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let j0 = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let f = potential_form_field(&grid, &j0, &alpha, &beta).map_err(core("potential_form"))?;
            let q = quasiconvexity_check(&f).map_err(core("quasiconvexity"))?;
            max_eq = max_eq.max(q.gap.abs());
        }
        Ok(Outcome {
            observed: min_gap,
            passed: min_gap >= -1e-10 && max_eq <= 1e-8,
            detail: format!("min gap over 100 curl fields = {min_gap:e}; max |gap| over 10 potential-form fields = {max_eq:e} (tol 1e-8)"),
        })
    })
}

fn trig_term(coeff: f64, trig: [Trig<f64>; 3]) -> SeriesTerm<f64> {
    SeriesTerm { coeff, powers: [0; 3], trig }
}

/// `V_i = x_i + 0.05·(trigonometric bump) + 0.1·x_j x_k`; not periodic on
/// the unit box, so `M ≠ 𝕋`.
pub fn perturbed_dirichlet() -> [Series<f64>; 3] {
    let k = PI;
    let (s, c) = (Trig::Sin { k }, Trig::Cos { k });
    let bumps = [[Trig::One, s, c], [c, Trig::One, s], [s, c, Trig::One]];
    std::array::from_fn(|i| {
        let mut series = Series::coordinate(i);
        series.terms.push(trig_term(0.05, bumps[i]));
        let mut p = [1; 3];
        p[i] = 0;
        series.terms.push(SeriesTerm::monomial(0.1, p));
        series
    })
}

fn m_structure_defect(m: &incbound_core::Tensor4d) -> [f64; 3] {
    let (mut zeros, mut anti, mut sym) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let v = m.get(i, j, k, l);
                    if i == k || j == l {
                        zeros = zeros.max(v.abs());
                    }
                    anti = anti.max((v + m.get(i, l, k, j)).abs());
                    sym = sym.max((v - m.get(k, l, i, j)).abs());
                }
            }
        }
    }
    [zeros, anti, sym]
}

fn sphere_field(n: usize, r: f64, s1: f64) -> HarnessResult<ConductivityField<f64>> {
    let grid = Grid::from_extent([n; 3], [1.0; 3]).map_err(core("grid"))?;
    ConductivityField::from_indicator(grid, s1, 1.0, |x| x.iter().map(|t| t * t).sum::<f64>() < r * r).map_err(core("geometry"))
}

pub fn pde_checks() -> Vec<Check> {
    let mut out = vec![ac5_m_structure(), ac6_affine_identity()];
    let mut ac7_report = None;
    out.push(ac7_sandwich(&mut ac7_report));
    out.push(ac8_feasibility(ac7_report.as_ref()));
    out.push(ac9_g_functional());
    out.push(ac11_attainability());
    out
}

fn ac5_m_structure() -> Check {
    let def = CheckDef {
        id: "AC5",
        name: "M tensor structure under non-affine Dirichlet data",
        provenance: "null-Lagrangian identities of M; boundary vs volume route",
        tolerance: 1e-8,
        time_limit_s: Some(300.0),
    };
    run_check(def, || {
        let field = sphere_field(48, 0.2, 5.0)?;
        let (d, _) = measure_dirichlet(&field, &DirichletData::Expr(perturbed_dirichlet()), &SolverOptions::default())
            .map_err(core("dirichlet"))?;
        let m = d.m.value;
        let [zeros, anti, sym] = m_structure_defect(&m);
        let dev = m.max_abs_diff(&translation_t_tensor());
        let route = d.m.route_residual;
        let observed = zeros.max(anti).max(sym);
        Ok(Outcome {
            observed,
            passed: observed <= 1e-8 && route <= 1e-5 && dev > 1e-6,
            detail: format!(
                "zeros {zeros:e}, antisymmetry {anti:e}, pair symmetry {sym:e}; route residual {route:e} (tol 1e-5); \
                 |M - T| = {dev:e} confirms non-affine data"
            ),
        })
    })
}

fn ac6_affine_identity() -> Check {
    let def = CheckDef {
        id: "AC6",
        name: "affine data give M = T and agreeing A routes",
        provenance: "affine-data identity for M",
        tolerance: 1e-8,
        time_limit_s: None,
    };
    run_check(def, || {
        let mut worst = 0.0f64;
        let mut lines = Vec::new();
        for (label, r) in [("homogeneous", 0.0), ("two-phase", 0.25)] {
            let field = sphere_field(32, r, 5.0)?;
            let (d, _) = measure_dirichlet(&field, &DirichletData::Affine(Matrix3::identity()), &SolverOptions::default())
                .map_err(core("dirichlet"))?;
            let dev = d.m.value.max_abs_diff(&translation_t_tensor());
            let route = d.a_routes.route_residual;
            worst = worst.max(dev).max(route);
            lines.push(format!("{label}: |M - T| = {dev:e}, A route residual = {route:e}"));
        }
        Ok(Outcome { observed: worst, passed: worst <= 1e-8, detail: lines.join("; ") })
    })
}

fn ac7_sandwich(slot: &mut Option<Report>) -> Check {
    let def = CheckDef {
        id: "AC7",
        name: "validity sandwich on the 64^3 sphere",
        provenance: "volume fraction of the voxelized sphere",
        tolerance: 1e-12,
        time_limit_s: Some(600.0),
    };
    run_check(def, || {
        let rep = run_scenario(&ScenarioConfig::sphere(64, 0.2, 5.0, 1.0))?;
        let f1 = rep.truth_f1;
        let b = &rep.bounds;
        let get = |v: Option<incbound_core::bounds::BoundValue<f64>>, n: &str| {
            v.map(|x| x.value).ok_or_else(|| HarnessError::Verification(format!("{n} not produced: {:?}", b.notes)))
        };
        let (lm, ls, ut) = (get(b.lower_milton, "lower_milton")?, get(b.lower_special_neumann, "lower_special_neumann")?, get(b.upper_trace, "upper_trace")?);
        let tol = 1e-12;
        let ok = lm >= 0.0 && ls >= 0.0 && lm <= ls + tol && ls <= f1 && f1 <= ut && ut <= 2.5 * f1;
        let detail = format!(
            "f1 = {f1}, lower_milton = {lm}, lower_special_neumann = {ls}, upper_trace = {ut}, upper_trace/f1 = {:.4}",
            ut / f1
        );
        *slot = Some(rep);
        Ok(Outcome { observed: ut / f1, passed: ok, detail })
    })
}

fn full_phase_report(n: usize) -> HarnessResult<Report> {
    let grid = Grid::from_extent([n; 3], [1.0; 3]).map_err(core("grid"))?;
    let field = ConductivityField::homogeneous(grid, Phase::Inclusion, 5.0, 1.0).map_err(core("geometry"))?;
    let path = std::env::temp_dir().join(format!("incbound_full_{n}_{}.tbm", std::process::id()));
    save_mask(&path, &field)?;
    let mut cfg = ScenarioConfig::sphere(n, 0.0, 5.0, 1.0);
    cfg.inclusion = InclusionConfig::MaskFile { path: path.clone() };
    let rep = run_scenario(&cfg);
    let _ = std::fs::remove_file(&path);
    rep
}

fn ac8_feasibility(ac7: Option<&Report>) -> Check {
    let def = CheckDef {
        id: "AC8",
        name: "feasibility f1* lies between f1 - allowance and upper_trace",
        provenance: "validity of the PSD feasibility condition",
        tolerance: 1e-6,
        time_limit_s: None,
    };
    run_check(def, || {
        let ac7 = ac7.ok_or_else(|| HarnessError::Verification("scenario of AC7 unavailable".into()))?;
        let homog = run_scenario(&ScenarioConfig::sphere(24, 0.0, 5.0, 1.0))?;
        let full = full_phase_report(24)?;
        let mut worst = f64::NEG_INFINITY;
        let mut lines = Vec::new();
        for (label, rep) in [("sphere", ac7), ("homogeneous", &homog), ("full phase 1", &full)] {
            let b = &rep.bounds;
            let fs = b.feasible_interval.as_ref().map(|f| f.f1_star);
            let ut = b.upper_trace.map(|u| u.value);
            let (Some(fs), Some(ut)) = (fs, ut) else {
                return Err(HarnessError::Verification(format!("{label}: bounds missing: {:?}", b.notes)));
            };
            let lo = rep.truth_f1 - b.allowance;
            worst = worst.max(lo - fs).max(fs - ut - 1e-6);
            lines.push(format!("{label}: f1 = {}, allowance = {:e}, f1* = {fs}, upper_trace = {ut}", rep.truth_f1, b.allowance));
        }
        Ok(Outcome { observed: worst, passed: worst <= 0.0, detail: lines.join("; ") })
    })
}

/// `(1/|Ω|)∫ Tr(J̲ᵀ𝕋′J̲)` by tensor Gauss quadrature on every cell.
pub fn g_volume_oracle(p: &FluxPotentials<f64>, grid: &Grid<f64>, order: usize) -> f64 {
    let gp = gauss_legendre::<f64>(order);
    let o = grid.origin();
    let h = grid.spacing;
    let mut total = 0.0;
    for c in 0..grid.n_cells() {
        let ijk = grid.cell_coords(c);
        let mut cell = 0.0;
        for &(a, wa) in &gp {
            for &(b, wb) in &gp {
                for &(s, ws) in &gp {
                    let t = [a, b, s];
                    let x = [0, 1, 2].map(|k| o[k] + (ijk[k] as f64 + t[k]) * h[k]);
                    cell += wa * wb * ws * t_prime_form(&p.field(x));
                }
            }
        }
        total += cell * grid.cell_volume();
    }
    total / grid.volume()
}

/// Trigonometric `α`, `β` with `J⁰ = I`.
pub fn trig_potentials() -> FluxPotentials<f64> {
    let k = 2.0 * PI;
    let (s, c) = (Trig::Sin { k }, Trig::Cos { k });
    FluxPotentials {
        alpha: Series { terms: vec![trig_term(0.05, [s, c, Trig::One]), SeriesTerm { coeff: 0.02, powers: [0, 0, 1], trig: [c, Trig::One, Trig::One] }] },
        beta: Series { terms: vec![trig_term(0.04, [c, s, s])] },
        j0: Matrix3::identity(),
    }
}

fn ac9_g_functional() -> Check {
    let def = CheckDef {
        id: "AC9",
        name: "g-functional by boundary quadrature",
        provenance: "q = -n closed form; divergence-theorem volume oracle",
        tolerance: 1e-10,
        time_limit_s: None,
    };
    run_check(def, || {
        let mut worst_special = 0.0f64;
        for n in [24, 64] {
            let grid = Grid::from_extent([n; 3], [1.0; 3]).map_err(core("grid"))?;
            let g = g_exact::<f64>(&NeumannData::Special, &grid).map_err(core("g"))?;
            worst_special = worst_special.max((g.value + 3.0).abs());
        }
        let grid = Grid::from_extent([24; 3], [1.0; 3]).map_err(core("grid"))?;
        let p = trig_potentials();
        let g = g_exact(&NeumannData::Potentials(p.clone()), &grid).map_err(core("g"))?;
        let oracle = g_volume_oracle(&p, &grid, 4);
        let diff = (g.value - oracle).abs();
        Ok(Outcome {
            observed: worst_special,
            passed: worst_special <= 1e-10 && diff <= 1e-6,
            detail: format!(
                "max |g + 3| on 24^3 and 64^3 = {worst_special:e}; potentials: boundary {} vs volume oracle {oracle}, |diff| = {diff:e} (tol 1e-6)",
                g.value
            ),
        })
    })
}

fn ac11_attainability() -> Check {
    let def = CheckDef {
        id: "AC11",
        name: "phase-1 field uniformity for a small centred sphere",
        provenance: "uniform field inside an isolated sphere",
        tolerance: 0.05,
        time_limit_s: None,
    };
    run_check(def, || {
        let mut res = Vec::new();
        for (n, r) in [(64, 0.15), (96, 0.1)] {
            let mut cfg = ScenarioConfig::sphere(n, r, 5.0, 1.0);
            cfg.boundary.neumann = None;
            cfg.boundary.dirichlet = Some(DirichletConfig::AffineDirichlet { matrix: Matrix3::identity() });
            let sim = crate::pipeline::simulate(&cfg)?;
            let a = sim.attainability.ok_or_else(|| HarnessError::Verification("no attainability residuals".into()))?;
            res.push((n, r, a));
        }
        let r1 = |i: usize| res[i].2.r1.unwrap_or(f64::NAN);
        let detail = res
            .iter()
            .map(|(n, r, a)| format!("{n}^3 r={r}: r1 = {:?}, r1_interior = {:?}, r2 = {}", a.r1, a.r1_interior, a.r2))
            .collect::<Vec<_>>()
            .join("; ");
        Ok(Outcome { observed: r1(0), passed: r1(0) <= 0.05 && r1(1) < r1(0), detail })
    })
}

fn determinism_check(opts: &VerifyOptions) -> Check {
    let def = CheckDef {
        id: "AC12",
        name: "repeated runs give identical JSON",
        provenance: "bitwise comparison with timing fields removed",
        tolerance: 0.0,
        time_limit_s: None,
    };
    run_check(def, || {
        let algebra = || SuiteResult {
            suite: Suite::Algebra,
            threads: opts.threads,
            passed: true,
            checks: algebra_checks(),
        }
        .to_json_without_timing();
        let same_algebra = algebra() == algebra();
        let scenario = || -> HarnessResult<String> {
            let rep = run_scenario(&ScenarioConfig::sphere(12, 0.25, 5.0, 1.0))?;
            let mut v = serde_json::to_value(&rep)?;
            strip_timing(&mut v);
            Ok(v.to_string())
        };
        let same_scenario = scenario()? == scenario()?;
        let differing = [same_algebra, same_scenario].iter().filter(|&&s| !s).count();
        Ok(Outcome {
            observed: differing as f64,
            passed: differing == 0,
            detail: format!("algebra suite identical: {same_algebra}; 12^3 scenario report identical: {same_scenario}"),
        })
    })
}
