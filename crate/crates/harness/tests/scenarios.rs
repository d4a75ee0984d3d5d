use incbound::config::{DirichletConfig, InclusionConfig, SphereSpec};
use incbound::geometry::{build_geometry, load_mask, save_mask};
use incbound::sweep::{sweep, SweepAxis};
use incbound::{run_scenario, HarnessError, ScenarioConfig};
use incbound_core::pde::{ConductivityField, Grid, Phase};

#[test]
fn sphere_voxel_fraction_at_64() {
    let g = build_geometry(&ScenarioConfig::sphere(64, 0.2, 5.0, 1.0)).unwrap();
    let analytic = 4.0 * std::f64::consts::PI * 0.2f64.powi(3) / 3.0;
    assert!((g.f1 - 0.0335).abs() <= 0.0005, "{}", g.f1);
    assert!((g.nominal_f1.unwrap() - analytic).abs() < 1e-15);
}

#[test]
fn radius_zero_is_empty() {
    let g = build_geometry(&ScenarioConfig::sphere(16, 0.0, 5.0, 1.0)).unwrap();
    assert_eq!(g.f1, 0.0);
}

#[test]
fn mask_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("body.tbm");
    let mut cfg = ScenarioConfig::sphere(10, 0.3, 4.0, 1.0);
    cfg.inclusion = InclusionConfig::MultiSphere {
        spheres: vec![SphereSpec { center: [0.2, 0.0, 0.0], radius: 0.15 }, SphereSpec { center: [-0.2, 0.1, 0.0], radius: 0.1 }],
    };
    let g = build_geometry(&cfg).unwrap();
    save_mask(&path, &g.field).unwrap();
    let (dims, labels) = load_mask(&path).unwrap();
    let back = ConductivityField::from_labels(*g.field.grid(), &labels, 4.0, 1.0).unwrap();
    assert_eq!(dims, [10; 3]);
    assert_eq!(back, g.field);

    cfg.inclusion = InclusionConfig::MaskFile { path: path.clone() };
    assert_eq!(build_geometry(&cfg).unwrap().field, g.field);
    let wrong = cfg.clone().with_grid([12; 3]).unwrap();
    assert!(matches!(build_geometry(&wrong), Err(HarnessError::Config(_))));
}

#[test]
fn config_file_resolves_relative_mask_path() {
    let dir = tempfile::tempdir().unwrap();
    let grid = Grid::from_extent([6; 3], [1.0; 3]).unwrap();
    let field = ConductivityField::homogeneous(grid, Phase::Matrix, 2.0, 1.0).unwrap();
    save_mask(&dir.path().join("m.tbm"), &field).unwrap();
    let cfg_path = dir.path().join("s.toml");
    let text = "[domain]\ngrid = [6, 6, 6]\n[materials]\nsigma1 = 2.0\nsigma2 = 1.0\n[inclusion]\nshape = \"mask_file\"\npath = \"m.tbm\"\n";
    std::fs::write(&cfg_path, text).unwrap();
    let cfg = ScenarioConfig::load(&cfg_path).unwrap();
    assert_eq!(build_geometry(&cfg).unwrap().f1, 0.0);
}

#[test]
fn homogeneous_body_bounds_vanish() {
    let rep = run_scenario(&ScenarioConfig::sphere(16, 0.0, 5.0, 1.0)).unwrap();
    assert_eq!(rep.truth_f1, 0.0);
    let b = &rep.bounds;
    assert!(b.upper_trace.unwrap().value <= 1e-3);
    for (name, v) in [("general", b.lower_general), ("special", b.lower_special_neumann), ("milton", b.lower_milton)] {
        assert!(v.unwrap().value <= 1e-3, "{name}");
    }
    assert!(b.violations.is_empty(), "{:?}", b.violations);
}

#[test]
fn full_phase_one_bounds_are_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("full.tbm");
    let grid = Grid::from_extent([12; 3], [1.0; 3]).unwrap();
    save_mask(&path, &ConductivityField::homogeneous(grid, Phase::Inclusion, 5.0, 1.0).unwrap()).unwrap();
    let mut cfg = ScenarioConfig::sphere(12, 0.0, 5.0, 1.0);
    cfg.inclusion = InclusionConfig::MaskFile { path };
    let rep = run_scenario(&cfg).unwrap();
    assert_eq!(rep.truth_f1, 1.0);
    let b = &rep.bounds;
    for v in [b.upper_trace, b.upper_special, b.upper_pairwise, b.lower_general, b.lower_special_neumann, b.lower_milton] {
        assert!((v.unwrap().value - 1.0).abs() <= 1e-6, "{v:?}");
    }
}

#[test]
fn report_has_schema_keys_and_echoes_config() {
    let cfg = ScenarioConfig::sphere(8, 0.25, 5.0, 1.0);
    let rep = run_scenario(&cfg).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    for key in ["config", "truth_f1", "response", "bounds", "g", "attainability", "limit_tensor", "solver"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    for key in ["A", "Aprime", "lambda", "R", "K", "M", "route_residuals"] {
        assert!(v["response"].get(key).is_some(), "missing response.{key}");
    }
    assert_eq!(v["response"]["M"].as_array().unwrap().len(), 81);
    assert_eq!(v["g"]["source"], "special_neumann");
    let echoed: ScenarioConfig = serde_json::from_value(v["config"].clone()).unwrap();
    assert_eq!(echoed, cfg);
}

#[test]
fn radius_sweep_upper_bound_is_monotone() {
    let mut base = ScenarioConfig::sphere(20, 0.1, 5.0, 1.0);
    base.boundary.neumann = None;
    let rows = sweep(&base, SweepAxis::Radius, &SweepAxis::Radius.default_values());
    let mut last = (0.0, 0.0);
    for r in &rows {
        assert!(r.error.is_none(), "{:?}", r.error);
        let (f, u) = (r.realized_f1.unwrap(), r.upper_trace.unwrap());
        assert!(f > last.0 && u >= last.1, "{rows:?}");
        assert!(u >= f);
        last = (f, u);
    }
}

#[test]
fn contrast_sweep_keeps_valid_sandwich() {
    let base = ScenarioConfig::sphere(20, 0.2, 5.0, 1.0);
    for r in sweep(&base, SweepAxis::Contrast, &SweepAxis::Contrast.default_values()) {
        assert!(r.error.is_none(), "{:?}", r.error);
        assert_eq!(r.violations, Some(0), "{r:?}");
        let f = r.realized_f1.unwrap();
        assert!(r.lower_general.unwrap() <= f && f <= r.upper_trace.unwrap(), "{r:?}");
    }
}

#[test]
fn grid_sweep_upper_bound_converges() {
    let mut base = ScenarioConfig::sphere(24, 0.2, 5.0, 1.0);
    base.boundary.neumann = None;
    base.boundary.dirichlet = Some(DirichletConfig::AffineDirichlet { matrix: incbound_core::tensor::Matrix3::identity() });
    let rows = sweep(&base, SweepAxis::Grid, &SweepAxis::Grid.default_values());
    let u: Vec<f64> = rows.iter().map(|r| r.upper_trace.unwrap()).collect();
    // pairs (24, 48) and (32, 64)
    let d1 = (u[0] - u[2]).abs();
    let d2 = (u[1] - u[3]).abs();
    assert!(d2 < d1, "{u:?}");
}
