use std::path::Path;
use std::process::Command;

fn incbound(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_incbound")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "[domain]\ngrid = [8, 8, 8]\n[materials]\nsigma1 = 5.0\nsigma2 = 1.0\n[inclusion]\nshape = \"sphere\"\nradius = 0.25\n";

#[test]
fn unknown_suite_is_usage_error() {
    let out = incbound(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[materials]\nsigma1 = 1.0\nsigma2 = 3.0\n");
    assert_eq!(incbound(&["run", "--config", &cfg]).status.code(), Some(2));
    let cfg = write_config(dir.path(), SMALL);
    assert_eq!(incbound(&["run", "--config", &cfg, "--grid", "2x2"]).status.code(), Some(2));
}

#[test]
fn simulate_then_bound_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let resp = dir.path().join("response.json");
    let rep = dir.path().join("report.json");
    let direct = dir.path().join("direct.json");
    let s = incbound(&["simulate", "--config", &cfg, "--output", resp.to_str().unwrap()]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let b = incbound(&["bound", "--input", resp.to_str().unwrap(), "--output", rep.to_str().unwrap()]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let r = incbound(&["run", "--config", &cfg, "--output", direct.to_str().unwrap(), "--threads", "1"]);
    assert!(r.status.success());

    let load = |p: &Path| -> serde_json::Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
    let (a, d) = (load(&rep), load(&direct));
    assert_eq!(a["bounds"], d["bounds"]);
    assert_eq!(a["response"], d["response"]);
}

#[test]
fn inconsistent_response_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let resp = dir.path().join("response.json");
    assert!(incbound(&["simulate", "--config", &cfg, "--output", resp.to_str().unwrap()]).status.success());
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&resp).unwrap()).unwrap();
    v["truth_f1"] = serde_json::json!(0.9);
    std::fs::write(&resp, v.to_string()).unwrap();
    let out = incbound(&["bound", "--input", resp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let csv = dir.path().join("sweep.csv");
    let out = incbound(&["sweep", "--config", &cfg, "--axis", "contrast", "--values", "2,10", "--output", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert_eq!(incbound(&["sweep", "--config", &cfg, "--axis", "depth"]).status.code(), Some(2));
}

#[test]
fn verify_algebra_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<serde_json::Value> = (0..2)
        .map(|i| {
            let p = dir.path().join(format!("v{i}.json"));
            let out = incbound(&["verify", "--suite", "algebra", "--threads", "1", "--output", p.to_str().unwrap()]);
            assert!(out.status.success());
            let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
            incbound::pipeline::strip_timing(&mut v);
            v
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}
