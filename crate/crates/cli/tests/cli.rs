use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvecx")).args(args).env("CURVECX_CACHE_DIR", cache).output().unwrap()
}

fn error_code(o: &Output) -> String {
    let v: Value = serde_json::from_slice(o.stderr.trim_ascii()).expect("error JSON on stderr");
    v["error"].as_str().unwrap().to_string()
}

#[test]
fn thrice_punctured_sphere_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["enumerate", "--surface", "0,3"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "REJECT_SIGNATURE");
}

#[test]
fn origin_outside_the_universe_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["census", "--surface", "0,5", "--origin", "9,9,9,9,9,9,9,9,9"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "ORIGIN_MISSING");
    let o = run(&["census", "--surface", "0,5", "--origin", "pants:1,9"], d.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn second_run_hits_the_verified_cache() {
    let d = tempfile::tempdir().unwrap();
    let args = ["enumerate", "--surface", "0,5"];
    let first = run(&args, d.path());
    assert!(first.status.success());
    assert!(String::from_utf8_lossy(&first.stderr).contains("cache written"));
    let second = run(&args, d.path());
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit, fingerprint verified"));
    let fp = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["fingerprint"].clone();
    assert_eq!(fp(&first), fp(&second));
}

#[test]
fn tampered_cache_is_an_io_error() {
    let d = tempfile::tempdir().unwrap();
    assert!(run(&["enumerate", "--surface", "0,5"], d.path()).status.success());
    let path = d.path().join("universe-g0-n5-w2.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    v["curves"].as_array_mut().unwrap().pop();
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["enumerate", "--surface", "0,5"], d.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_fills_in_and_flags_win() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("exp.conf");
    std::fs::write(&cfg, "# probe\nsurface = 0,5\nradius = 1\nseed = 4\n").unwrap();
    let out = d.path().join("report.json");
    let o = run(
        &["census", "--config", cfg.to_str().unwrap(), "--seed", "9", "--out", out.to_str().unwrap()],
        d.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["surface"], serde_json::json!([0, 5]));
    assert_eq!(v["seed"], 9);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["tool"], "curvecx");
}

#[test]
fn bad_config_values_exit_2() {
    let d = tempfile::tempdir().unwrap();
    for args in [
        &["census", "--edge-rule", "sideways"][..],
        &["classify", "--reading", "sideways"],
        &["census", "--samples", "0"],
        &["census", "--surface", "zero"],
    ] {
        let o = run(args, d.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn graph_dot_and_fill_of_a_triangle() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["graph", "--surface", "0,5", "--format", "dot"], d.path());
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("graph curves {"));
    let o = run(&["graph", "--surface", "0,6"], d.path());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let adj = v["result"]["adjacency"].as_array().unwrap();
    let curves = v["result"]["curves"].as_array().unwrap();
    let nb = |i: usize| adj[i].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect::<Vec<_>>();
    let (a, b) = (0, nb(0)[0]);
    let c = *nb(a).iter().find(|c| nb(b).contains(c)).unwrap();
    let label = |i: usize| curves[i].as_array().unwrap().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let lp = format!("{};{};{}", label(a), label(b), label(c));
    let o = run(&["fill", "--surface", "0,6", "--loop", &lp], d.path());
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["disk"]["faces"].as_array().unwrap().len(), 1);
    let o = run(&["fill", "--surface", "0,6", "--loop", &format!("{};{}", label(a), label(b))], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_code(&o), "INVALID_LOOP");
}

#[test]
fn classify_reports_both_readings() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["classify", "--surface", "0,6", "--check", "c0-cases"], d.path());
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["result"]["checks"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["violations"] == 0));
}

#[test]
fn push_transcripts_are_seeded() {
    let d = tempfile::tempdir().unwrap();
    let args = ["push", "--surface", "1,3", "--radius", "2", "--samples", "4", "--seed", "3"];
    let strip = |o: Output| {
        assert!(o.status.success());
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = strip(run(&args, d.path()));
    assert_eq!(a["result"]["transcripts"].as_array().unwrap().len(), 4);
    assert_eq!(a, strip(run(&args, d.path())));
}
