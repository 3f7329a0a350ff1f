use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nodal_census::nodal::decompose;
use nodal_census::sampler::read_ncfs;
use serde_json::Value;

const COMMANDS: [&str; 8] = ["sample", "nodal", "psi", "ns", "sandwich", "faber-krahn", "sphere-compare", "report"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodal-census")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json summary")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn every_command_has_help() {
    for cmd in COMMANDS {
        let out = run(&[cmd, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{cmd}");
        let text = String::from_utf8_lossy(&out.stdout);
        for flag in ["--seed", "--out", "--json"] {
            assert!(text.contains(flag), "{cmd} help lacks {flag}");
        }
    }
}

#[test]
fn missing_window_is_a_usage_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = run(&["psi", "--model", "rpw", "--h", "2pi/10", "--M", "2", "--out", path(&out)]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bad_flags_and_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert_eq!(run(&["psi", "--window", "40pq"]).status.code(), Some(2));
    assert_eq!(run(&["sandwich", "--r", "15", "--R", "5", "--out", path(&out)]).status.code(), Some(2));
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\"model\": 3}").unwrap();
    assert_eq!(run(&["ns", "--config", path(&cfg), "--out", path(&out)]).status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn csv_only_skips_the_plot() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["psi", "--model", "rpw", "--window", "8pi", "--M", "2", "--json", "--format", "csv-only", "--out"];
    let summary = run_ok(&[&args[..], &[path(dir.path())]].concat());
    assert_eq!(summary["realizations"], 2);
    let table = fs::read_to_string(dir.path().join("psi.csv")).unwrap();
    assert!(table.starts_with("t,psi_hat,stderr\n"));
    assert!(table.lines().any(|l| l.starts_with("17,")));
    assert!(!dir.path().join("psi.svg").exists());
}

#[test]
fn nodal_on_a_saved_sample_matches_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    run_ok(&[
        "sample",
        "--model",
        "rpw",
        "--window",
        "8pi",
        "--seed",
        "3",
        "--index",
        "2",
        "--json",
        "--out",
        path(&a),
    ]);
    let ncfs = a.join("sample.ncfs");
    assert!(a.join("sample.json").exists());
    let summary = run_ok(&["nodal", "--in", path(&ncfs), "--json", "--out", path(&b)]);
    let expected = decompose(&read_ncfs(&ncfs).unwrap()).domain_csv();
    assert_eq!(fs::read_to_string(b.join("domains.csv")).unwrap(), expected);
    assert_eq!(summary["domains"], expected.lines().count() - 1);
}

#[test]
fn sandwich_example_holds() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_ok(&[
        "sandwich",
        "--r",
        "5",
        "--R",
        "15",
        "--t",
        "inf",
        "--seed",
        "1",
        "--json",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(summary["checked"], 1);
    assert_eq!(summary["held"], 1);
    let table = fs::read_to_string(dir.path().join("sandwich.csv")).unwrap();
    let row = table.lines().nth(1).unwrap();
    assert!(row.starts_with("5,15,inf,") && row.ends_with(",true"), "{row}");
}

#[test]
fn faber_krahn_example_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_ok(&["faber-krahn", "--M", "100", "--margin", "0.1", "--json", "--out", path(dir.path())]);
    assert_eq!(summary["violations"], 0);
    let fk: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("faber_krahn.json")).unwrap()).unwrap();
    assert!(fk["min_area"].as_f64().unwrap() >= fk["threshold"].as_f64().unwrap());
}

fn report_args(out: &Path) -> Vec<String> {
    [
        "report",
        "--model",
        "rpw",
        "--window",
        "10pi",
        "--M",
        "3",
        "--radii",
        "5,10",
        "--sandwich",
        "2:6",
        "--json",
        "--out",
    ]
    .iter()
    .map(|s| s.to_string())
    .chain([path(out).to_string()])
    .collect()
}

fn payload(dir: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let args = report_args(d);
        run_ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    }
    for file in ["psi.csv", "psi.svg", "ns.csv", "joint.csv", "manifest.json", "realizations/00001.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    assert_eq!(payload(&a), payload(&b));

    // resuming a finished run re-aggregates to the same tables
    let mut args = report_args(&a);
    args.push("--resume".into());
    run_ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(fs::read(a.join("psi.csv")).unwrap(), fs::read(b.join("psi.csv")).unwrap());
    assert_eq!(payload(&a), payload(&b));
}

#[test]
fn resume_with_other_flags_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "ns",
        "--model",
        "rpw",
        "--window",
        "8pi",
        "--M",
        "2",
        "--radii",
        "5",
        "--json",
        "--out",
        path(dir.path()),
    ]);
    let res = run(&[
        "ns",
        "--model",
        "rpw",
        "--window",
        "8pi",
        "--M",
        "3",
        "--radii",
        "5",
        "--resume",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn degree_one_sphere_compare_is_a_unit_step() {
    let dir = tempfile::tempdir().unwrap();
    let planar = dir.path().join("planar");
    run_ok(&["psi", "--model", "rpw", "--window", "8pi", "--M", "2", "--json", "--out", path(&planar)]);
    let report = planar.join("report.json");
    let out = dir.path().join("cmp");
    let res = run(&["sphere-compare", "-l", "1", "--M", "2", "--planar", path(&report), "--json", "--out", path(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let summary: Value = serde_json::from_slice(&res.stdout).unwrap();
    // two hemispheres per realization, each of scaled area 2pi * l(l + 1) = 4pi
    assert_eq!(summary["sphere_domains"], 4);
    assert_eq!(summary["planar_hash_matches"], true);
    let ks = summary["ks_distance"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&ks));
    let sphere = fs::read_to_string(out.join("sphere_psi.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        sphere.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.iter().all(|r| (r[0] - 4.0 * std::f64::consts::PI).abs() < 1e-9), "{sphere}");
    assert_eq!(rows.last().unwrap()[1], 1.0);
    assert!(out.join("sphere_compare.svg").exists());

    // a tampered hash only warns
    let text = fs::read_to_string(&report).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let hash = v["config_hash"].as_str().unwrap().to_string();
    fs::write(&report, text.replace(&hash, "0000000000000000")).unwrap();
    let res = run(&["sphere-compare", "-l", "1", "--M", "2", "--planar", path(&report), "--json", "--out", path(&out)]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("warning"));
    let summary: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(summary["planar_hash_matches"], false);
}

#[test]
fn desk_psi_vanishes_below_the_floor() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["psi", "--model", "rpw", "--window", "40pi", "--h", "2pi/10", "--M", "100", "--seed", "7", "--json"];
    run_ok(&[&args[..], &["--out", path(dir.path())]].concat());
    let table = fs::read_to_string(dir.path().join("psi.csv")).unwrap();
    assert!(table.lines().any(|l| l == "17,0,0"), "{}", &table[..200]);
    assert!(dir.path().join("psi.svg").exists());
}
