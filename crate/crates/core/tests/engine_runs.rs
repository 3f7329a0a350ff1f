use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

use nodal_census::engine::{
    draw, realization_stem, resume_ensemble, resume_ensemble_with_hook, run_ensemble, run_ensemble_with_hook, Check,
    EnsembleConfig, SandwichPair,
};
use nodal_census::sampler::{read_ncfs, GridSpec, SpectralModel};
use nodal_census::Error;

fn config(m: usize, dir: Option<&Path>) -> EnsembleConfig {
    let grid = GridSpec::planar(8.0 * PI, 2.0 * PI / 10.0).unwrap();
    let mut c = EnsembleConfig::new(SpectralModel::PlaneWave2D, grid, m, 21);
    c.radii = vec![5.0, 10.0];
    c.thresholds = vec![20.0, 50.0];
    c.checks = Check::ALL.into_iter().collect();
    c.sandwich = vec![SandwichPair { r: 2.0, big_r: 6.0 }];
    c.output_dir = dir.map(Path::to_path_buf);
    c
}

#[test]
fn identical_configs_give_identical_payloads() {
    let a = run_ensemble(&config(4, None)).unwrap();
    let b = run_ensemble(&config(4, None)).unwrap();
    assert_eq!(a.payload_json(), b.payload_json());
    assert!(a.payload_json().contains("\"config_hash\""));
    assert!(!a.payload_json().contains("wall_time_s"));
}

#[test]
fn report_is_written_and_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_ensemble(&config(3, Some(dir.path()))).unwrap();
    let text = fs::read_to_string(dir.path().join("report.json")).unwrap();
    let back: nodal_census::engine::EnsembleReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.realizations, 3);
    for check in [&back.checks.faber_krahn.is_some(), &back.checks.sandwich.is_some(), &back.checks.helmholtz.is_some()]
    {
        assert!(*check);
    }
    assert!(back.checks.covariance.is_some() && back.checks.perturbation.is_some());
}

#[test]
fn realization_tables_do_not_depend_on_ensemble_size() {
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    run_ensemble(&config(1, Some(one.path()))).unwrap();
    run_ensemble(&config(2, Some(two.path()))).unwrap();
    let table = |d: &Path| fs::read(realization_stem(d, 0).with_extension("csv")).unwrap();
    assert_eq!(table(one.path()), table(two.path()));
    assert!(realization_stem(two.path(), 1).with_extension("csv").exists());
}

#[test]
fn completion_order_does_not_change_the_report() {
    let c = config(6, None);
    let sequential = run_ensemble(&c).unwrap();
    // later indices finish first
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let shuffled = pool
        .install(|| run_ensemble_with_hook(&c, &|i| std::thread::sleep(Duration::from_millis(40 * (6 - i)))))
        .unwrap();
    assert_eq!(sequential.payload_json(), shuffled.payload_json());
}

#[test]
fn resume_from_nothing_equals_fresh_run() {
    let fresh = run_ensemble(&config(4, None)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = config(4, Some(dir.path()));
    // every realization fails, leaving only the manifest behind
    assert!(matches!(run_ensemble_with_hook(&c, &|_| panic!("stop")), Err(Error::TooManyFailures { .. })));
    assert!(dir.path().join("manifest.json").exists());
    let resumed = resume_ensemble(&c, dir.path()).unwrap();
    assert_eq!(resumed.payload_json(), fresh.payload_json());
}

#[test]
fn resume_after_completion_only_reaggregates() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(4, Some(dir.path()));
    let fresh = run_ensemble(&c).unwrap();
    let resumed = resume_ensemble_with_hook(&c, dir.path(), &|i| panic!("realization {i} was resampled")).unwrap();
    assert!(resumed.failures.is_empty());
    assert_eq!(resumed.payload_json(), fresh.payload_json());
}

#[test]
fn resume_recomputes_tampered_and_missing_tables() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(5, Some(dir.path()));
    let fresh = run_ensemble(&c).unwrap();
    let csv = realization_stem(dir.path(), 2).with_extension("csv");
    let text = fs::read_to_string(&csv).unwrap();
    fs::write(&csv, text.replacen(",+,", ",-,", 1)).unwrap();
    fs::remove_file(realization_stem(dir.path(), 4).with_extension("json")).unwrap();

    let touched = Mutex::new(Vec::new());
    let resumed = resume_ensemble_with_hook(&c, dir.path(), &|i| touched.lock().unwrap().push(i)).unwrap();
    let mut touched = touched.into_inner().unwrap();
    touched.sort();
    assert_eq!(touched, vec![2, 4]);
    assert_eq!(resumed.payload_json(), fresh.payload_json());
    assert_eq!(fs::read_to_string(&csv).unwrap(), text);
}

#[test]
fn resume_refuses_a_different_config() {
    let dir = tempfile::tempdir().unwrap();
    run_ensemble(&config(2, Some(dir.path()))).unwrap();
    let mut other = config(2, Some(dir.path()));
    other.master_seed += 1;
    assert!(matches!(resume_ensemble(&other, dir.path()), Err(Error::ConfigHashMismatch { .. })));
}

#[test]
fn failed_realization_is_logged_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let c = config(10, Some(dir.path()));
    let report = run_ensemble_with_hook(&c, &|i| assert_ne!(i, 7, "injected fault")).unwrap();
    assert_eq!(report.realizations, 9);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].index, 7);
    assert!(!realization_stem(dir.path(), 7).with_extension("csv").exists());
    // resuming fills the gap and matches a clean run
    let clean = run_ensemble(&config(10, None)).unwrap();
    assert_eq!(resume_ensemble(&c, dir.path()).unwrap().payload_json(), clean.payload_json());
}

#[test]
fn kept_fields_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(2, Some(dir.path()));
    c.keep_fields = true;
    run_ensemble(&c).unwrap();
    let back = read_ncfs(&realization_stem(dir.path(), 1).with_extension("ncfs")).unwrap();
    assert_eq!(back, draw(&c, 1).unwrap());
}

#[test]
fn torus_and_sphere_ensembles_run() {
    let torus = GridSpec::torus(40.0 * PI, 2.0 * PI / 10.0, 2).unwrap();
    let mut c = EnsembleConfig::new(SpectralModel::BandLimitedTorus { dim: 2, alpha: 0.5 }, torus, 3, 1);
    c.radii = vec![10.0];
    c.checks = [Check::Helmholtz, Check::Covariance].into_iter().collect();
    let r = run_ensemble(&c).unwrap();
    assert!(r.ns.unwrap().c_hat > 0.0);
    let mut small = c.clone();
    small.grid = GridSpec::torus(16.0 * PI, 2.0 * PI / 10.0, 2).unwrap();
    assert!(matches!(run_ensemble(&small), Err(Error::Config(_))));

    let sphere = GridSpec::sphere(40, 80).unwrap();
    let mut c = EnsembleConfig::new(SpectralModel::SphericalHarmonic { degree: 8 }, sphere, 3, 1);
    c.checks.insert(Check::Helmholtz);
    let r = run_ensemble(&c).unwrap();
    let psi = r.psi.unwrap();
    assert_eq!(psi.eval(psi.max_breakpoint()), 1.0);
    // every domain on the sphere is interior; unscaled areas sum to 4 pi per realization
    let total: f64 = r.joint.iter().map(|p| p.0).sum();
    assert!((total - 3.0 * 4.0 * PI).abs() < 1e-6);
    let mut bad = c.clone();
    bad.checks.insert(Check::Sandwich);
    assert!(matches!(run_ensemble(&bad), Err(Error::Config(_))));
}
