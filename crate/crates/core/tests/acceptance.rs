//! Acceptance run: prints one PASS/FAIL line per criterion, plus `note` lines
//! with numbers for the estimator each criterion does not use. Exits non-zero
//! if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use nodal_census::engine::{run_ensemble, Check, EnsembleConfig, EnsembleReport, SandwichPair};
use nodal_census::nodal::{label_domains, AreaEstimator};
use nodal_census::sampler::{empirical_covariance, sample, FieldSample, GridSpec, RngStream, SpectralModel};
use nodal_census::specfn::{faber_krahn_floor, J0_FIRST_ZERO};
use nodal_census::stats::ks_distance;

const SEED: u64 = 7;

struct Tally {
    failed: Vec<&'static str>,
}

impl Tally {
    fn record(&mut self, id: &'static str, title: &str, pass: bool, detail: String) {
        println!("{id} {} {title}: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(id);
        }
    }
}

fn note(text: String) {
    println!("    note: {text}");
}

fn desk_grid(spacing: f64) -> GridSpec {
    GridSpec::planar(40.0 * PI, spacing).unwrap()
}

fn desk_config() -> EnsembleConfig {
    let mut c = EnsembleConfig::new(SpectralModel::PlaneWave2D, desk_grid(2.0 * PI / 10.0), 100, SEED);
    c.radii = vec![10.0, 15.0, 20.0];
    c.thresholds = vec![17.0, 19.0, 20.0, 50.0];
    c.checks = Check::ALL.into_iter().collect();
    c.sandwich = vec![SandwichPair { r: 5.0, big_r: 15.0 }, SandwichPair { r: 8.0, big_r: 20.0 }];
    c.area_estimator = AreaEstimator::Subcell;
    c.fk_estimator = AreaEstimator::CellCount;
    c
}

/// Smallest interior area over realizations 0..10 at the given spacing.
fn fk_min_area(spacing: f64, estimator: AreaEstimator) -> f64 {
    let mut c = EnsembleConfig::new(SpectralModel::PlaneWave2D, desk_grid(spacing), 10, SEED);
    c.checks.insert(Check::FaberKrahn);
    c.fk_estimator = estimator;
    run_ensemble(&c).unwrap().checks.faber_krahn.unwrap().min_area
}

fn psi_only(estimator: AreaEstimator) -> EnsembleReport {
    let mut c = desk_config();
    c.checks.clear();
    c.area_estimator = estimator;
    run_ensemble(&c).unwrap()
}

fn sphere_run(estimator: AreaEstimator) -> EnsembleReport {
    let mut c = EnsembleConfig::new(
        SpectralModel::SphericalHarmonic { degree: 80 },
        GridSpec::sphere(400, 800).unwrap(),
        50,
        SEED,
    );
    c.area_estimator = estimator;
    run_ensemble(&c).unwrap()
}

fn ac1(t: &mut Tally, desk: &EnsembleReport, wall: f64) {
    let t0 = faber_krahn_floor(2).unwrap();
    let fk = desk.checks.faber_krahn.as_ref().unwrap();
    let coarse = fk_min_area(2.0 * PI / 10.0, AreaEstimator::CellCount);
    let fine = fk_min_area(2.0 * PI / 20.0, AreaEstimator::CellCount);
    let pass =
        fk.violations.is_empty() && desk.realizations == 100 && (fine - t0).abs() < (coarse - t0).abs() && wall < 600.0;
    t.record(
        "AC1",
        "Faber-Krahn floor",
        pass,
        format!(
            "{} violations below {:.3} among {} interior domains, min cell-count area {:.3}; \
             refinement min {coarse:.3} -> {fine:.3} (t0 = {t0:.3}); desk run {wall:.1} s",
            fk.violations.len(),
            fk.threshold,
            fk.interior_domains,
            fk.min_area
        ),
    );
    let (sc, sf) =
        (fk_min_area(2.0 * PI / 10.0, AreaEstimator::Subcell), fk_min_area(2.0 * PI / 20.0, AreaEstimator::Subcell));
    note(format!("subcell areas: refinement min {sc:.3} -> {sf:.3}"));
}

fn ac2(t: &mut Tally, desk: &EnsembleReport) {
    let s = desk.checks.sandwich.as_ref().unwrap();
    let listed = |v: f64| v == 20.0 || v == 50.0 || v.is_infinite();
    let failed = s.failures.iter().filter(|(_, v)| listed(v.t)).count();
    let checked = desk.realizations * desk.config.sandwich.len() * 3;
    let pass = checked == 600 && failed == 0;
    t.record(
        "AC2",
        "sandwich determinism",
        pass,
        format!("{}/{checked} hold at t in {{20, 50, inf}}", checked - failed),
    );
    note(format!("all thresholds: {}/{} hold", s.held, s.checked));
}

fn ac3(t: &mut Tally) {
    const M: u64 = 2000;
    let draw = |grid: &GridSpec, seed: u64| -> Vec<FieldSample> {
        (0..M).map(|i| sample(&SpectralModel::PlaneWave2D, grid, &RngStream::new(seed, i)).unwrap()).collect()
    };
    // lags 1 and 5 sit on the h = 1/2 lattice, the first zero of J_0 on h = j01/4
    let half = draw(&GridSpec::planar(10.0, 0.5).unwrap(), SEED);
    let h = J0_FIRST_ZERO / 4.0;
    let zero = draw(&GridSpec::planar(32.0 * h, h).unwrap(), SEED + 1);
    let mut rows = empirical_covariance(&half, &[1.0, 5.0]).unwrap();
    rows.insert(1, empirical_covariance(&zero, &[J0_FIRST_ZERO]).unwrap().remove(0));
    let mut pass = true;
    let mut parts = Vec::new();
    for row in &rows {
        let target = common::bessel_series(0, row.lag);
        let ok = (row.estimate - target).abs() <= 3.0 * row.stderr;
        pass &= ok;
        parts.push(format!("lag {:.4}: {:.4} +- {:.4} vs {target:.4}", row.lag, row.estimate, row.stderr));
    }
    t.record("AC3", "covariance fidelity", pass, parts.join("; "));
}

fn ac4(t: &mut Tally) {
    let mut c = EnsembleConfig::new(SpectralModel::PlaneWave2D, desk_grid(2.0 * PI / 10.0), 10, SEED);
    c.checks.insert(Check::Helmholtz);
    let h = run_ensemble(&c).unwrap().checks.helmholtz.unwrap();
    t.record(
        "AC4",
        "Helmholtz order",
        (3.5..=4.5).contains(&h.ratio),
        format!(
            "ratio {:.3} (residual {:.3e} -> {:.3e}) over 10 realizations",
            h.ratio, h.residual.mean, h.refined_residual.mean
        ),
    );
}

fn ac5(t: &mut Tally, desk: &EnsembleReport) {
    let ns = desk.ns.as_ref().unwrap();
    let mut pass = true;
    for (i, a) in ns.rows.iter().enumerate() {
        for b in &ns.rows[i + 1..] {
            let bound = 3.0 * (a.stderr.hypot(b.stderr) + 1.0 / a.radius.max(b.radius));
            pass &= (a.mean - b.mean).abs() <= bound;
        }
    }
    let weights: Vec<f64> = ns.rows.iter().map(|r| 1.0 / (r.stderr * r.stderr)).collect();
    let pooled = ns.rows.iter().zip(&weights).map(|(r, w)| r.mean * w).sum::<f64>() / weights.iter().sum::<f64>();
    pass &= pooled > 0.0;
    let rows: Vec<String> =
        ns.rows.iter().map(|r| format!("R={}: {:.5} +- {:.5}", r.radius, r.mean, r.stderr)).collect();
    t.record("AC5", "domain density stability", pass, format!("{}; pooled {pooled:.5}", rows.join(", ")));
}

fn ac6(t: &mut Tally, desk: &EnsembleReport, cell: &EnsembleReport) {
    let psi = desk.psi.as_ref().unwrap();
    let pass = psi.is_monotone()
        && psi.eval(17.0) == 0.0
        && psi.eval(psi.max_breakpoint()) == 1.0
        && psi.eval(50.0) - psi.eval(19.0) > 0.0;
    t.record(
        "AC6",
        "volume distribution shape",
        pass,
        format!(
            "subcell areas: psi(17) = {}, psi(19) = {:.4}, psi(50) = {:.4}, psi(max) = {}, {} domains",
            psi.eval(17.0),
            psi.eval(19.0),
            psi.eval(50.0),
            psi.eval(psi.max_breakpoint()),
            psi.total_count
        ),
    );
    let c = cell.psi.as_ref().unwrap();
    note(format!(
        "cell-count areas: psi(17) = {:.5}, psi(19) = {:.4}, psi(50) = {:.4}",
        c.eval(17.0),
        c.eval(19.0),
        c.eval(50.0)
    ));
}

fn ac7(t: &mut Tally, desk: &EnsembleReport, cell: &EnsembleReport) {
    let sphere = sphere_run(AreaEstimator::Subcell);
    let ks = ks_distance(sphere.psi.as_ref().unwrap(), desk.psi.as_ref().unwrap()).unwrap();
    t.record("AC7", "sphere against plane", ks <= 0.10, format!("KS {ks:.4} (l = 80, 50 realizations, subcell areas)"));
    let sphere_cell = sphere_run(AreaEstimator::CellCount);
    let ks_cell = ks_distance(sphere_cell.psi.as_ref().unwrap(), cell.psi.as_ref().unwrap()).unwrap();
    note(format!("cell-count areas: KS {ks_cell:.4}"));
}

fn ac8(t: &mut Tally, desk: &EnsembleReport) {
    let c = common::kac_rice_length_density();
    let d = desk.nodal_length_density.unwrap();
    let rel = (d.mean - c).abs() / c;
    t.record(
        "AC8",
        "nodal length density",
        rel <= 0.05,
        format!("{:.5} +- {:.5} vs {c:.5} ({:.2}% off)", d.mean, d.stderr, 100.0 * rel),
    );
}

fn ac9(t: &mut Tally) {
    let grid = GridSpec::PlanarWindow { side: 1.5, spacing: 0.5 };
    let mismatches = (0u32..1 << 16)
        .filter(|bits| {
            let values: Vec<f64> = (0..16).map(|k| if bits >> k & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let positive: Vec<bool> = values.iter().map(|&v| v >= 0.0).collect();
            let field = FieldSample { model: SpectralModel::PlaneWave2D, grid, values, seed: 0, index: 0 };
            label_domains(&field).labels != common::flood_fill_labels(&positive, 4, 4, false)
        })
        .count();
    t.record("AC9", "labeling oracle", mismatches == 0, format!("{} of 65536 sign patterns agree", 65536 - mismatches));
}

fn ac10(t: &mut Tally, desk: &EnsembleReport) {
    let rows = desk.checks.perturbation.as_ref().unwrap();
    let median = |b: f64| rows.iter().find(|r| r.b == b).and_then(|r| r.median_delta_area).map(|m| m.mean);
    let (big, small) = (median(1e-3), median(5e-4));
    let ratio = big.zip(small).map(|(a, b)| a / b);
    let show = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{v:.4e}"));
    let matched = rows.iter().map(|r| format!("{:.3}", r.one_to_one_fraction)).collect::<Vec<_>>().join(", ");
    t.record(
        "AC10",
        "perturbation stability",
        ratio.is_some_and(|r| (1.5..=2.5).contains(&r)),
        format!("median |dA| {} -> {}, ratio {}; one-to-one fractions {matched}", show(big), show(small), show(ratio)),
    );
}

fn ac11(t: &mut Tally, desk: &EnsembleReport) {
    let again = run_ensemble(&desk_config()).unwrap();
    let (a, b) = (desk.payload_json(), again.payload_json());
    t.record(
        "AC11",
        "determinism",
        a == b,
        format!("payloads of {} and {} bytes, equal: {}", a.len(), b.len(), a == b),
    );
}

fn main() {
    let mut t = Tally { failed: Vec::new() };
    let start = Instant::now();
    let desk = run_ensemble(&desk_config()).expect("desk ensemble");
    let wall = start.elapsed().as_secs_f64();
    let cell = psi_only(AreaEstimator::CellCount);

    ac1(&mut t, &desk, wall);
    ac2(&mut t, &desk);
    ac3(&mut t);
    ac4(&mut t);
    ac5(&mut t, &desk);
    ac6(&mut t, &desk, &cell);
    ac7(&mut t, &desk, &cell);
    ac8(&mut t, &desk);
    ac9(&mut t);
    ac10(&mut t, &desk);
    ac11(&mut t, &desk);

    if t.failed.is_empty() {
        println!("acceptance: all 11 criteria pass");
    } else {
        println!("acceptance: {} failing: {}", t.failed.len(), t.failed.join(", "));
        std::process::exit(1);
    }
}
