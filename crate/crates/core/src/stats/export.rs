//! CSV tables. Floats use Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;

use super::{EmpiricalCdf, NsEstimate, SandwichVerdict};

pub fn psi_csv(cdf: &EmpiricalCdf) -> String {
    let mut out = String::from("t,psi_hat,stderr\n");
    for ((t, p), s) in cdf.breakpoints.iter().zip(&cdf.values).zip(&cdf.stderr) {
        let _ = writeln!(out, "{t},{p},{s}");
    }
    out
}

/// Same columns, evaluated on a fixed grid of `t` instead of at breakpoints.
pub fn psi_csv_binned(cdf: &EmpiricalCdf, ts: &[f64]) -> String {
    let mut out = String::from("t,psi_hat,stderr\n");
    for (t, p, s) in cdf.sample_at(ts) {
        let _ = writeln!(out, "{t},{p},{s}");
    }
    out
}

pub fn ns_csv(ns: &NsEstimate) -> String {
    let mut out = String::from("R,ratio_mean,ratio_stderr\n");
    for row in &ns.rows {
        let _ = writeln!(out, "{},{},{}", row.radius, row.mean, row.stderr);
    }
    out
}

pub fn joint_csv(pairs: &[(f64, f64)]) -> String {
    let mut out = String::from("area,perimeter\n");
    for (a, p) in pairs {
        let _ = writeln!(out, "{a},{p}");
    }
    out
}

pub fn sandwich_csv(rows: &[SandwichVerdict]) -> String {
    let mut out = String::from("r,R,t,lower,middle,upper,holds\n");
    for v in rows {
        let t = if v.t.is_infinite() { "inf".to_string() } else { v.t.to_string() };
        let _ = writeln!(out, "{},{},{t},{},{},{},{}", v.r, v.big_r, v.lower, v.middle, v.upper, v.holds);
    }
    out
}
