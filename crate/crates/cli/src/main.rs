//! Command-line front end: every subcommand validates its flags, runs the
//! engine and writes plot-ready tables into `--out`.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 runtime failure.

mod args;
mod commands;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nodal_census::Error;

use commands::*;

#[derive(Debug, Parser)]
#[command(name = "nodal-census", version, about = "Monte Carlo census of nodal domains of random waves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one field and save it as NCFS with a JSON sidecar
    Sample(SampleArgs),
    /// Decompose a field into nodal domains and write the domain table
    Nodal(NodalArgs),
    /// Estimate the distribution of scaled domain areas
    Psi(PsiArgs),
    /// Estimate the number of domains per unit area
    Ns(NsArgs),
    /// Check the two-sided domain-count bound on balls
    Sandwich(SandwichArgs),
    /// Compare the smallest interior domain areas with the isoperimetric floor
    FaberKrahn(FaberKrahnArgs),
    /// Compare the area distribution on the sphere with a planar report
    SphereCompare(SphereCompareArgs),
    /// Run the full ensemble with every supported check
    Report(ReportArgs),
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidModel(_)
        | Error::InvalidGrid(_)
        | Error::EmptyFrequencySet { .. }
        | Error::Mismatch(_)
        | Error::Domain(_)
        | Error::Geometry(_)
        | Error::Format { .. }
        | Error::ConfigHashMismatch { .. } => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (json, outcome) = match &cli.command {
        Command::Sample(a) => (a.common.json, sample(a)),
        Command::Nodal(a) => (a.common.json, nodal(a)),
        Command::Psi(a) => (a.common.json, psi(a)),
        Command::Ns(a) => (a.common.json, ns(a)),
        Command::Sandwich(a) => (a.common.json, sandwich(a)),
        Command::FaberKrahn(a) => (a.common.json, faber_krahn(a)),
        Command::SphereCompare(a) => (a.common.json, sphere_compare(a)),
        Command::Report(a) => (a.common.json, report(a)),
    };
    match outcome {
        Ok(summary) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            } else {
                print_text(&summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// One `key: value` line per scalar field, then the files written.
fn print_text(summary: &serde_json::Value) {
    let Some(map) = summary.as_object() else { return };
    for (key, value) in map {
        match value {
            serde_json::Value::Array(_) | serde_json::Value::Object(_) => {}
            serde_json::Value::String(s) => println!("{key}: {s}"),
            other => println!("{key}: {other}"),
        }
    }
    for f in map.get("files").and_then(|f| f.as_array()).into_iter().flatten() {
        println!("wrote {}", f.as_str().unwrap_or_default());
    }
}
