use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use signed_omas::scenario_io::{load_scenario, run, write_trace_file, RunOptions, Stage};

#[derive(Parser)]
#[command(name = "omas", about = "Signed-graph multi-agent scenario toolkit", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Structural verdicts and zero structure of every mode.
    Analyze(Common),
    /// Adds Lyapunov certificates.
    Certify(Common),
    /// Adds switching constants and dwell-time checks.
    CheckDwell(Common),
    /// Integrates the switched system and checks every jump.
    Simulate(Common),
    /// Adds decay, objective and integrator cross-checks.
    Verify(Common),
    /// Full pipeline; writes trace.csv, report.txt and report.json to --out.
    Run(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for trace and report files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    /// Tolerance of the objective check.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, default_value_t = 1)]
    sample_every: usize,
    #[arg(long, default_value_t = 1.0)]
    scale_durations: f64,
    /// Only nodes that joined after the first mode may leave.
    #[arg(long)]
    strict_removals: bool,
    /// Structural report only.
    #[arg(long)]
    modes_only: bool,
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (stage, c, full) = match cli.verb {
        Verb::Analyze(c) => (Stage::Analyze, c, false),
        Verb::Certify(c) => (Stage::Certify, c, false),
        Verb::CheckDwell(c) => (Stage::CheckDwell, c, false),
        Verb::Simulate(c) => (Stage::Simulate, c, false),
        Verb::Verify(c) => (Stage::Verify, c, false),
        Verb::Run(c) => (Stage::Verify, c, true),
    };
    match execute(stage, &c, full) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(stage: Stage, c: &Common, full: bool) -> signed_omas::Result<bool> {
    let scenario = load_scenario(&c.scenario)?;
    let opts = RunOptions {
        stage: if c.modes_only { Stage::Analyze } else { stage },
        scale_durations: c.scale_durations,
        strict_removals: c.strict_removals,
        dt: c.dt,
        tol: c.tol,
        ..RunOptions::default()
    };
    let outcome = run(&scenario, &opts)?;
    let report = &outcome.report;
    if c.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    let out = match (&c.out, full) {
        (Some(dir), _) => Some(dir.clone()),
        (None, true) => Some(PathBuf::from(".")),
        (None, false) => None,
    };
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir)?;
        if let Some(trace) = &outcome.trace {
            write_trace_file(&dir.join("trace.csv"), &outcome.scenario, trace, c.sample_every)?;
        }
        std::fs::write(dir.join("report.txt"), report.to_text())?;
        std::fs::write(dir.join("report.json"), report.to_json())?;
    }
    Ok(report.passed)
}
