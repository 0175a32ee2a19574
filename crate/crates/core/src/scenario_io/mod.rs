//! Scenario files, trace CSV output and run reports.

mod dsl;
mod report;
mod trace;

pub use dsl::{parse_scenario, parse_scenario_bytes, to_dsl, Diagnostic, ParseError};
pub use report::{
    run, sig12, CertificateSummary, ModeReport, RunOptions, RunOutcome, RunReport, Stage,
    TransitionReport, INTEGRATOR_TOL,
};
pub use trace::{write_trace, write_trace_file, TraceColumns};

/// Reads and parses a scenario file.
pub fn load_scenario(path: &std::path::Path) -> crate::error::Result<crate::switched::Scenario> {
    let bytes = std::fs::read(path)?;
    Ok(parse_scenario_bytes(&bytes)?)
}
