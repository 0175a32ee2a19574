use std::collections::BTreeMap;

use serde::Serialize;

use super::Scenario;
use crate::analysis::CertifiedMode;
use crate::error::Result;
use crate::lyapunov::{mode_constants, ModeConstants};

/// Dwell-time check of one switch `from -> to` (zero-based mode indices).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellCheck {
    pub from: usize,
    pub to: usize,
    pub constants: ModeConstants,
    /// Realized duration of the new mode, s.
    pub duration: f64,
    pub passed: bool,
}

/// Switch counter and active time for one ordered pair of mode ids over the
/// whole run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellCounter {
    pub from_id: String,
    pub to_id: String,
    pub switches: usize,
    /// Total active time of the target mode, s.
    pub active_time: f64,
    pub tau_min: f64,
    /// `switches ≤ active_time / tau_min`.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellReport {
    pub checks: Vec<DwellCheck>,
    pub counters: Vec<DwellCounter>,
}

impl DwellReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.counters.iter().all(|c| c.passed)
    }
}

/// Compares each mode's realized duration against `ln(Ω)/γ` for the switch
/// into it, and aggregates the average-dwell counters with zero chatter
/// bound.
pub fn check_dwell(scenario: &Scenario, modes: &[CertifiedMode]) -> Result<DwellReport> {
    let durations = scenario.realized_durations();
    let mut checks = Vec::new();
    for i in 1..modes.len() {
        let constants = mode_constants(&modes[i].certificate, &modes[i - 1].certificate, scenario.k1)
            .map_err(|e| e.in_mode(i + 1))?;
        checks.push(DwellCheck {
            from: i - 1,
            to: i,
            constants,
            duration: durations[i],
            passed: durations[i] >= constants.tau_min,
        });
    }

    let mut active: BTreeMap<&str, f64> = BTreeMap::new();
    for (m, d) in scenario.modes.iter().zip(&durations) {
        *active.entry(m.id.as_str()).or_default() += d;
    }
    let mut pairs: BTreeMap<(&str, &str), (usize, f64)> = BTreeMap::new();
    for c in &checks {
        let key = (scenario.modes[c.from].id.as_str(), scenario.modes[c.to].id.as_str());
        let entry = pairs.entry(key).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 = entry.1.max(c.constants.tau_min);
    }
    let counters = pairs
        .into_iter()
        .map(|((from, to), (n, tau))| {
            let t = active[to];
            DwellCounter {
                from_id: from.to_owned(),
                to_id: to.to_owned(),
                switches: n,
                active_time: t,
                tau_min: tau,
                passed: n as f64 <= t / tau,
            }
        })
        .collect();
    Ok(DwellReport { checks, counters })
}
