//! Switched closed loop: scenario model, jump maps, integration, dwell-time
//! bookkeeping and objective verification.

mod dwell;
mod objective;
mod simulate;
mod transition;
mod verify;

use std::collections::{BTreeMap, BTreeSet};

use crate::analysis::CertifiedMode;
use crate::error::{Error, Result};
use crate::sgraph::SignedDigraph;

pub use dwell::{check_dwell, DwellCheck, DwellCounter, DwellReport};
pub use objective::{classify_objective, verify_objective, Objective, ObjectiveCheck, ObjectiveClass};
pub use simulate::{
    rk4_stability_limit, simulate, simulate_edges, EdgeSample, EdgeTrace, Sample, SimulationTrace,
    SwitchRecord,
};
pub use transition::{build_transition, Transition};
pub use verify::{
    max_integrator_deviation, verify_jump_bounds, verify_mode_decay, JumpCheck, JumpReport,
    ModeDecay, DecayReport,
};

pub const DEFAULT_DT: f64 = 1e-3;

/// One interval of constant topology.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub id: String,
    pub graph: SignedDigraph,
    /// Seconds.
    pub duration: f64,
    pub alpha: f64,
    /// Initial states of nodes absent from the previous mode (all nodes for
    /// the first mode).
    pub joins: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub k1: f64,
    pub dt: f64,
    pub modes: Vec<Mode>,
}

impl Scenario {
    /// Initial states of the first mode's nodes, in node order.
    pub fn x0(&self) -> Vec<f64> {
        self.modes
            .first()
            .map(|m| {
                m.graph
                    .labels()
                    .iter()
                    .map(|l| m.joins.get(l).copied().unwrap_or(f64::NAN))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Mode durations snapped to whole integration steps.
    pub fn steps(&self) -> Vec<usize> {
        self.modes
            .iter()
            .map(|m| ((m.duration / self.dt).round() as usize).max(1))
            .collect()
    }

    /// Realized (snapped) durations in seconds.
    pub fn realized_durations(&self) -> Vec<f64> {
        self.steps().iter().map(|&s| s as f64 * self.dt).collect()
    }

    /// Switching instants `t_1, …` (the end of every mode but the last).
    pub fn switch_times(&self) -> Vec<f64> {
        let steps = self.steps();
        let mut acc = 0usize;
        let mut out = Vec::new();
        for s in steps.iter().take(steps.len().saturating_sub(1)) {
            acc += s;
            out.push(acc as f64 * self.dt);
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Scenario {
        let mut s = self.clone();
        for m in &mut s.modes {
            m.duration *= factor;
        }
        s
    }

    /// Checks every scenario invariant. With `strict_removals`, only nodes
    /// that joined after the first mode may leave.
    pub fn validate(&self, strict_removals: bool) -> Result<()> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            return Err(Error::Precondition(format!("k1 must be positive, got {}", self.k1)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Precondition(format!("dt must be positive, got {}", self.dt)));
        }
        if self.modes.is_empty() {
            return Err(Error::Precondition("scenario has no modes".into()));
        }
        let original: BTreeSet<&str> = self.modes[0].graph.labels().iter().map(String::as_str).collect();
        let mut by_id: BTreeMap<&str, &Mode> = BTreeMap::new();
        let mut prev: BTreeSet<&str> = BTreeSet::new();
        for (i, mode) in self.modes.iter().enumerate() {
            let ctx = |e: Error| e.in_mode(i + 1);
            mode.graph.ensure_valid().map_err(ctx)?;
            if !mode.graph.is_weakly_connected() {
                return Err(ctx(Error::Precondition(format!(
                    "graph of mode '{}' is not weakly connected",
                    mode.id
                ))));
            }
            if !(mode.duration > 0.0 && mode.duration.is_finite()) {
                return Err(ctx(Error::Precondition(format!(
                    "duration must be positive, got {}",
                    mode.duration
                ))));
            }
            if !(mode.alpha > 0.0 && mode.alpha.is_finite()) {
                return Err(ctx(Error::Precondition(format!(
                    "alpha must be positive, got {}",
                    mode.alpha
                ))));
            }
            if let Some(other) = by_id.insert(&mode.id, mode) {
                if other.graph != mode.graph || other.alpha != mode.alpha {
                    return Err(ctx(Error::Precondition(format!(
                        "mode id '{}' reused with a different graph or alpha",
                        mode.id
                    ))));
                }
            }
            let current: BTreeSet<&str> = mode.graph.labels().iter().map(String::as_str).collect();
            for (node, x) in &mode.joins {
                if !current.contains(node.as_str()) {
                    return Err(ctx(Error::Precondition(format!(
                        "join state for '{node}' which is not in the mode"
                    ))));
                }
                if prev.contains(node.as_str()) {
                    return Err(ctx(Error::Precondition(format!(
                        "'{node}' is already present and cannot join"
                    ))));
                }
                if !x.is_finite() {
                    return Err(ctx(Error::Precondition(format!("join state of '{node}' is not finite"))));
                }
            }
            for node in current.difference(&prev) {
                if !mode.joins.contains_key(*node) {
                    return Err(Error::MissingJoin {
                        mode: i + 1,
                        node: node.to_string(),
                    });
                }
            }
            if strict_removals {
                if let Some(gone) = prev.difference(&current).find(|n| original.contains(*n)) {
                    return Err(ctx(Error::Precondition(format!(
                        "node '{gone}' of the initial mode cannot be removed"
                    ))));
                }
            }
            prev = current;
        }
        Ok(())
    }

    /// Analyzes and certifies every mode.
    pub fn certify(&self) -> Result<Vec<CertifiedMode>> {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, m)| CertifiedMode::new(&m.graph, m.alpha).map_err(|e| e.in_mode(i + 1)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgraph::Sign;

    fn mode(id: &str, nodes: &[&str], edges: &[(&str, &str, Sign)], joins: &[(&str, f64)]) -> Mode {
        Mode {
            id: id.into(),
            graph: SignedDigraph::from_labels(nodes, edges).unwrap(),
            duration: 1.0,
            alpha: 1.0,
            joins: joins.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    #[test]
    fn missing_join_detected() {
        let s = Scenario {
            k1: 1.0,
            dt: 1e-3,
            modes: vec![
                mode("a", &["1", "2"], &[("1", "2", Sign::Positive)], &[("1", 0.0), ("2", 1.0)]),
                mode("b", &["1", "2", "3"], &[("1", "2", Sign::Positive), ("2", "3", Sign::Positive)], &[]),
            ],
        };
        assert!(matches!(s.validate(false), Err(Error::MissingJoin { mode: 2, .. })));
    }

    #[test]
    fn strict_removal_policy() {
        let s = Scenario {
            k1: 1.0,
            dt: 1e-3,
            modes: vec![
                mode("a", &["1", "2", "3"], &[("1", "2", Sign::Positive), ("2", "3", Sign::Positive)], &[("1", 0.0), ("2", 1.0), ("3", 1.0)]),
                mode("b", &["1", "2"], &[("1", "2", Sign::Positive)], &[]),
            ],
        };
        assert!(s.validate(false).is_ok());
        assert!(s.validate(true).is_err());
    }

    #[test]
    fn disconnected_mode_rejected() {
        let s = Scenario {
            k1: 1.0,
            dt: 1e-3,
            modes: vec![mode("a", &["1", "2"], &[], &[("1", 0.0), ("2", 1.0)])],
        };
        assert!(s.validate(false).is_err());
    }

    #[test]
    fn durations_snap_to_grid() {
        let mut m = mode("a", &["1", "2"], &[("1", "2", Sign::Positive)], &[("1", 0.0), ("2", 1.0)]);
        m.duration = 0.0104;
        let s = Scenario { k1: 1.0, dt: 1e-3, modes: vec![m.clone(), m] };
        assert_eq!(s.steps(), vec![10, 10]);
        assert_eq!(s.switch_times(), vec![0.01]);
    }
}
