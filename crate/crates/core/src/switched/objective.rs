use serde::Serialize;

use super::simulate::Sample;
use crate::analysis::ModeAnalysis;
use crate::sgraph::{BalanceVerdict, LeaderStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Objective {
    BipartiteConsensus,
    TrivialConsensus,
    IntervalBipartiteConsensus,
    BipartiteContainment,
    /// The structure fits no row of the decision table.
    Unclassifiable,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::BipartiteConsensus => "bipartite consensus",
            Objective::TrivialConsensus => "trivial consensus",
            Objective::IntervalBipartiteConsensus => "interval bipartite consensus",
            Objective::BipartiteContainment => "bipartite containment",
            Objective::Unclassifiable => "unclassifiable",
        })
    }
}

/// Objective plus the structural evidence it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveClass {
    pub objective: Objective,
    pub balance: BalanceVerdict,
    pub leaders: LeaderStructure,
    pub spanning_tree: bool,
    /// `None` when there is a single leader group.
    pub assumption3: Option<bool>,
}

pub fn classify_objective(analysis: &ModeAnalysis) -> ObjectiveClass {
    let leaders = &analysis.leaders;
    let assumption3 = analysis.assumption3();
    let objective = if !analysis.weakly_connected {
        Objective::Unclassifiable
    } else if leaders.group_count() > 1 {
        if assumption3 == Some(true) {
            Objective::BipartiteContainment
        } else {
            Objective::Unclassifiable
        }
    } else if !analysis.spanning_tree {
        Objective::Unclassifiable
    } else if analysis.balance.balanced {
        Objective::BipartiteConsensus
    } else if leaders.l1() > 0 || leaders.l2_sb() > 0 {
        Objective::IntervalBipartiteConsensus
    } else {
        Objective::TrivialConsensus
    };
    ObjectiveClass {
        objective,
        balance: analysis.balance.clone(),
        leaders: leaders.clone(),
        spanning_tree: analysis.spanning_tree,
        assumption3,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveCheck {
    pub objective: Objective,
    pub passed: bool,
    /// The quantity compared against `tol` (its meaning depends on the
    /// objective); positive values at or below `tol` pass.
    pub metric: f64,
    pub tol: f64,
}

/// Checks the limit behaviour of `class.objective` on the tail of a run.
/// Node indices of `tail` must refer to the graph `class` was computed on.
pub fn verify_objective(tail: &[Sample], class: &ObjectiveClass, tol: f64) -> ObjectiveCheck {
    let (passed, metric) = if tail.is_empty() {
        (false, f64::NAN)
    } else {
        match class.objective {
            Objective::BipartiteConsensus => bipartite(tail, &class.balance, tol),
            Objective::TrivialConsensus => {
                let m = tail.iter().map(|s| s.x.amax()).fold(0.0, f64::max);
                (m < tol, m)
            }
            Objective::IntervalBipartiteConsensus => {
                let leaders = class.leaders.leaders();
                let theta = leaders.iter().map(|&i| tail[0].x[i].abs()).fold(0.0, f64::max);
                let excess = tail
                    .iter()
                    .map(|s| s.x.amax() - theta)
                    .fold(f64::NEG_INFINITY, f64::max);
                (excess <= tol, excess)
            }
            Objective::BipartiteContainment => {
                let leaders = class.leaders.leaders();
                let followers = &class.leaders.followers;
                let excess = tail
                    .iter()
                    .map(|s| {
                        let bound = leaders.iter().map(|&i| s.x[i].abs()).fold(0.0, f64::max);
                        followers
                            .iter()
                            .map(|&j| s.x[j].abs() - bound)
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                (excess <= tol, excess)
            }
            Objective::Unclassifiable => (false, f64::NAN),
        }
    };
    ObjectiveCheck {
        objective: class.objective,
        passed,
        metric,
        tol,
    }
}

/// Moduli agree within `tol`, and nodes whose state is clearly nonzero sit
/// on the side of the gauge.
fn bipartite(tail: &[Sample], balance: &BalanceVerdict, tol: f64) -> (bool, f64) {
    let Some(gauge) = &balance.gauge else {
        return (false, f64::NAN);
    };
    let mut spread: f64 = 0.0;
    let mut signs_ok = true;
    for s in tail {
        let (lo, hi) = s
            .x
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v.abs()), hi.max(v.abs())));
        spread = spread.max(hi - lo);
        let mut side = 0.0;
        for (v, g) in s.x.iter().zip(gauge) {
            let gv = v * g.value();
            if gv.abs() > tol {
                if side == 0.0 {
                    side = gv.signum();
                } else if gv.signum() != side {
                    signs_ok = false;
                }
            }
        }
    }
    (spread < tol && signs_ok, spread)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sgraph::{Sign, SignedDigraph};
    use nalgebra::DVector;

    use Sign::{Negative as N, Positive as P};

    fn class(nodes: &[&str], edges: &[(&str, &str, Sign)]) -> ObjectiveClass {
        let g = SignedDigraph::from_labels(nodes, edges).unwrap();
        classify_objective(&ModeAnalysis::new(&g).unwrap())
    }

    fn sample(x: &[f64]) -> Sample {
        Sample {
            t: 0.0,
            mode: 0,
            x: DVector::from_row_slice(x),
            e: DVector::zeros(0),
            ebar: DVector::zeros(0),
            v: 0.0,
        }
    }

    #[test]
    fn decision_table() {
        let tree = class(&["1", "2", "3"], &[("1", "2", N), ("2", "3", P)]);
        assert_eq!(tree.objective, Objective::BipartiteConsensus);
        let cycle = class(&["1", "2", "3"], &[("1", "2", P), ("2", "3", P), ("3", "1", N)]);
        assert_eq!(cycle.objective, Objective::TrivialConsensus);
        let rooted = class(
            &["0", "1", "2", "3"],
            &[("0", "1", P), ("1", "2", P), ("2", "3", P), ("3", "1", N)],
        );
        assert_eq!(rooted.objective, Objective::IntervalBipartiteConsensus);
    }

    #[test]
    fn bipartite_sign_pattern() {
        let c = class(&["1", "2"], &[("1", "2", N)]);
        assert!(verify_objective(&[sample(&[2.0, -2.0])], &c, 1e-3).passed);
        assert!(!verify_objective(&[sample(&[2.0, 2.0])], &c, 1e-3).passed);
    }

    #[test]
    fn empty_tail_fails() {
        let c = class(&["1", "2"], &[("1", "2", P)]);
        assert!(!verify_objective(&[], &c, 1e-3).passed);
    }
}
