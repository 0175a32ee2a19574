use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::analysis::{CertifiedMode, ModeAnalysis};
use crate::error::{Error, Result};
use crate::lyapunov::{validate_certificate, CertificateKind};
use crate::switched::{
    check_dwell, classify_objective, max_integrator_deviation, simulate, simulate_edges,
    verify_jump_bounds, verify_mode_decay, verify_objective, DecayReport, DwellCounter,
    JumpReport, Objective, ObjectiveCheck, Scenario, SimulationTrace,
};

/// How far down the pipeline a run goes. Each stage includes the previous
/// ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Stage {
    Analyze,
    Certify,
    CheckDwell,
    Simulate,
    Verify,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub stage: Stage,
    /// Multiplies every mode duration.
    pub scale_durations: f64,
    pub strict_removals: bool,
    /// Overrides the scenario's step size.
    pub dt: Option<f64>,
    /// Tolerance of the objective check.
    pub tol: f64,
    /// Fraction of the final mode treated as the tail.
    pub tail_fraction: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            stage: Stage::Verify,
            scale_durations: 1.0,
            strict_removals: false,
            dt: None,
            tol: 1e-3,
            tail_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub kind: CertificateKind,
    pub alpha: Option<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub residual: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub index: usize,
    pub id: String,
    pub nodes: usize,
    pub edges: usize,
    pub weakly_connected: bool,
    pub spanning_tree: bool,
    pub structurally_balanced: bool,
    pub root_nodes: usize,
    pub sb_rooted_sccs: usize,
    pub sub_rooted_sccs: usize,
    pub assumption3: Option<bool>,
    pub xi_predicted: usize,
    pub xi_numeric: usize,
    pub zero_geometric: usize,
    pub objective: Objective,
    pub certificate: Option<CertificateSummary>,
}

impl ModeReport {
    fn new(index: usize, id: &str, an: &ModeAnalysis) -> Self {
        Self {
            index: index + 1,
            id: id.to_owned(),
            nodes: an.graph.node_count(),
            edges: an.graph.edge_count(),
            weakly_connected: an.weakly_connected,
            spanning_tree: an.spanning_tree,
            structurally_balanced: an.balance.balanced,
            root_nodes: an.leaders.l1(),
            sb_rooted_sccs: an.leaders.l2_sb(),
            sub_rooted_sccs: an.leaders.l2_sub(),
            assumption3: an.assumption3(),
            xi_predicted: an.predicted_xi,
            xi_numeric: an.xi(),
            zero_geometric: an.zero.geometric,
            objective: classify_objective(an).objective,
            certificate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub from: usize,
    pub to: usize,
    pub gamma: f64,
    pub omega: f64,
    pub tau_min: f64,
    pub duration: f64,
    pub dwell_ok: bool,
    /// Jump-bound figures, present once the run was simulated.
    pub v_before: Option<f64>,
    pub v_after: Option<f64>,
    pub theta: Option<f64>,
    pub phi_norm: Option<f64>,
    pub jump_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub stage: Stage,
    pub k1: f64,
    pub dt: f64,
    pub modes: Vec<ModeReport>,
    pub transitions: Vec<TransitionReport>,
    pub dwell_counters: Vec<DwellCounter>,
    pub final_time: Option<f64>,
    /// `|ē|` at the final sample.
    pub tail_ebar_norm: Option<f64>,
    pub max_phi_norm: Option<f64>,
    pub decay: Option<DecayReport>,
    pub objective: Option<ObjectiveCheck>,
    pub integrator_deviation: Option<f64>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

/// Largest node/edge integrator disagreement tolerated by `verify`.
pub const INTEGRATOR_TOL: f64 = 1e-6;

/// Result of [`run`]: the report plus the trace when one was computed.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub trace: Option<SimulationTrace>,
    pub scenario: Scenario,
}

/// Analyze, certify, check dwell times, simulate and verify, stopping after
/// `opts.stage`.
pub fn run(scenario: &Scenario, opts: &RunOptions) -> Result<RunOutcome> {
    let mut scenario = scenario.scaled(opts.scale_durations);
    if let Some(dt) = opts.dt {
        scenario.dt = dt;
    }
    scenario.validate(opts.strict_removals)?;

    let mut report = RunReport {
        stage: opts.stage,
        k1: scenario.k1,
        dt: scenario.dt,
        modes: Vec::new(),
        transitions: Vec::new(),
        dwell_counters: Vec::new(),
        final_time: None,
        tail_ebar_norm: None,
        max_phi_norm: None,
        decay: None,
        objective: None,
        integrator_deviation: None,
        warnings: Vec::new(),
        passed: true,
    };

    if opts.stage == Stage::Analyze {
        for (i, m) in scenario.modes.iter().enumerate() {
            let an = ModeAnalysis::new(&m.graph).map_err(|e| e.in_mode(i + 1))?;
            let mr = ModeReport::new(i, &m.id, &an);
            report.passed &= mr.xi_predicted == mr.xi_numeric;
            report.modes.push(mr);
        }
        return Ok(RunOutcome {
            report,
            trace: None,
            scenario,
        });
    }

    let modes = scenario.certify()?;
    for (i, (m, cm)) in scenario.modes.iter().zip(&modes).enumerate() {
        let mut mr = ModeReport::new(i, &m.id, &cm.analysis);
        let cert = &cm.certificate;
        let check = validate_certificate(cert, &cm.analysis.matrices.edge_laplacian, Some(cm.analysis.projector()));
        let valid = check.passes(cert.residual_bound());
        mr.certificate = Some(CertificateSummary {
            kind: cert.kind,
            alpha: cert.alpha,
            lambda_min: cert.lambda_min,
            lambda_max: cert.lambda_max,
            residual: cert.residual,
            valid,
        });
        report.passed &= valid && mr.xi_predicted == mr.xi_numeric;
        report.modes.push(mr);
    }
    if opts.stage == Stage::Certify {
        return Ok(RunOutcome {
            report,
            trace: None,
            scenario,
        });
    }

    let dwell = check_dwell(&scenario, &modes)?;
    report.passed &= dwell.all_passed();
    report.transitions = dwell
        .checks
        .iter()
        .map(|c| TransitionReport {
            from: c.from + 1,
            to: c.to + 1,
            gamma: c.constants.gamma,
            omega: c.constants.omega,
            tau_min: c.constants.tau_min,
            duration: c.duration,
            dwell_ok: c.passed,
            v_before: None,
            v_after: None,
            theta: None,
            phi_norm: None,
            jump_ok: None,
        })
        .collect();
    report.dwell_counters = dwell.counters;
    if opts.stage == Stage::CheckDwell {
        return Ok(RunOutcome {
            report,
            trace: None,
            scenario,
        });
    }

    let trace = simulate(&scenario, &modes)?;
    report.warnings.extend(trace.warnings.iter().cloned());
    let jumps: JumpReport = verify_jump_bounds(&trace);
    for (t, j) in report.transitions.iter_mut().zip(&jumps.jumps) {
        t.v_before = Some(j.v_before);
        t.v_after = Some(j.v_after);
        t.theta = Some(j.theta);
        t.phi_norm = Some(j.phi_norm);
        t.jump_ok = Some(j.passed);
    }
    report.passed &= jumps.all_passed();
    report.max_phi_norm = Some(jumps.max_phi_norm);
    if let Some(last) = trace.last() {
        report.final_time = Some(last.t);
        report.tail_ebar_norm = Some(last.ebar.norm());
    }

    if opts.stage == Stage::Verify {
        verify_into(&mut report, &scenario, &modes, &trace, opts)?;
    }
    Ok(RunOutcome {
        report,
        trace: Some(trace),
        scenario,
    })
}

fn verify_into(
    report: &mut RunReport,
    scenario: &Scenario,
    modes: &[CertifiedMode],
    trace: &SimulationTrace,
    opts: &RunOptions,
) -> Result<()> {
    let decay = verify_mode_decay(trace, modes);
    report.passed &= decay.all_passed();
    report.decay = Some(decay);

    let last = modes.last().ok_or_else(|| Error::Precondition("scenario has no modes".into()))?;
    let class = classify_objective(&last.analysis);
    let check = verify_objective(trace.tail(opts.tail_fraction), &class, opts.tol);
    report.passed &= check.passed;
    report.objective = Some(check);

    let edges = simulate_edges(scenario, modes, trace)?;
    let (dev_e, dev_ebar) = max_integrator_deviation(trace, &edges);
    let dev = dev_e.max(dev_ebar);
    report.passed &= dev < INTEGRATOR_TOL;
    report.integrator_deviation = Some(dev);
    Ok(())
}

/// Formats with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n
            .as_f64()
            .and_then(|f| sig12(f).parse::<f64>().ok())
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

impl RunReport {
    /// Structured twin of [`RunReport::to_text`], numbers rounded to 12
    /// significant digits.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report is always serializable");
        serde_json::to_string_pretty(&round_numbers(v)).expect("value is always serializable")
    }

    pub fn to_text(&self) -> String {
        let f = sig12;
        let opt = |x: Option<f64>| x.map_or("-".to_owned(), f);
        let flag = |b: bool| if b { "pass" } else { "FAIL" };
        let mut s = String::new();
        let _ = writeln!(s, "stage {:?}  k1 {}  dt {}", self.stage, f(self.k1), f(self.dt));
        let _ = writeln!(s, "\nmodes");
        for m in &self.modes {
            let _ = writeln!(
                s,
                "  {} '{}': N={} M={} connected={} tree={} balanced={} roots={} sb_scc={} sub_scc={} a3={} xi={}/{} (geom {}) -> {}",
                m.index,
                m.id,
                m.nodes,
                m.edges,
                m.weakly_connected,
                m.spanning_tree,
                m.structurally_balanced,
                m.root_nodes,
                m.sb_rooted_sccs,
                m.sub_rooted_sccs,
                m.assumption3.map_or("-".into(), |b| b.to_string()),
                m.xi_predicted,
                m.xi_numeric,
                m.zero_geometric,
                m.objective,
            );
            if let Some(c) = &m.certificate {
                let _ = writeln!(
                    s,
                    "      P: {:?} alpha={} lambda=[{}, {}] residual={} {}",
                    c.kind,
                    opt(c.alpha),
                    f(c.lambda_min),
                    f(c.lambda_max),
                    f(c.residual),
                    flag(c.valid),
                );
            }
        }
        if !self.transitions.is_empty() {
            let _ = writeln!(s, "\ntransitions");
            for t in &self.transitions {
                let _ = write!(
                    s,
                    "  {}->{}: gamma={} omega={} tau_min={} duration={} dwell {}",
                    t.from,
                    t.to,
                    f(t.gamma),
                    f(t.omega),
                    f(t.tau_min),
                    f(t.duration),
                    flag(t.dwell_ok),
                );
                if let Some(ok) = t.jump_ok {
                    let _ = write!(
                        s,
                        "  V-={} V+={} theta={} |phi|={} jump {}",
                        opt(t.v_before),
                        opt(t.v_after),
                        opt(t.theta),
                        opt(t.phi_norm),
                        flag(ok),
                    );
                }
                s.push('\n');
            }
            for c in &self.dwell_counters {
                let _ = writeln!(
                    s,
                    "  counter {}->{}: {} switch(es), active {} s, tau_min {} {}",
                    c.from_id,
                    c.to_id,
                    c.switches,
                    f(c.active_time),
                    f(c.tau_min),
                    flag(c.passed),
                );
            }
        }
        if let Some(d) = &self.decay {
            let _ = writeln!(s, "\ndecay");
            for m in &d.modes {
                let _ = writeln!(
                    s,
                    "  mode {}: gamma={} envelope ratio={} {} fd err={} ({} pts) {}",
                    m.mode + 1,
                    f(m.gamma),
                    f(m.max_envelope_ratio),
                    flag(m.envelope_ok),
                    f(m.fd_max_rel_error),
                    m.fd_points,
                    flag(m.fd_ok),
                );
            }
        }
        if self.final_time.is_some() {
            let _ = writeln!(s, "\nfinal t={} |ebar|={} max |phi|={}", opt(self.final_time), opt(self.tail_ebar_norm), opt(self.max_phi_norm));
        }
        if let Some(o) = &self.objective {
            let _ = writeln!(s, "objective: {} metric={} tol={} {}", o.objective, f(o.metric), f(o.tol), flag(o.passed));
        }
        if let Some(d) = self.integrator_deviation {
            let _ = writeln!(s, "integrator deviation: {} {}", f(d), flag(d < INTEGRATOR_TOL));
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        let _ = writeln!(s, "\nresult: {}", flag(self.passed));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(-1234.5), "-1234.5");
        assert_eq!(sig12(2.0f64.sqrt() * 1e-7), "1.41421356237e-7");
    }
}
