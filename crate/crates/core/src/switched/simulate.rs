use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::transition::{build_transition, Transition};
use super::Scenario;
use crate::algebra::{edge_states, sync_error};
use crate::analysis::CertifiedMode;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lyapunov::{mode_constants, ModeConstants};

/// Real-axis stability bound of classical RK4.
const RK4_REAL_AXIS_BOUND: f64 = 2.785;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    /// Zero-based mode index.
    pub mode: usize,
    pub x: DVector<f64>,
    pub e: DVector<f64>,
    pub ebar: DVector<f64>,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchRecord {
    pub from: usize,
    pub to: usize,
    pub transition: Transition,
    pub v_before: f64,
    pub v_after: f64,
    pub constants: ModeConstants,
    pub theta: f64,
    pub bound_satisfied: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SimulationTrace {
    pub k1: f64,
    pub dt: f64,
    pub samples: Vec<Sample>,
    pub switches: Vec<SwitchRecord>,
    /// Sample index range of each mode.
    pub mode_ranges: Vec<Range<usize>>,
    pub warnings: Vec<String>,
}

impl SimulationTrace {
    pub fn mode_samples(&self, mode: usize) -> &[Sample] {
        &self.samples[self.mode_ranges[mode].clone()]
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// Samples of the final mode within the last `fraction` of its span.
    pub fn tail(&self, fraction: f64) -> &[Sample] {
        let Some(range) = self.mode_ranges.last() else {
            return &[];
        };
        let s = &self.samples[range.clone()];
        let (Some(first), Some(last)) = (s.first(), s.last()) else {
            return &[];
        };
        let cut = last.t - fraction * (last.t - first.t);
        let start = s.iter().position(|x| x.t >= cut - 1e-12).unwrap_or(s.len());
        &s[start..]
    }
}

/// Largest step for which RK4 stays stable on `ẋ = -k1 L_s x`.
pub fn rk4_stability_limit(k1: f64, laplacian: &DMatrix<f64>) -> Result<f64> {
    let max_re = linalg::eigenvalues(laplacian)?
        .iter()
        .map(|z| z.re)
        .fold(0.0, f64::max);
    Ok(if max_re > 0.0 {
        RK4_REAL_AXIS_BOUND / (k1 * max_re)
    } else {
        f64::INFINITY
    })
}

fn rk4_step(a: &DMatrix<f64>, x: &DVector<f64>, h: f64) -> DVector<f64> {
    let k1 = a * x;
    let k2 = a * (x + &k1 * (h / 2.0));
    let k3 = a * (x + &k2 * (h / 2.0));
    let k4 = a * (x + &k3 * h);
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn check_modes(scenario: &Scenario, modes: &[CertifiedMode]) -> Result<()> {
    if modes.len() != scenario.modes.len() {
        return Err(Error::DimensionMismatch {
            expected: scenario.modes.len(),
            actual: modes.len(),
        });
    }
    Ok(())
}

/// Integrates `ẋ = -k1 L_s x` mode by mode with fixed-step RK4 and applies
/// the jump at every switch. Every step is sampled; the state at a switching
/// instant is recorded once, as the first sample of the new mode.
pub fn simulate(scenario: &Scenario, modes: &[CertifiedMode]) -> Result<SimulationTrace> {
    check_modes(scenario, modes)?;
    let (k1, dt) = (scenario.k1, scenario.dt);
    let steps = scenario.steps();
    let mut trace = SimulationTrace {
        k1,
        dt,
        ..Default::default()
    };
    let mut x = DVector::from_vec(scenario.x0());
    let mut clock = 0usize;
    let last_mode = modes.len() - 1;

    for (i, cm) in modes.iter().enumerate() {
        let an = &cm.analysis;
        let cert = &cm.certificate;
        let limit = rk4_stability_limit(k1, &an.matrices.laplacian)?;
        if dt >= limit {
            trace.warnings.push(format!(
                "mode {}: dt = {dt} exceeds the RK4 stability limit {limit:.6}",
                i + 1
            ));
        }
        let a = &an.matrices.laplacian * (-k1);
        let start = trace.samples.len();
        let record = |x: &DVector<f64>, clock: usize| -> Result<Sample> {
            let e = edge_states(&an.matrices.incidence, x)?;
            let ebar = sync_error(an.projector(), &e);
            let v = cert.value(&ebar);
            Ok(Sample {
                t: clock as f64 * dt,
                mode: i,
                x: x.clone(),
                e,
                ebar,
                v,
            })
        };
        trace.samples.push(record(&x, clock)?);
        for s in 0..steps[i] {
            x = rk4_step(&a, &x, dt);
            clock += 1;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::Integration {
                    mode: i + 1,
                    time: clock as f64 * dt,
                });
            }
            if s + 1 < steps[i] || i == last_mode {
                trace.samples.push(record(&x, clock)?);
            }
        }
        trace.mode_ranges.push(start..trace.samples.len());

        if i < last_mode {
            let next = &modes[i + 1];
            let time = clock as f64 * dt;
            let tr = build_transition(an, &next.analysis, &x, &scenario.modes[i + 1].joins, time, i + 2)?;
            let v_before = cert.value(&tr.ebar_before);
            let v_after = next.certificate.value(&tr.ebar_after);
            let constants = mode_constants(&next.certificate, cert, k1).map_err(|e| e.in_mode(i + 2))?;
            let theta = constants.theta(tr.phi_norm());
            let bound = constants.omega * v_before + theta;
            x = tr.x_after.clone();
            trace.switches.push(SwitchRecord {
                from: i,
                to: i + 1,
                bound_satisfied: v_after <= bound * (1.0 + 1e-12),
                transition: tr,
                v_before,
                v_after,
                constants,
                theta,
            });
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSample {
    pub t: f64,
    pub mode: usize,
    pub e: DVector<f64>,
    pub ebar: DVector<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct EdgeTrace {
    pub samples: Vec<EdgeSample>,
    pub mode_ranges: Vec<Range<usize>>,
}

/// Integrates `ė = -k1 L_e e` and `dē/dt = -k1 L_e ē` in edge coordinates on
/// the same grid as `node_trace`. Each mode restarts from the edge state of
/// the node-level trace at its switching instant, since joins are defined on
/// nodes.
pub fn simulate_edges(
    scenario: &Scenario,
    modes: &[CertifiedMode],
    node_trace: &SimulationTrace,
) -> Result<EdgeTrace> {
    check_modes(scenario, modes)?;
    let (k1, dt) = (scenario.k1, scenario.dt);
    let mut out = EdgeTrace::default();
    for (i, cm) in modes.iter().enumerate() {
        let range = node_trace.mode_ranges[i].clone();
        let first = &node_trace.samples[range.start];
        let a = &cm.analysis.matrices.edge_laplacian * (-k1);
        let mut e = first.e.clone();
        let mut ebar = first.ebar.clone();
        let start = out.samples.len();
        for (n, s) in node_trace.samples[range].iter().enumerate() {
            if n > 0 {
                e = rk4_step(&a, &e, dt);
                ebar = rk4_step(&a, &ebar, dt);
                if e.iter().chain(ebar.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::Integration { mode: i + 1, time: s.t });
                }
            }
            out.samples.push(EdgeSample {
                t: s.t,
                mode: i,
                e: e.clone(),
                ebar: ebar.clone(),
            });
        }
        out.mode_ranges.push(start..out.samples.len());
    }
    Ok(out)
}
