use serde::Serialize;

use super::simulate::{EdgeTrace, SimulationTrace};
use crate::analysis::CertifiedMode;
use crate::lyapunov::decay_rate;

/// Multiplicative slack on the exponential envelope.
pub const ENVELOPE_SLACK: f64 = 1e-6;
/// Relative tolerance of the finite-difference decay identity.
pub const DECAY_FD_TOL: f64 = 1e-4;
/// Samples whose analytic `dV/dt` is below this fraction of the mode's peak
/// are excluded from the finite-difference comparison.
const FD_SIGNIFICANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeDecay {
    pub mode: usize,
    pub gamma: f64,
    /// `max V(t) / (V(t_l⁺) e^{-γ (t - t_l)})` over the mode.
    pub max_envelope_ratio: f64,
    pub envelope_ok: bool,
    pub fd_max_rel_error: f64,
    pub fd_points: usize,
    pub fd_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub modes: Vec<ModeDecay>,
}

impl DecayReport {
    pub fn all_passed(&self) -> bool {
        self.modes.iter().all(|m| m.envelope_ok && m.fd_ok)
    }
}

/// Checks `V(t) ≤ V(t_l⁺) e^{-γ(t-t_l)} (1 + 1e-6)` at every sample and
/// compares centered differences of `V` with `-(k1/2)|ē|²`.
///
/// `V` is evaluated from `ē = (I - Π) E_sᵀ x`, which carries an absolute
/// rounding error of order `ε |x|`; values below that floor are treated as
/// zero.
pub fn verify_mode_decay(trace: &SimulationTrace, modes: &[CertifiedMode]) -> DecayReport {
    let k1 = trace.k1;
    let dt = trace.dt;
    let mut out = Vec::new();
    for (i, cm) in modes.iter().enumerate().take(trace.mode_ranges.len()) {
        let samples = trace.mode_samples(i);
        let cert = &cm.certificate;
        let gamma = decay_rate(cert, k1);
        let Some(first) = samples.first() else {
            continue;
        };
        let x_scale = samples
            .iter()
            .map(|s| s.x.amax())
            .fold(0.0, f64::max)
            .max(1.0);
        let floor = cert.lambda_max * (64.0 * f64::EPSILON * x_scale).powi(2) * cert.dim().max(1) as f64;

        let mut max_ratio: f64 = 0.0;
        let mut envelope_ok = true;
        for s in samples {
            let env = first.v * (-gamma * (s.t - first.t)).exp();
            if s.v > env * (1.0 + ENVELOPE_SLACK) + floor {
                envelope_ok = false;
            }
            if env > floor {
                max_ratio = max_ratio.max(s.v / env);
            }
        }

        let analytic: Vec<f64> = samples
            .iter()
            .map(|s| -0.5 * k1 * s.ebar.norm_squared())
            .collect();
        let peak = analytic.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let mut fd_max: f64 = 0.0;
        let mut fd_points = 0;
        for n in 1..samples.len().saturating_sub(1) {
            let an = analytic[n];
            if an.abs() <= FD_SIGNIFICANCE * peak || an.abs() <= floor {
                continue;
            }
            let fd = (samples[n + 1].v - samples[n - 1].v) / (2.0 * dt);
            fd_max = fd_max.max((fd - an).abs() / an.abs());
            fd_points += 1;
        }
        out.push(ModeDecay {
            mode: i,
            gamma,
            max_envelope_ratio: max_ratio,
            envelope_ok,
            fd_max_rel_error: fd_max,
            fd_points,
            fd_ok: fd_max < DECAY_FD_TOL,
        });
    }
    DecayReport { modes: out }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpCheck {
    pub time: f64,
    pub from: usize,
    pub to: usize,
    pub v_before: f64,
    pub v_after: f64,
    pub omega: f64,
    pub theta: f64,
    pub phi_norm: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpReport {
    pub jumps: Vec<JumpCheck>,
    /// Largest `|Φ_l|` over the run.
    pub max_phi_norm: f64,
}

impl JumpReport {
    pub fn all_passed(&self) -> bool {
        self.jumps.iter().all(|j| j.passed)
    }
}

/// `V(t_l⁺) ≤ Ω V(t_l⁻) + Θ` at every switch.
pub fn verify_jump_bounds(trace: &SimulationTrace) -> JumpReport {
    let jumps: Vec<JumpCheck> = trace
        .switches
        .iter()
        .map(|s| JumpCheck {
            time: s.transition.time,
            from: s.from,
            to: s.to,
            v_before: s.v_before,
            v_after: s.v_after,
            omega: s.constants.omega,
            theta: s.theta,
            phi_norm: s.transition.phi_norm(),
            passed: s.bound_satisfied,
        })
        .collect();
    let max_phi_norm = jumps.iter().map(|j| j.phi_norm).fold(0.0, f64::max);
    JumpReport { jumps, max_phi_norm }
}

/// Largest deviation `|E_sᵀ x(t) - e(t)|_∞` between the node-level and
/// edge-level integrations, together with the same figure for `ē`.
pub fn max_integrator_deviation(node: &SimulationTrace, edge: &EdgeTrace) -> (f64, f64) {
    node.samples
        .iter()
        .zip(&edge.samples)
        .fold((0.0f64, 0.0f64), |(de, db), (n, e)| {
            (de.max((&n.e - &e.e).amax()), db.max((&n.ebar - &e.ebar).amax()))
        })
}
