//! Strict Lyapunov certificates for signed edge Laplacians and the
//! switching constants derived from them.
//!
//! With no zero eigenvalue `-L_e` is Hurwitz and `P L_e + L_eᵀ P = Q` has a
//! positive definite solution. Otherwise the zero cluster is shifted away:
//! `R = L_e + α Π` has spectrum `{α (ξ times)} ∪ spec(L_e) \ {0}`, and
//! solving `P R + Rᵀ P = Q` is the same as
//! `P L_e + L_eᵀ P = Q - α (P Π + Πᵀ P)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{default_zero_tol, zero_structure};
use crate::error::{Error, Result};
use crate::linalg;

/// Which Lyapunov equation a certificate solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    /// `P L_e + L_eᵀ P = Q`.
    Plain,
    /// `P L_e + L_eᵀ P = Q - α (P Π + Πᵀ P)`.
    Shifted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovCertificate {
    pub kind: CertificateKind,
    #[serde(skip)]
    pub p: DMatrix<f64>,
    #[serde(skip)]
    pub q: DMatrix<f64>,
    /// Zero-cluster shift; `None` for plain certificates.
    pub alpha: Option<f64>,
    pub residual: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl LyapunovCertificate {
    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// `V = ½ ēᵀ P ē`.
    pub fn value(&self, ebar: &nalgebra::DVector<f64>) -> f64 {
        0.5 * ebar.dot(&(&self.p * ebar))
    }

    /// Residual tolerance every certificate must meet.
    pub fn residual_bound(&self) -> f64 {
        1e-8 * self.q.norm().max(1.0)
    }
}

fn check_q(q: &DMatrix<f64>, m: usize) -> Result<()> {
    if q.nrows() != m || q.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: q.nrows(),
        });
    }
    if (q - q.transpose()).norm() > 1e-12 * q.norm().max(1.0) {
        return Err(Error::Precondition("Q must be symmetric".into()));
    }
    if m > 0 && linalg::symmetric_extremes(q).0 <= 0.0 {
        return Err(Error::Precondition("Q must be positive definite".into()));
    }
    Ok(())
}

fn finish(
    kind: CertificateKind,
    p: DMatrix<f64>,
    q: &DMatrix<f64>,
    alpha: Option<f64>,
    le: &DMatrix<f64>,
    projector: Option<&DMatrix<f64>>,
) -> Result<LyapunovCertificate> {
    let (lambda_min, lambda_max) = linalg::symmetric_extremes(&p);
    let mut cert = LyapunovCertificate {
        kind,
        p,
        q: q.clone(),
        alpha,
        residual: 0.0,
        lambda_min,
        lambda_max,
    };
    cert.residual = validate_certificate(&cert, le, projector).defect;
    if cert.dim() > 0 && cert.lambda_min <= 0.0 {
        return Err(Error::InvalidCertificate(format!(
            "P is not positive definite (λ_min = {lambda_min:e})"
        )));
    }
    Ok(cert)
}

/// Certificate for an edge Laplacian without zero eigenvalues (directed
/// spanning trees, and the unbalanced case with `ξ = 0`).
pub fn solve_tree(le: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<LyapunovCertificate> {
    let m = le.nrows();
    check_q(q, m)?;
    let zs = zero_structure(le, default_zero_tol(le))?;
    if zs.algebraic > 0 {
        return Err(Error::ZeroEdgeEigenvalue { xi: zs.algebraic });
    }
    let p = linalg::solve_lyapunov(le, q)?;
    finish(CertificateKind::Plain, p, q, None, le, None)
}

/// Certificate for an edge Laplacian with `ξ ≥ 1` zero eigenvalues, all
/// shifted by the same `alpha`.
pub fn solve_shifted(
    le: &DMatrix<f64>,
    q: &DMatrix<f64>,
    alpha: f64,
    projector: &DMatrix<f64>,
) -> Result<LyapunovCertificate> {
    let m = le.nrows();
    check_q(q, m)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    if projector.nrows() != m || projector.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: projector.nrows(),
        });
    }
    if projector.trace() < 0.5 {
        return Err(Error::Precondition(
            "shifted certificate needs at least one zero eigenvalue".into(),
        ));
    }
    let r = le + projector * alpha;
    let tol = default_zero_tol(le);
    let eig = linalg::eigenvalues(&r)?;
    let bad: Vec<_> = eig.iter().copied().filter(|z| z.re <= tol).collect();
    if !bad.is_empty() {
        return Err(Error::NotHurwitz { eigenvalues: bad });
    }
    let p = linalg::solve_lyapunov(&r, q)?;
    finish(CertificateKind::Shifted, p, q, Some(alpha), le, Some(projector))
}

/// Independent recomputation of a certificate's defining equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateReport {
    /// Frobenius norm of `P L_e + L_eᵀ P - rhs`.
    pub defect: f64,
    pub symmetry_defect: f64,
    pub lambda_min: f64,
}

impl CertificateReport {
    pub fn passes(&self, bound: f64) -> bool {
        self.defect <= bound && self.symmetry_defect <= bound && self.lambda_min > 0.0
    }
}

/// Recomputes both sides of the certificate's equation. The shift term is
/// included whenever the certificate carries an `alpha` and a projector is
/// supplied.
pub fn validate_certificate(
    cert: &LyapunovCertificate,
    le: &DMatrix<f64>,
    projector: Option<&DMatrix<f64>>,
) -> CertificateReport {
    let p = &cert.p;
    let lhs = p * le + le.transpose() * p;
    let mut rhs = cert.q.clone();
    if let (Some(alpha), Some(pi)) = (cert.alpha, projector) {
        rhs -= (p * pi + pi.transpose() * p) * alpha;
    }
    CertificateReport {
        defect: (lhs - rhs).norm(),
        symmetry_defect: (p - p.transpose()).norm(),
        lambda_min: linalg::symmetric_extremes(p).0,
    }
}

/// Switching constants for the transition `prev -> next`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeConstants {
    /// Decay rate of the new mode, 1/s.
    pub gamma: f64,
    /// Jump amplification.
    pub omega: f64,
    /// Minimal admissible dwell time of the new mode, s.
    pub tau_min: f64,
    /// `λ_max(P_next)`, needed for the jump offset.
    pub lambda_max_next: f64,
}

impl ModeConstants {
    pub fn from_extremes(lambda_max_next: f64, lambda_min_prev: f64, k1: f64) -> Result<Self> {
        if !(lambda_max_next > 0.0 && lambda_min_prev > 0.0) {
            return Err(Error::InvalidCertificate(format!(
                "non-positive eigenvalue (λ_max next = {lambda_max_next}, λ_min prev = {lambda_min_prev})"
            )));
        }
        if !(k1 > 0.0) {
            return Err(Error::Precondition(format!("k1 must be positive, got {k1}")));
        }
        let gamma = k1 / lambda_max_next;
        let omega = 1.0 + 2.0 * lambda_max_next / lambda_min_prev;
        Ok(Self {
            gamma,
            omega,
            tau_min: omega.ln() / gamma,
            lambda_max_next,
        })
    }

    /// Jump offset `Θ = λ_max(P_next) |Φ|²`.
    pub fn theta(&self, phi_norm: f64) -> f64 {
        self.lambda_max_next * phi_norm * phi_norm
    }
}

pub fn mode_constants(
    next: &LyapunovCertificate,
    prev: &LyapunovCertificate,
    k1: f64,
) -> Result<ModeConstants> {
    ModeConstants::from_extremes(next.lambda_max, prev.lambda_min, k1)
}

/// Decay rate `γ = k1 / λ_max(P)`.
pub fn decay_rate(cert: &LyapunovCertificate, k1: f64) -> f64 {
    k1 / cert.lambda_max
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, data.len() / rows, data)
    }

    #[test]
    fn scalar_tree() {
        let c = solve_tree(&m(1, &[1.0]), &m(1, &[1.0])).unwrap();
        assert!((c.p[(0, 0)] - 0.5).abs() < 1e-15);
        assert_eq!(c.residual, 0.0);
    }

    #[test]
    fn tree_rejects_zero_eigenvalue() {
        let le = m(2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(matches!(
            solve_tree(&le, &DMatrix::identity(2, 2)),
            Err(Error::ZeroEdgeEigenvalue { xi: 1 })
        ));
    }

    #[test]
    fn q_must_be_positive_definite() {
        let r = solve_tree(&m(1, &[1.0]), &m(1, &[-1.0]));
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn corrupted_certificate_detected() {
        let le = m(2, &[1.0, 0.0, -1.0, 1.0]);
        let mut c = solve_tree(&le, &DMatrix::identity(2, 2)).unwrap();
        c.p[(0, 1)] += 0.1;
        assert!(validate_certificate(&c, &le, None).defect > 0.01);
    }

    #[test]
    fn constants_arithmetic() {
        let k = ModeConstants::from_extremes(2.0, 0.5, 4.0).unwrap();
        assert_eq!(k.gamma, 2.0);
        assert_eq!(k.omega, 9.0);
        assert!((k.tau_min - 9f64.ln() / 2.0).abs() < 1e-15);
        assert!((k.tau_min - 1.0986).abs() < 1e-4);
        assert_eq!(k.theta(3.0), 18.0);
    }

    #[test]
    fn constants_reject_bad_eigenvalues() {
        assert!(ModeConstants::from_extremes(0.0, 1.0, 1.0).is_err());
        assert!(ModeConstants::from_extremes(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn shifted_requires_positive_alpha() {
        let le = m(2, &[1.0, -1.0, -1.0, 1.0]);
        let pi = m(2, &[0.5, 0.5, 0.5, 0.5]);
        let q = DMatrix::identity(2, 2);
        assert!(solve_shifted(&le, &q, 0.0, &pi).is_err());
        let c = solve_shifted(&le, &q, 1.0, &pi).unwrap();
        assert!(c.residual < 1e-12);
    }
}
