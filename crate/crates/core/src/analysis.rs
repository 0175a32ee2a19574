//! Per-mode bundle of structural verdicts, matrices and zero structure.

use nalgebra::DMatrix;

use crate::algebra::{self, ModeMatrices, ZeroStructure};
use crate::error::{Error, Result};
use crate::lyapunov::{self, LyapunovCertificate};
use crate::sgraph::{BalanceVerdict, LeaderStructure, SignedDigraph};

#[derive(Debug, Clone)]
pub struct ModeAnalysis {
    pub graph: SignedDigraph,
    pub weakly_connected: bool,
    pub spanning_tree: bool,
    pub balance: BalanceVerdict,
    pub leaders: LeaderStructure,
    pub matrices: ModeMatrices,
    pub zero: ZeroStructure,
    pub predicted_xi: usize,
}

impl ModeAnalysis {
    /// Analyzes a valid graph with the default relative zero tolerance.
    pub fn new(graph: &SignedDigraph) -> Result<Self> {
        let matrices = algebra::build_matrices(graph)?;
        let tol = algebra::default_zero_tol(&matrices.edge_laplacian);
        Self::with_zero_tol(graph, matrices, tol)
    }

    pub fn with_zero_tol(graph: &SignedDigraph, matrices: ModeMatrices, zero_tol: f64) -> Result<Self> {
        let zero = algebra::zero_structure(&matrices.edge_laplacian, zero_tol)?;
        let balance = graph.structural_balance();
        let leaders = graph.leader_structure();
        let predicted_xi = algebra::predicted_zero_multiplicity(
            &balance,
            &leaders,
            graph.node_count(),
            graph.edge_count(),
        );
        Ok(Self {
            graph: graph.clone(),
            weakly_connected: graph.is_weakly_connected(),
            spanning_tree: graph.has_directed_spanning_tree(),
            balance,
            leaders,
            matrices,
            zero,
            predicted_xi,
        })
    }

    pub fn xi(&self) -> usize {
        self.zero.algebraic
    }

    pub fn projector(&self) -> &DMatrix<f64> {
        &self.zero.projector
    }

    /// Leader reachability, or `None` when there is at most one leader group.
    pub fn assumption3(&self) -> Option<bool> {
        self.graph.check_assumption3(&self.leaders).ok()
    }

    /// Certificate with `Q = I`: plain when `ξ = 0`, shifted by `alpha`
    /// otherwise.
    pub fn certify(&self, alpha: f64) -> Result<LyapunovCertificate> {
        let m = self.graph.edge_count();
        let q = DMatrix::identity(m, m);
        let le = &self.matrices.edge_laplacian;
        if self.xi() == 0 {
            lyapunov::solve_tree(le, &q)
        } else {
            lyapunov::solve_shifted(le, &q, alpha, self.projector())
        }
    }
}

/// A mode's analysis together with its certificate.
#[derive(Debug, Clone)]
pub struct CertifiedMode {
    pub analysis: ModeAnalysis,
    pub certificate: LyapunovCertificate,
}

impl CertifiedMode {
    pub fn new(graph: &SignedDigraph, alpha: f64) -> Result<Self> {
        let analysis = ModeAnalysis::new(graph)?;
        if !analysis.weakly_connected {
            return Err(Error::Precondition("mode graph is not weakly connected".into()));
        }
        let certificate = analysis.certify(alpha)?;
        Ok(Self {
            analysis,
            certificate,
        })
    }
}
