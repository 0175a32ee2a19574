use num_complex::Complex64;
use thiserror::Error;

use crate::sgraph::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid signed digraph: {}", join_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Singular values or eigenvalues too close to the zero threshold to be
    /// classified either way.
    #[error("zero-eigenvalue cluster is ambiguous at tolerance {zero_tol:e}: {values:?}")]
    AmbiguousZeroCluster { zero_tol: f64, values: Vec<f64> },

    #[error("edge Laplacian has {xi} zero eigenvalue(s); use the shifted Lyapunov equation")]
    ZeroEdgeEigenvalue { xi: usize },

    /// `-R` is not Hurwitz: the graph violates the spanning-tree or
    /// leader-reachability hypotheses.
    #[error("shifted edge Laplacian is not positive stable; offending eigenvalues {eigenvalues:?}")]
    NotHurwitz { eigenvalues: Vec<Complex64> },

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("real Schur decomposition did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),

    #[error("Lyapunov equation is singular (a block pair shares an eigenvalue)")]
    SingularLyapunov,

    #[error("non-finite state in mode {mode} at t = {time}")]
    Integration { mode: usize, time: f64 },

    #[error("mode {mode}: node '{node}' is new but has no join state")]
    MissingJoin { mode: usize, node: String },

    #[error("mode {mode}: {source}")]
    InMode {
        mode: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Parse(#[from] crate::scenario_io::ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_mode(self, mode: usize) -> Self {
        Error::InMode {
            mode,
            source: Box::new(self),
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
