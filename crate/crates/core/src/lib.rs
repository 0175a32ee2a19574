//! Analysis, certification and simulation of consensus-type multi-agent
//! systems on switching signed digraphs whose agents may join or leave.
//!
//! The pipeline per mode is [`sgraph`] (structure) → [`algebra`] (incidence
//! matrices, Laplacians, zero structure of the edge Laplacian) →
//! [`lyapunov`] (certificates) → [`switched`] (jumps, integration, dwell
//! times, objective checks). [`scenario_io`] reads scenario files and drives
//! the whole pipeline.

pub mod algebra;
pub mod analysis;
pub mod error;
pub mod linalg;
pub mod lyapunov;
pub mod scenario_io;
pub mod sgraph;
pub mod switched;

pub use analysis::{CertifiedMode, ModeAnalysis};
pub use error::{Error, Result};
pub use sgraph::{Sign, SignedDigraph, SignedEdge};
pub use switched::{Mode, Scenario};
