//! Signed incidence algebra of one mode.
//!
//! For edge `k = (tail j -> head i)`:
//!
//! | matrix   | row `j` | row `i` (cooperative) | row `i` (antagonistic) |
//! |----------|---------|-----------------------|------------------------|
//! | `E_s`    | `+1`    | `-1`                  | `+1`                   |
//! | `E_s⊙`   | `0`     | `-1`                  | `+1`                   |
//!
//! and `L_s = E_s⊙ E_sᵀ`, `L_e = E_sᵀ E_s⊙`. The spectral projector onto the
//! generalized zero eigenspace of `L_e` splits edge states into their
//! weighted average `Π e` and the synchronization error `(I - Π) e`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::sgraph::{BalanceVerdict, LeaderStructure, SignedDigraph};

/// Relative zero threshold applied to `max(1, ‖L_e‖_F)`.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Radius used to merge split copies of a multiple eigenvalue before
/// comparing spectra.
pub const EIGEN_CLUSTER_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeMatrices {
    /// `E_s`, N×M.
    pub incidence: DMatrix<f64>,
    /// `E_s⊙`, N×M.
    pub in_incidence: DMatrix<f64>,
    /// `L_s`, N×N.
    pub laplacian: DMatrix<f64>,
    /// `L_e`, M×M.
    pub edge_laplacian: DMatrix<f64>,
}

pub fn build_matrices(g: &SignedDigraph) -> Result<ModeMatrices> {
    g.ensure_valid()?;
    let (n, m) = (g.node_count(), g.edge_count());
    let mut incidence = DMatrix::zeros(n, m);
    let mut in_incidence = DMatrix::zeros(n, m);
    for (k, e) in g.edges().iter().enumerate() {
        let head = if e.sign.is_cooperative() { -1.0 } else { 1.0 };
        incidence[(e.tail, k)] = 1.0;
        incidence[(e.head, k)] = head;
        in_incidence[(e.head, k)] = head;
    }
    let laplacian = &in_incidence * incidence.transpose();
    let edge_laplacian = incidence.transpose() * &in_incidence;
    Ok(ModeMatrices {
        incidence,
        in_incidence,
        laplacian,
        edge_laplacian,
    })
}

/// Number of zero eigenvalues of `L_e` implied by the graph structure.
///
/// With a single leader group (directed spanning tree) this is `M - N + 1`
/// unless the only leader group is a structurally unbalanced rooted SCC, in
/// which case `L_s` is nonsingular and the count drops to `M - N`. With
/// several leader groups every root node and every balanced rooted SCC
/// contributes one zero eigenvalue to `L_s`.
pub fn predicted_zero_multiplicity(
    balance: &BalanceVerdict,
    leaders: &LeaderStructure,
    nodes: usize,
    edges: usize,
) -> usize {
    let base = edges as isize - nodes as isize;
    let extra = if leaders.group_count() <= 1 {
        let sub_only = !balance.balanced && leaders.l1() == 0 && leaders.l2_sb() == 0;
        if sub_only {
            0
        } else {
            1
        }
    } else {
        (leaders.l1() + leaders.l2_sb()) as isize
    };
    (base + extra).max(0) as usize
}

/// Zero-eigenvalue data of `L_e`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroStructure {
    /// Algebraic multiplicity `ξ`.
    pub algebraic: usize,
    /// Geometric multiplicity.
    pub geometric: usize,
    #[serde(skip)]
    pub projector: DMatrix<f64>,
    #[serde(skip)]
    pub eigenvalues: Vec<Complex64>,
    pub zero_tol: f64,
}

impl ZeroStructure {
    pub fn xi(&self) -> usize {
        self.algebraic
    }

    pub fn is_defective(&self) -> bool {
        self.algebraic > self.geometric
    }
}

pub fn default_zero_tol(le: &DMatrix<f64>) -> f64 {
    DEFAULT_ZERO_TOL * le.norm().max(1.0)
}

/// Spectral projector onto the generalized zero eigenspace of `le`.
///
/// `le` is first brought to the ordered block form
/// `Qᵀ L_e Q = [[T11, T12], [0, T22]]` with every zero eigenvalue in `T11`.
/// The Sylvester equation `T11 Y - Y T22 = -T12` decouples the blocks; since
/// `T11` is nilpotent the solution is the finite series
/// `Y = Σ_j T11^j T12 T22^-(j+1)`. Then `Π = Q [[I, -Y], [0, 0]] Qᵀ`.
pub fn zero_structure(le: &DMatrix<f64>, zero_tol: f64) -> Result<ZeroStructure> {
    let m = le.nrows();
    if le.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: le.ncols(),
        });
    }
    let defl = linalg::deflate_zero(le, zero_tol)?;
    let xi = defl.algebraic;
    let q = &defl.q;
    let t = q.transpose() * le * q;
    let rest = m - xi;
    let t22 = t.view((xi, xi), (rest, rest)).into_owned();

    let mut eigenvalues = vec![Complex64::new(0.0, 0.0); xi];
    let tail = linalg::eigenvalues(&t22)?;
    let near: Vec<f64> = tail
        .iter()
        .map(|z| z.norm())
        .filter(|&a| a < 10.0 * zero_tol)
        .collect();
    if !near.is_empty() {
        return Err(Error::AmbiguousZeroCluster {
            zero_tol,
            values: near,
        });
    }
    eigenvalues.extend(tail);

    let projector = if xi == 0 {
        DMatrix::zeros(m, m)
    } else if rest == 0 {
        DMatrix::identity(m, m)
    } else {
        let t11 = t.view((0, 0), (xi, xi)).into_owned();
        let t12 = t.view((0, xi), (xi, rest)).into_owned();
        let t22_inv = t22
            .clone()
            .lu()
            .try_inverse()
            .ok_or(Error::SingularLyapunov)?;
        let mut y = &t12 * &t22_inv;
        for _ in 1..xi {
            y = (&t12 + &t11 * &y) * &t22_inv;
        }
        let mut block = DMatrix::zeros(m, m);
        block.view_mut((0, 0), (xi, xi)).fill_with_identity();
        block.view_mut((0, xi), (xi, rest)).copy_from(&(-y));
        q * block * q.transpose()
    };

    Ok(ZeroStructure {
        algebraic: xi,
        geometric: defl.geometric,
        projector,
        eigenvalues,
        zero_tol,
    })
}

/// `e = E_sᵀ x`; component `k` is `x_tail - sign_k · x_head`.
pub fn edge_states(incidence: &DMatrix<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    if incidence.nrows() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: incidence.nrows(),
            actual: x.len(),
        });
    }
    Ok(incidence.tr_mul(x))
}

/// Weighted edge average `Π e`.
pub fn edge_average(projector: &DMatrix<f64>, e: &DVector<f64>) -> DVector<f64> {
    projector * e
}

/// Synchronization error `(I - Π) e`.
pub fn sync_error(projector: &DMatrix<f64>, e: &DVector<f64>) -> DVector<f64> {
    e - projector * e
}

/// Eigenvalues outside the zero cluster, with split multiple eigenvalues
/// merged into their cluster mean. The cluster size comes from null-space
/// deflation: a defective zero eigenvalue of order `k` spreads to about
/// `ε^{1/k}` in floating point, far beyond any modulus threshold.
pub fn nonzero_spectrum(m: &DMatrix<f64>, zero_tol: f64) -> Result<Vec<Complex64>> {
    let zeros = linalg::deflate_zero(m, zero_tol)?.algebraic;
    let mut ev = linalg::eigenvalues(m)?;
    ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    Ok(linalg::cluster_means(&ev[zeros.min(ev.len())..], EIGEN_CLUSTER_RADIUS))
}

/// Largest pairing deviation between the nonzero spectra of `L_s` and
/// `L_e`, or `None` when the counts differ.
pub fn spectral_mismatch(mats: &ModeMatrices, zero_tol: f64) -> Result<Option<f64>> {
    let a = nonzero_spectrum(&mats.laplacian, zero_tol)?;
    let b = nonzero_spectrum(&mats.edge_laplacian, zero_tol)?;
    Ok(linalg::pair_spectra(&a, &b))
}
