use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{edge_states, sync_error};
use crate::analysis::ModeAnalysis;
use crate::error::{Error, Result};

/// Jump `ē(t⁺) = Ξ ē(t⁻) + Φ` at a switching instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub time: f64,
    /// `Ξ`, M_new × M_old selection matrix.
    pub edge_map: DMatrix<f64>,
    /// `Φ`, length M_new.
    pub phi: DVector<f64>,
    pub ebar_before: DVector<f64>,
    pub ebar_after: DVector<f64>,
    /// Node states of the new mode right after the switch.
    pub x_after: DVector<f64>,
}

impl Transition {
    pub fn phi_norm(&self) -> f64 {
        self.phi.norm()
    }

    /// Spectral norm of `Ξ`.
    pub fn edge_map_norm(&self) -> f64 {
        if self.edge_map.is_empty() {
            return 0.0;
        }
        self.edge_map.clone().svd(false, false).singular_values.max()
    }
}

/// Carries node states across a switch and derives `Ξ` and `Φ`.
///
/// An edge survives only if the new mode has an edge with the same tail,
/// head and sign; a sign or direction change counts as removal plus
/// addition. Surviving nodes keep their state, new nodes take their join
/// state, vanished nodes are dropped.
pub fn build_transition(
    prev: &ModeAnalysis,
    next: &ModeAnalysis,
    x_before: &DVector<f64>,
    joins: &BTreeMap<String, f64>,
    time: f64,
    mode_index: usize,
) -> Result<Transition> {
    let (pg, ng) = (&prev.graph, &next.graph);
    if x_before.len() != pg.node_count() {
        return Err(Error::DimensionMismatch {
            expected: pg.node_count(),
            actual: x_before.len(),
        });
    }
    let x_after = DVector::from_iterator(
        ng.node_count(),
        ng.labels()
            .iter()
            .map(|l| {
                if let Some(&v) = joins.get(l) {
                    Ok(v)
                } else if let Some(i) = pg.index_of(l) {
                    Ok(x_before[i])
                } else {
                    Err(Error::MissingJoin {
                        mode: mode_index,
                        node: l.clone(),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?,
    );

    let mut edge_map = DMatrix::zeros(ng.edge_count(), pg.edge_count());
    for (k, e) in ng.edges().iter().enumerate() {
        let old = pg.edges().iter().position(|o| {
            pg.label(o.tail) == ng.label(e.tail)
                && pg.label(o.head) == ng.label(e.head)
                && o.sign == e.sign
        });
        if let Some(j) = old {
            edge_map[(k, j)] = 1.0;
        }
    }

    let e_before = edge_states(&prev.matrices.incidence, x_before)?;
    let ebar_before = sync_error(prev.projector(), &e_before);
    let e_after = edge_states(&next.matrices.incidence, &x_after)?;
    let ebar_after = sync_error(next.projector(), &e_after);
    let phi = &ebar_after - &edge_map * &ebar_before;
    Ok(Transition {
        time,
        edge_map,
        phi,
        ebar_before,
        ebar_after,
        x_after,
    })
}
