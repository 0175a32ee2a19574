mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use signed_omas::algebra::{build_matrices, edge_states, spectral_mismatch, sync_error};
use signed_omas::ModeAnalysis;

fn arb_connected() -> impl Strategy<Value = signed_omas::SignedDigraph> {
    any::<u64>().prop_map(|seed| random_connected(&mut rng(seed), 9))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matrices_match_entrywise_definitions(g in arb_connected()) {
        let m = build_matrices(&g).unwrap();
        prop_assert_eq!(&m.laplacian, &laplacian_by_definition(&g));
        let le = edge_laplacian_by_definition(&g);
        for (k, row) in le.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                prop_assert_eq!(m.edge_laplacian[(k, j)], v as f64);
            }
        }
    }

    #[test]
    fn zero_count_matches_exact_rank_and_formula(g in arb_connected()) {
        let an = ModeAnalysis::new(&g).unwrap();
        let exact = exact_zero_multiplicity(&edge_laplacian_by_definition(&g));
        prop_assert_eq!(an.zero.algebraic, exact);
        prop_assert_eq!(an.predicted_xi, exact);
    }

    #[test]
    fn projector_properties(g in arb_connected()) {
        let an = ModeAnalysis::new(&g).unwrap();
        let pi = an.projector();
        let le = &an.matrices.edge_laplacian;
        let scale = 1.0 + pi.norm();
        prop_assert!((pi * pi - pi).norm() < 1e-9 * scale);
        prop_assert!((pi * le - le * pi).norm() < 1e-9 * scale * le.norm());
        prop_assert!((pi.trace() - an.xi() as f64).abs() < 1e-8);
        // the complement is a flow invariant: Π L_e (I - Π) = 0
        let m = le.nrows();
        let comp = DMatrix::identity(m, m) - pi;
        prop_assert!((pi * le * comp).norm() < 1e-9 * scale * le.norm());
    }

    #[test]
    fn nonzero_spectra_coincide(g in arb_connected()) {
        let an = ModeAnalysis::new(&g).unwrap();
        let d = spectral_mismatch(&an.matrices, an.zero.zero_tol).unwrap();
        prop_assert!(d.is_some_and(|d| d < 1e-8), "mismatch {:?}", d);
    }

    #[test]
    fn edge_states_edge_by_edge(g in arb_connected(), xs in prop::collection::vec(-10.0f64..10.0, 10)) {
        let x = DVector::from_iterator(g.node_count(), xs.into_iter().take(g.node_count()));
        let m = build_matrices(&g).unwrap();
        let e = edge_states(&m.incidence, &x).unwrap();
        for (k, ed) in g.edges().iter().enumerate() {
            prop_assert!((e[k] - (x[ed.tail] - ed.sign.value() * x[ed.head])).abs() < 1e-12);
        }
    }
}

#[test]
fn g1_edge_states_and_complementary_projection() {
    let an = ModeAnalysis::new(&g1()).unwrap();
    assert_eq!(an.xi(), 1);
    let x = DVector::from_vec(vec![3.5, 4.0, -2.0, -6.5]);
    let e = edge_states(&an.matrices.incidence, &x).unwrap();
    // 1->2 -, 3->1 +, 2->4 +, 3->4 -
    assert_eq!(e.as_slice(), &[3.5 + 4.0, -2.0 - 3.5, 4.0 + 6.5, -2.0 - 6.5]);
    let ebar = sync_error(an.projector(), &e);
    assert!((an.projector() * ebar).norm() < 1e-10);
}

#[test]
fn multileader_three_zero_eigenvalues() {
    let an = ModeAnalysis::new(&multileader()).unwrap();
    assert_eq!((an.predicted_xi, an.xi()), (3, 3));
    assert_eq!(an.projector().trace().round(), 3.0);
}

#[test]
fn tree_has_no_zero_cluster() {
    let an = ModeAnalysis::new(&graph(&["1", "2", "3"], &[("1", "2", 1), ("1", "3", -1)])).unwrap();
    assert_eq!(an.xi(), 0);
    let e = DVector::from_vec(vec![0.3, -1.2]);
    assert_eq!(sync_error(an.projector(), &e), e);
}
