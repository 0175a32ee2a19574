//! Structural analysis of a single signed digraph: balance, leader groups,
//! matrices and the zero structure of the edge Laplacian.
//!
//!     cargo run --example analyze_graph

use signed_omas::algebra::spectral_mismatch;
use signed_omas::{ModeAnalysis, Sign::*, SignedDigraph};

fn main() -> signed_omas::Result<()> {
    // Three leader groups feeding agent 9.
    let g = SignedDigraph::from_labels(
        &["1", "2", "3", "4", "5", "6", "7", "8", "9"],
        &[
            ("1", "2", Negative),
            ("3", "1", Positive),
            ("2", "4", Positive),
            ("4", "3", Negative),
            ("5", "6", Positive),
            ("6", "7", Positive),
            ("7", "5", Negative),
            ("2", "9", Negative),
            ("5", "9", Positive),
            ("8", "9", Negative),
        ],
    )?;

    let an = ModeAnalysis::new(&g)?;
    let balance = g.structural_balance();
    println!("structurally balanced: {}", balance.balanced);
    println!("directed spanning tree: {}", an.spanning_tree);

    let l = &an.leaders;
    let names = |ids: &[usize]| ids.iter().map(|&i| g.label(i)).collect::<Vec<_>>().join(",");
    println!("root nodes: [{}]", names(&l.root_nodes));
    for scc in &l.sb_rooted_sccs {
        println!("balanced rooted SCC: [{}]", names(scc));
    }
    for scc in &l.sub_rooted_sccs {
        println!("unbalanced rooted SCC: [{}]", names(scc));
    }
    println!("followers: [{}]", names(&l.followers));
    println!("leaders reach every follower: {:?}", an.assumption3());

    println!(
        "zero eigenvalues of L_e: predicted {}, computed {} (geometric {})",
        an.predicted_xi, an.zero.algebraic, an.zero.geometric
    );
    if let Some(d) = spectral_mismatch(&an.matrices, an.zero.zero_tol)? {
        println!("nonzero spectra of L_s and L_e differ by at most {d:.2e}");
    }
    println!("L_s =\n{:.0}", an.matrices.laplacian);
    Ok(())
}
