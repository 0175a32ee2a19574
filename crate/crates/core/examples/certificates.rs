//! Lyapunov certificates for a spanning tree (plain equation) and for a graph
//! whose edge Laplacian has zero eigenvalues (shifted equation).
//!
//!     cargo run --example certificates

use nalgebra::DMatrix;
use signed_omas::lyapunov::{solve_shifted, solve_tree, validate_certificate};
use signed_omas::{ModeAnalysis, Sign::*, SignedDigraph};

fn main() -> signed_omas::Result<()> {
    let path = SignedDigraph::from_labels(&["1", "2", "3"], &[("1", "2", Positive), ("2", "3", Negative)])?;
    let an = ModeAnalysis::new(&path)?;
    let q = DMatrix::identity(2, 2);
    let cert = solve_tree(&an.matrices.edge_laplacian, &q)?;
    println!("path: P =\n{:.6}", cert.p);
    println!("residual {:.2e}, eigenvalues [{:.4}, {:.4}]", cert.residual, cert.lambda_min, cert.lambda_max);

    // A cooperative 3-cycle: three edges, two independent node differences,
    // so L_e has a zero eigenvalue and the plain equation has no solution.
    let cycle = SignedDigraph::from_labels(
        &["1", "2", "3"],
        &[("1", "2", Positive), ("2", "3", Positive), ("3", "1", Positive)],
    )?;
    let an = ModeAnalysis::new(&cycle)?;
    let le = &an.matrices.edge_laplacian;
    let q = DMatrix::identity(3, 3);
    match solve_tree(le, &q) {
        Ok(_) => println!("unexpected plain certificate"),
        Err(e) => println!("cycle, plain equation: {e}"),
    }
    for alpha in [0.2, 1.0, 5.0] {
        let cert = solve_shifted(le, &q, alpha, an.projector())?;
        let check = validate_certificate(&cert, le, Some(an.projector()));
        println!(
            "cycle, alpha {alpha}: lambda(P) in [{:.4}, {:.4}], recomputed defect {:.2e}",
            cert.lambda_min, cert.lambda_max, check.defect
        );
    }
    Ok(())
}
