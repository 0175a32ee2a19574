//! Classifies the four canonical topologies and checks the predicted limit
//! behaviour on a long run.
//!
//!     cargo run --release --example objectives

use std::path::Path;

use signed_omas::scenario_io::load_scenario;
use signed_omas::switched::{classify_objective, simulate, verify_objective};

fn main() -> signed_omas::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for name in ["sb_tree", "sub_cycle", "sub_with_root", "multileader"] {
        let scenario = load_scenario(&dir.join(format!("{name}.scn")))?;
        let modes = scenario.certify()?;
        let trace = simulate(&scenario, &modes)?;
        let class = classify_objective(&modes[0].analysis);
        let check = verify_objective(trace.tail(0.2), &class, 1e-3);
        let x = &trace.last().expect("non-empty run").x;
        let x: Vec<String> = x.iter().map(|v| format!("{v:.3}")).collect();
        println!("{name:>16}: {:<28} verified={} x(T)=[{}]", class.objective.to_string(), check.passed, x.join(", "));
    }
    Ok(())
}
