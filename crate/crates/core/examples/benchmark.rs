//! The nine-mode benchmark: agents join and leave, edges flip sign and
//! direction. Prints per-switch constants and the decay of the
//! synchronization error.
//!
//!     cargo run --release --example benchmark

use std::path::Path;

use signed_omas::scenario_io::load_scenario;
use signed_omas::switched::{simulate, verify_jump_bounds};

fn main() -> signed_omas::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/nine_mode.scn");
    let scenario = load_scenario(&path)?;
    let modes = scenario.certify()?;
    let trace = simulate(&scenario, &modes)?;

    println!("{:>5} {:>9} {:>9} {:>9} {:>10} {:>10}", "t", "gamma", "Omega", "tau_min", "V(t-)", "V(t+)");
    for s in &trace.switches {
        let c = &s.constants;
        println!(
            "{:>5.1} {:>9.4} {:>9.3} {:>9.4} {:>10.3e} {:>10.3e}",
            s.transition.time, c.gamma, c.omega, c.tau_min, s.v_before, s.v_after
        );
    }
    let jumps = verify_jump_bounds(&trace);
    println!("jump bounds hold at every switch: {}", jumps.all_passed());

    for (i, r) in trace.mode_ranges.iter().enumerate() {
        let end = &trace.samples[r.end - 1];
        println!("mode {}: |ebar| at t = {:.3}: {:.3e}", i + 1, end.t, end.ebar.norm());
    }
    Ok(())
}
