//! Dwell-time admissibility of the benchmark as its mode durations shrink.
//!
//!     cargo run --release --example dwell_check

use std::path::Path;

use signed_omas::scenario_io::load_scenario;
use signed_omas::switched::{check_dwell, simulate};

fn main() -> signed_omas::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/nine_mode.scn");
    let base = load_scenario(&path)?;
    let modes = base.certify()?;
    for scale in [1.0, 0.5, 0.2, 0.05] {
        let s = base.scaled(scale);
        let report = check_dwell(&s, &modes)?;
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        let trace = simulate(&s, &modes)?;
        let tail = trace.last().map_or(f64::NAN, |x| x.ebar.norm());
        println!("durations x{scale:<4}: {failed} of {} switches too fast, final |ebar| = {tail:.3e}", report.checks.len());
    }
    Ok(())
}
