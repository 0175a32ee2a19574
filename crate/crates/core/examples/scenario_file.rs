//! Parses a scenario from text, reports diagnostics for a broken one, and
//! runs the full pipeline with a CSV trace.
//!
//!     cargo run --example scenario_file

use signed_omas::scenario_io::{parse_scenario, run, to_dsl, write_trace, RunOptions};

const TEXT: &str = "\
scenario k1 2 dt 0.001

mode leader duration 3
  join a 1
  join b -2
  edge a -> b -

# agent c joins and follows b
mode grow duration 10
  node a
  node b
  join c 4
  edge a -> b -
  edge b -> c +
";

fn main() -> signed_omas::Result<()> {
    let scenario = parse_scenario(TEXT)?;
    assert_eq!(parse_scenario(&to_dsl(&scenario))?, scenario);
    print!("{}", to_dsl(&scenario));

    let broken = "scenario k1 1\nmode m duration 0\n join 1 0\n edge 1 -> 1 +\n edge 1 -> 2 +\n";
    if let Err(e) = parse_scenario(broken) {
        println!("\ndiagnostics:\n{e}");
    }

    let outcome = run(&scenario, &RunOptions::default())?;
    println!("\n{}", outcome.report.to_text());
    if let Some(trace) = &outcome.trace {
        let mut csv = Vec::new();
        write_trace(&mut csv, &outcome.scenario, trace, 1000)?;
        print!("{}", String::from_utf8_lossy(&csv));
    }
    Ok(())
}
