//! Builds a sweep scenario in code, runs it in parallel and prints the CSV
//! that the command-line tool would write.
//!
//! Run with `cargo run --example scenario_sweep`.

use std::f64::consts::PI;

use qrsim::scenario::{parse_scenario, run_scenario, to_csv};
use serde_json::json;

fn main() -> qrsim::Result<()> {
    let taus: Vec<f64> = (0..8).map(|i| PI / (5.0 + 0.5 * i as f64)).collect();
    let text = json!({
        "name": "delta-scan",
        "modulation": { "omega0": 10.0, "tau": taus[0], "kind": "pi_flip" },
        "cold": { "preset": "magnon", "omega_cut": 5.0, "temperature": 1.0 },
        "hot": { "preset": "hot_cubic", "temperature": 5.0 },
        "run": {
            "kind": "sweep",
            "parameter": "modulation.tau",
            "values": taus,
            "inner": { "kind": "steady_state" }
        }
    })
    .to_string();

    let scenario = parse_scenario(&text)?;
    println!("# {} ({})", scenario.name, scenario.config_hash());
    let result = run_scenario(&scenario, Some(4))?;
    print!("{}", to_csv(&scenario, &result));
    Ok(())
}
