//! Drive an experiment scenario programmatically instead of via the CLI.
//!
//! Builds a config in memory (the same struct the `ntk-lab` binary parses
//! from a file), runs the minimum-eigenvalue scenario, and inspects both
//! outputs: the per-measurement records that would become the CSV, and the
//! JSON summary with the scenario's verdicts. Everything is deterministic
//! for a fixed seed.
//!
//! Run with `cargo run --release --example scenario_harness`.

use ntk_lab::experiments::{run, ExperimentConfig};

fn main() -> ntk_lab::Result<()> {
    let mut cfg = ExperimentConfig::defaults_for("min_eig")?;
    cfg.n_list = vec![8, 16, 32, 64];
    cfg.seed = 7;

    // The config round-trips through the text grammar the CLI reads.
    println!("--- config as the CLI would read it ---");
    print!("{}", cfg.to_text());

    let (records, summary) = run(&cfg)?;

    println!("\n--- first records (of {}) ---", records.len());
    for r in records.iter().take(6) {
        println!("{:<28} {:<18} {:>24.16e}", r.param_json, r.metric, r.value);
    }

    println!("\n--- summary ---");
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));

    // Scenario verdicts live in the summary; downstream code can gate on
    // them without re-parsing the CSV.
    let bounds_ok = summary["bounds_ok"].as_bool().expect("verdict field");
    let band_ok = summary["band_ok"].as_bool().expect("verdict field");
    println!("\nbounds_ok = {bounds_ok}, band_ok = {band_ok}");

    Ok(())
}
