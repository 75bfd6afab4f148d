//! Baseline (25 features) against baseline+struct (34 features) on one
//! shared stratified split of a synthetic cohort.
//!
//! cargo run --release --example compare_models -- [seed]

use curriculum_graph::experiment::ExperimentConfig;
use curriculum_graph::synth::{run_synthetic_comparison, SynthParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;
    let params = SynthParams {
        seed,
        ..Default::default()
    };
    let run = run_synthetic_comparison(&params, &ExperimentConfig::default())?;
    println!(
        "{} rows, {} dropouts",
        run.counts.matrix_rows, run.counts.dropouts
    );
    print!("{}", run.comparison.to_table());
    println!("AUC gain from structure: {:+.4}", run.auc_gain());
    Ok(())
}
