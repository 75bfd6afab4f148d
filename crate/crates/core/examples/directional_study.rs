//! Seed sweep of the structural AUC gain on synthetic cohorts, with the
//! blocked-credit coupling on and off.
//!
//! cargo run --release --example directional_study -- [seeds] [first-seed]

use curriculum_graph::experiment::ExperimentConfig;
use curriculum_graph::synth::{run_synthetic_comparison, SynthParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(Ok(10), |s| s.parse())?;
    let first: u64 = args.next().map_or(Ok(0), |s| s.parse())?;
    let config = ExperimentConfig::default();
    for coefficient in [0.1, 0.0] {
        let mut gains = Vec::new();
        for seed in first..first + seeds {
            let params = SynthParams {
                seed,
                blocked_credits_hazard_coefficient: coefficient,
                ..Default::default()
            };
            let run = run_synthetic_comparison(&params, &config)?;
            println!(
                "coefficient {coefficient} seed {seed}: dAUC {:+.4}",
                run.auc_gain()
            );
            gains.push(run.auc_gain());
        }
        let wins = gains.iter().filter(|&&d| d >= 0.0).count();
        let mean = gains.iter().sum::<f64>() / gains.len() as f64;
        let mean_abs = gains.iter().map(|d| d.abs()).sum::<f64>() / gains.len() as f64;
        println!("coefficient {coefficient}: wins {wins}/{seeds}, mean {mean:+.4}, mean |d| {mean_abs:.4}\n");
    }
    Ok(())
}
