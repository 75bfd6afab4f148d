//! Leave-one-out ablation of the nine structural columns.
//!
//! cargo run --release --example ablation

use curriculum_graph::experiment::{assemble_features, run_ablation, ExperimentConfig};
use curriculum_graph::panel::ObservationWindow;
use curriculum_graph::synth::{generate_cohort, generate_curriculum, SynthParams};
use curriculum_graph::CurriculumGraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = SynthParams::default();
    let graph = CurriculumGraph::from_document(&generate_curriculum(&params)?)?;
    let cohort = generate_cohort(&graph, &params)?;
    let config = ExperimentConfig::default().with_seed(1);
    let (matrix, _) = assemble_features(
        &graph,
        &cohort.records,
        &cohort.profiles,
        &config,
        &ObservationWindow::default(),
        false,
    )?;
    let report = run_ablation(&matrix, &config)?;
    println!("full model AUC {:.4}", report.full.auc);
    print!("{}", report.to_table());
    Ok(())
}
