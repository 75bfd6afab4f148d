//! Mean-decrease-impurity ranking of the full model.
//!
//! cargo run --release --example importance

use curriculum_graph::experiment::{
    assemble_features, report_importance, train_full_model, ExperimentConfig,
};
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
    let model = train_full_model(&matrix, &config)?;
    print!("{}", report_importance(&model, Some(15)).to_table());
    Ok(())
}
