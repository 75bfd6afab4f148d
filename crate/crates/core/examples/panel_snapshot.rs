//! Build the student-semester panel from a synthetic cohort and take the
//! reference-term snapshot.
//!
//! cargo run --example panel_snapshot

use curriculum_graph::panel::{build_panel, ObservationWindow};
use curriculum_graph::synth::{generate_cohort, generate_curriculum, SynthParams};
use curriculum_graph::CurriculumGraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = SynthParams {
        n_students: 200,
        ..Default::default()
    };
    let graph = CurriculumGraph::from_document(&generate_curriculum(&params)?)?;
    let cohort = generate_cohort(&graph, &params)?;
    let panel = build_panel(&cohort.records, &cohort.profiles, &graph)?.apply_filters();
    println!("{}", serde_json::to_string_pretty(&panel.counts)?);

    let snapshots = panel.snapshot_at(5, &ObservationWindow::default())?;
    let dropouts = snapshots
        .snapshots
        .iter()
        .filter(|s| s.label.is_dropout())
        .count();
    println!(
        "term 5: {} snapshots, {} dropouts, {} censored, {} not reached",
        snapshots.snapshots.len(),
        dropouts,
        snapshots.censored,
        snapshots.excluded_not_reached
    );
    let first = &snapshots.snapshots[0];
    for row in &first.history.rows {
        println!(
            "{} term {} ({}): {} events, {} approved",
            first.student_id,
            row.term_index,
            row.calendar,
            row.events.len(),
            row.approved.len()
        );
    }
    Ok(())
}
