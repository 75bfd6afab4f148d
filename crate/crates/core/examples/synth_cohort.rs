//! Generate a synthetic curriculum and cohort and write them in the input
//! formats the pipeline reads.
//!
//! cargo run --example synth_cohort -- [out-dir]

use std::fs::File;
use std::path::PathBuf;

use curriculum_graph::panel::{write_profiles, write_records};
use curriculum_graph::synth::{generate_cohort, generate_curriculum, SynthParams};
use curriculum_graph::CurriculumGraph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "synth-out".into()),
    );
    std::fs::create_dir_all(&dir)?;
    let params = SynthParams::default();
    let doc = generate_curriculum(&params)?;
    let graph = CurriculumGraph::from_document(&doc)?;
    let cohort = generate_cohort(&graph, &params)?;
    std::fs::write(dir.join("curriculum.json"), doc.to_json())?;
    write_records(File::create(dir.join("records.csv"))?, &cohort.records)?;
    write_profiles(File::create(dir.join("profiles.csv"))?, &cohort.profiles)?;
    let graduates = cohort
        .profiles
        .iter()
        .filter(|p| p.graduated == Some(true))
        .count();
    println!(
        "{} courses, {} students, {} records, {} graduates -> {}",
        graph.len(),
        cohort.profiles.len(),
        cohort.records.len(),
        graduates,
        dir.display()
    );
    Ok(())
}
