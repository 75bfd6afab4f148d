//! Degree, betweenness, closeness and eigenvector centrality per course,
//! plus the per-module betweenness summary.
//!
//! cargo run --example centrality_table

use curriculum_graph::metrics::{module_centrality_summary, EigenvectorOptions};
use curriculum_graph::{parse_curriculum, BottleneckCriteria, CentralityTable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph = parse_curriculum(include_str!("data/diamond.json"))?;
    let criteria = BottleneckCriteria::new(0.5, 1)?;
    let table = CentralityTable::compute(&graph, &criteria, EigenvectorOptions::default())?;
    print!("{}", table.to_csv());
    println!();
    for (module, mean) in module_centrality_summary(&graph, &table.betweenness()) {
        println!("{module}: mean betweenness {mean:.4}");
    }
    Ok(())
}
