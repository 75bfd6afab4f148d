//! Parse a curriculum file and report its structure.
//!
//! cargo run --example validate_curriculum -- [curriculum.json]

use curriculum_graph::parse_curriculum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/diamond.json").into()
    });
    let graph = parse_curriculum(&std::fs::read_to_string(&path)?)?;
    println!(
        "{path}: {} courses, {} edges, acyclic",
        graph.len(),
        graph.edge_count()
    );
    println!("topological order: {}", graph.topological_codes().join(" "));
    let entries: Vec<&str> = graph.entries().iter().map(|&v| graph.code(v)).collect();
    let terminals: Vec<&str> = graph.terminals().iter().map(|&v| graph.code(v)).collect();
    println!(
        "entries: {}  terminals: {}",
        entries.join(" "),
        terminals.join(" ")
    );
    for (from, to) in graph.transitive_redundancy() {
        println!("redundant: {from} -> {to}");
    }
    Ok(())
}
