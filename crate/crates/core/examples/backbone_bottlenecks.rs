//! Backbone and bottleneck sets of a synthetic curriculum under a few
//! bottleneck criteria.
//!
//! cargo run --example backbone_bottlenecks

use curriculum_graph::metrics::{betweenness_centrality, identify_backbone, identify_bottlenecks};
use curriculum_graph::synth::{generate_curriculum, SynthParams};
use curriculum_graph::{BottleneckCriteria, CurriculumGraph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = generate_curriculum(&SynthParams::default())?;
    let graph = CurriculumGraph::from_document(&doc)?;
    let backbone = identify_backbone(&graph, graph.entries(), graph.terminals());
    println!(
        "backbone ({}): {}",
        backbone.len(),
        graph.set_codes(&backbone).join(" ")
    );
    let betweenness = betweenness_centrality(&graph);
    for (quantile, min_out) in [(0.9, 2), (0.75, 2), (0.5, 1)] {
        let criteria = BottleneckCriteria::new(quantile, min_out)?;
        let set = identify_bottlenecks(&graph, &betweenness, &criteria);
        println!(
            "bottlenecks q={quantile} out>={min_out}: {}",
            graph.set_codes(&set).join(" ")
        );
    }
    Ok(())
}
