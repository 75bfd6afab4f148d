//! The nine structural features for a few approved sets on the diamond
//! curriculum.
//!
//! cargo run --example structural_features

use curriculum_graph::structural::{StructuralContext, STRUCTURAL_FEATURE_NAMES};
use curriculum_graph::{parse_curriculum, BottleneckCriteria};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let graph = parse_curriculum(include_str!("data/diamond.json"))?;
    let ctx = StructuralContext::new(&graph, &BottleneckCriteria::new(0.5, 1)?)?;
    println!("backbone: {}", graph.set_codes(ctx.backbone()).join(" "));
    println!(
        "bottlenecks: {}",
        graph.set_codes(ctx.bottlenecks()).join(" ")
    );
    for approved in [&[][..], &["A"], &["A", "B"], &["A", "B", "C", "D"]] {
        let set = graph.course_set(approved)?;
        let values = ctx.compute_all(&set)?.to_array();
        println!("\nS = {{{}}}", approved.join(", "));
        for (name, v) in STRUCTURAL_FEATURE_NAMES.iter().zip(values) {
            println!("  {name:<36} {v:.4}");
        }
    }
    Ok(())
}
