//! Property tests for the graph, metric and feature invariants.

mod common;

use std::collections::BTreeSet;

use common::{random_dag, random_subset, Oracle};
use curriculum_graph::graph::{CourseSpec, PrerequisiteSpec};
use curriculum_graph::metrics::{
    betweenness_centrality, closeness_centrality, identify_backbone, identify_bottlenecks,
};
use curriculum_graph::panel::build_panel;
use curriculum_graph::structural::StructuralContext;
use curriculum_graph::synth::{generate_cohort, generate_curriculum, SynthParams};
use curriculum_graph::{
    parse_curriculum, BottleneckCriteria, CourseSet, CurriculumDocument, CurriculumGraph,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(seed: u64) -> CurriculumGraph {
    CurriculumGraph::from_document(&random_dag(seed, 12)).unwrap()
}

fn codes(g: &CurriculumGraph, set: &CourseSet) -> BTreeSet<String> {
    g.set_codes(set).into_iter().map(String::from).collect()
}

/// The same curriculum with every code renamed and the arrays shuffled.
fn relabelled(doc: &CurriculumDocument, seed: u64) -> (CurriculumDocument, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = (0..doc.courses.len()).map(|i| format!("Z{i:03}")).collect();
    names.shuffle(&mut rng);
    let rename =
        |code: &str| names[doc.courses.iter().position(|c| c.code == code).unwrap()].clone();
    let mut courses: Vec<CourseSpec> = doc
        .courses
        .iter()
        .map(|c| CourseSpec {
            code: rename(&c.code),
            ..c.clone()
        })
        .collect();
    courses.shuffle(&mut rng);
    let mut prerequisites: Vec<PrerequisiteSpec> = doc
        .prerequisites
        .iter()
        .map(|e| PrerequisiteSpec::new(&rename(&e.from), &rename(&e.to)))
        .collect();
    prerequisites.shuffle(&mut rng);
    let doc = CurriculumDocument {
        courses,
        prerequisites,
        ..Default::default()
    };
    (doc, names)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn topological_order_respects_every_edge(seed in any::<u64>()) {
        let g = graph(seed);
        let order = g.topological_order();
        let mut position = vec![usize::MAX; g.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        prop_assert!(position.iter().all(|&p| p < g.len()));
        for (u, v) in g.edges() {
            prop_assert!(position[u] < position[v]);
        }
    }

    #[test]
    fn serialise_then_parse_is_identity(seed in any::<u64>()) {
        let g = graph(seed);
        let doc = g.to_document();
        let back = parse_curriculum(&doc.to_json()).unwrap();
        prop_assert_eq!(back.to_document(), doc);
        prop_assert_eq!(back.topological_codes(), g.topological_codes());
    }

    #[test]
    fn transitive_redundancy_matches_path_enumeration(seed in any::<u64>()) {
        let g = graph(seed);
        let o = Oracle::new(&g);
        let mut expected: Vec<(String, String)> = g
            .edges()
            .filter(|&(u, v)| o.paths[u][v].iter().any(|p| p.len() > 2))
            .map(|(u, v)| (g.code(u).to_string(), g.code(v).to_string()))
            .collect();
        expected.sort();
        let mut got = g.transitive_redundancy();
        got.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn metrics_and_features_ignore_labels(seed in any::<u64>(), relabel in any::<u64>()) {
        let doc = random_dag(seed, 12);
        let g = CurriculumGraph::from_document(&doc).unwrap();
        let (doc2, names) = relabelled(&doc, relabel);
        let h = CurriculumGraph::from_document(&doc2).unwrap();
        // index in h of course v of g
        let map: Vec<usize> = (0..g.len())
            .map(|v| {
                let original = doc.courses.iter().position(|c| c.code == g.code(v)).unwrap();
                h.index_of(&names[original]).unwrap()
            })
            .collect();
        let (bg, bh) = (betweenness_centrality(&g), betweenness_centrality(&h));
        let (cg, ch) = (closeness_centrality(&g), closeness_centrality(&h));
        for v in 0..g.len() {
            prop_assert!((bg[v] - bh[map[v]]).abs() <= 1e-12);
            prop_assert!((cg[v] - ch[map[v]]).abs() <= 1e-12);
        }
        let criteria = BottleneckCriteria::new(0.5, 1).unwrap();
        let ctx_g = StructuralContext::new(&g, &criteria).unwrap();
        let ctx_h = StructuralContext::new(&h, &criteria).unwrap();
        let image = |s: &CourseSet| -> CourseSet { s.iter().map(|v| map[v]).collect() };
        prop_assert_eq!(&image(ctx_g.backbone()), ctx_h.backbone());
        prop_assert_eq!(&image(ctx_g.bottlenecks()), ctx_h.bottlenecks());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            let s: CourseSet = random_subset(&mut rng, g.len()).into_iter().collect();
            let (fg, fh) = (ctx_g.compute_all(&s).unwrap().to_array(), ctx_h.compute_all(&image(&s)).unwrap().to_array());
            for j in 0..9 {
                prop_assert!((fg[j] - fh[j]).abs() <= 1e-12, "feature {} {} vs {}", j, fg[j], fh[j]);
            }
        }
    }

    #[test]
    fn looser_criteria_never_shrink_bottlenecks(
        seed in any::<u64>(),
        q1 in 0.01f64..=1.0,
        q2 in 0.01f64..=1.0,
        d1 in 0usize..4,
        d2 in 0usize..4,
    ) {
        let g = graph(seed);
        let bc = betweenness_centrality(&g);
        let (tight_q, loose_q) = (q1.max(q2), q1.min(q2));
        let (tight_d, loose_d) = (d1.max(d2), d1.min(d2));
        let tight = identify_bottlenecks(&g, &bc, &BottleneckCriteria::new(tight_q, tight_d).unwrap());
        let by_quantile = identify_bottlenecks(&g, &bc, &BottleneckCriteria::new(loose_q, tight_d).unwrap());
        let by_degree = identify_bottlenecks(&g, &bc, &BottleneckCriteria::new(tight_q, loose_d).unwrap());
        prop_assert!(tight.is_subset(&by_quantile));
        prop_assert!(tight.is_subset(&by_degree));
    }

    #[test]
    fn features_move_monotonically_with_the_approved_set(seed in any::<u64>()) {
        let g = graph(seed);
        let ctx = StructuralContext::new(&g, &BottleneckCriteria::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let small = random_subset(&mut rng, g.len());
        let extra = random_subset(&mut rng, g.len());
        let large: CourseSet = small.union(&extra).copied().collect();
        let small: CourseSet = small.into_iter().collect();
        let (a, b) = (ctx.compute_all(&small).unwrap(), ctx.compute_all(&large).unwrap());
        prop_assert!(a.structural_credits <= b.structural_credits);
        prop_assert!(a.backbone_completion <= b.backbone_completion);
        prop_assert!(a.bottleneck_approval <= b.bottleneck_approval);
        prop_assert!(a.blocked_credits >= b.blocked_credits);
        prop_assert!(a.distance_to_graduation >= b.distance_to_graduation);
    }

    #[test]
    fn completion_rate_is_structural_credits_over_backbone_credits(seed in any::<u64>()) {
        let g = graph(seed);
        let ctx = StructuralContext::new(&g, &BottleneckCriteria::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10 {
            let s: CourseSet = random_subset(&mut rng, g.len()).into_iter().collect();
            let f = ctx.compute_all(&s).unwrap();
            let exact = curriculum_graph::Credits(f.structural_credits.0 / ctx.backbone_credits().0);
            prop_assert_eq!(f.backbone_completion, exact.to_f64());
            prop_assert!((0.0..=1.0).contains(&f.backbone_completion));
            prop_assert!((0.0..=1.0).contains(&f.bottleneck_approval));
            prop_assert!(f.structural_credits <= ctx.backbone_credits());
            if s.is_empty() {
                prop_assert_eq!(
                    (f.mean_in_degree, f.mean_out_degree, f.module_diversity),
                    (0.0, 0.0, 0.0)
                );
            }
        }
    }

    #[test]
    fn backbone_contains_an_entry_and_a_terminal(seed in any::<u64>()) {
        let g = graph(seed);
        let b = identify_backbone(&g, g.entries(), g.terminals());
        prop_assert!(g.entries().iter().any(|&v| b.contains(v)));
        prop_assert!(g.terminals().iter().any(|&v| b.contains(v)));
        prop_assert_eq!(codes(&g, &b).len(), b.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn approved_sets_only_grow(seed in 0u64..10_000) {
        let params = SynthParams { n_students: 40, seed, ..Default::default() };
        let g = CurriculumGraph::from_document(&generate_curriculum(&params).unwrap()).unwrap();
        let cohort = generate_cohort(&g, &params).unwrap();
        let panel = build_panel(&cohort.records, &cohort.profiles, &g).unwrap().apply_filters();
        prop_assert_eq!(panel.counts.invalid_records, 0);
        prop_assert_eq!(panel.counts.conflicting_duplicates, 0);
        for history in panel.students.values() {
            for t in 1..history.last_term() {
                prop_assert!(history.approved_at(t).is_subset(&history.approved_at(t + 1)));
            }
            // every approved course had its prerequisites approved earlier
            for t in 1..=history.last_term() {
                let before = if t == 1 { CourseSet::new() } else { history.approved_at(t - 1) };
                for v in history.approved_at(t).iter().filter(|&v| !before.contains(v)) {
                    prop_assert!(g.predecessors(v).iter().all(|&p| before.contains(p)));
                }
            }
        }
    }
}
