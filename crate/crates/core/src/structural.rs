//! The nine structural features of a student's approved set.
//!
//! Every function here is pure in `(graph, S)`. For a prediction issued at
//! term t+1 the caller passes the approved set as of the end of term t.

use log::warn;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CourseSet, Credits, CurriculumGraph};
use crate::metrics::{
    betweenness_centrality, identify_backbone, identify_bottlenecks, BottleneckCriteria,
};

/// Export names, in field order.
pub const STRUCTURAL_FEATURE_NAMES: [&str; 9] = [
    "STRUCT_structural_credits_approved",
    "STRUCT_backbone_completion",
    "STRUCT_bottleneck_approval_ratio",
    "STRUCT_blocked_credits",
    "STRUCT_distance_to_graduation",
    "STRUCT_num_prerequisites_met",
    "STRUCT_in_degree_mean_approved",
    "STRUCT_out_degree_mean_approved",
    "STRUCT_module_diversity",
];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureOptions {
    /// Divide module entropy by ln(number of modules present in S).
    pub normalise_module_diversity: bool,
}

/// A curriculum graph together with its backbone and bottleneck sets.
#[derive(Debug, Clone)]
pub struct StructuralContext<'g> {
    graph: &'g CurriculumGraph,
    backbone: CourseSet,
    bottlenecks: CourseSet,
    backbone_credits: Credits,
    options: FeatureOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralFeatureVector {
    pub structural_credits: Credits,
    pub backbone_completion: f64,
    pub bottleneck_approval: f64,
    pub blocked_credits: Credits,
    pub distance_to_graduation: usize,
    pub prerequisites_met: usize,
    pub mean_in_degree: f64,
    pub mean_out_degree: f64,
    pub module_diversity: f64,
}

impl StructuralFeatureVector {
    pub fn to_array(&self) -> [f64; 9] {
        [
            self.structural_credits.to_f64(),
            self.backbone_completion,
            self.bottleneck_approval,
            self.blocked_credits.to_f64(),
            self.distance_to_graduation as f64,
            self.prerequisites_met as f64,
            self.mean_in_degree,
            self.mean_out_degree,
            self.module_diversity,
        ]
    }
}

impl<'g> StructuralContext<'g> {
    /// Backbone over the graph's entry and terminal sets, bottlenecks under
    /// `criteria`.
    pub fn new(graph: &'g CurriculumGraph, criteria: &BottleneckCriteria) -> Result<Self> {
        criteria.validate()?;
        let backbone = identify_backbone(graph, graph.entries(), graph.terminals());
        let bottlenecks = identify_bottlenecks(graph, &betweenness_centrality(graph), criteria);
        Self::with_sets(graph, backbone, bottlenecks)
    }

    pub fn with_sets(
        graph: &'g CurriculumGraph,
        backbone: CourseSet,
        bottlenecks: CourseSet,
    ) -> Result<Self> {
        graph.check_set(&backbone)?;
        graph.check_set(&bottlenecks)?;
        if bottlenecks.is_empty() {
            warn!("bottleneck set is empty: bottleneck approval ratio is constant 1.0");
        }
        let backbone_credits = backbone.iter().map(|v| graph.course(v).credits).sum();
        Ok(StructuralContext {
            graph,
            backbone,
            bottlenecks,
            backbone_credits,
            options: FeatureOptions::default(),
        })
    }

    pub fn with_options(mut self, options: FeatureOptions) -> Self {
        self.options = options;
        self
    }

    pub fn graph(&self) -> &'g CurriculumGraph {
        self.graph
    }

    pub fn backbone(&self) -> &CourseSet {
        &self.backbone
    }

    pub fn bottlenecks(&self) -> &CourseSet {
        &self.bottlenecks
    }

    pub fn backbone_credits(&self) -> Credits {
        self.backbone_credits
    }

    /// SC: credits of approved backbone courses.
    pub fn structural_credits_approved(&self, approved: &CourseSet) -> Result<Credits> {
        self.graph.check_set(approved)?;
        Ok(approved
            .iter()
            .filter(|&v| self.backbone.contains(v))
            .map(|v| self.graph.course(v).credits)
            .sum())
    }

    /// BCR: SC over the total backbone credits.
    pub fn backbone_completion_rate(&self, approved: &CourseSet) -> Result<f64> {
        if self.backbone_credits.0.is_zero() {
            return Err(Error::EmptyBackbone);
        }
        let sc = self.structural_credits_approved(approved)?;
        Ok(Credits(sc.0 / self.backbone_credits.0).to_f64())
    }

    /// BAR: share of bottleneck courses approved; 1.0 when there are none.
    pub fn bottleneck_approval_ratio(&self, approved: &CourseSet) -> Result<f64> {
        self.graph.check_set(approved)?;
        if self.bottlenecks.is_empty() {
            return Ok(1.0);
        }
        let hit = self
            .bottlenecks
            .iter()
            .filter(|&v| approved.contains(v))
            .count();
        Ok(hit as f64 / self.bottlenecks.len() as f64)
    }

    /// BC: credits of unapproved courses with at least one unapproved direct
    /// prerequisite.
    pub fn blocked_credits(&self, approved: &CourseSet) -> Result<Credits> {
        self.graph.check_set(approved)?;
        Ok((0..self.graph.len())
            .filter(|&v| !approved.contains(v))
            .filter(|&v| {
                self.graph
                    .predecessors(v)
                    .iter()
                    .any(|&p| !approved.contains(p))
            })
            .map(|v| self.graph.course(v).credits)
            .sum())
    }

    /// DG: fewest unapproved courses on a path from an approved course (or,
    /// when nothing is approved, from an entry course) to any terminal.
    pub fn distance_to_graduation(&self, approved: &CourseSet) -> Result<usize> {
        self.graph.check_set(approved)?;
        let g = self.graph;
        let terminal: Vec<bool> = {
            let mut t = vec![false; g.len()];
            for &v in g.terminals() {
                t[v] = true;
            }
            t
        };
        // remaining[v]: min unapproved count over paths v ⇝ terminal, v included
        let mut remaining: Vec<Option<usize>> = vec![None; g.len()];
        for &v in g.topological_order().iter().rev() {
            let own = usize::from(!approved.contains(v));
            let mut best = if terminal[v] { Some(0) } else { None };
            for &w in g.successors(v) {
                if let Some(r) = remaining[w] {
                    best = Some(best.map_or(r, |b: usize| b.min(r)));
                }
            }
            remaining[v] = best.map(|b| b + own);
        }
        let starts: Vec<usize> = if approved.is_empty() {
            g.entries().to_vec()
        } else {
            approved.iter().collect()
        };
        starts
            .into_iter()
            .filter_map(|v| remaining[v])
            .min()
            .ok_or(Error::NoGraduationPath)
    }

    /// PS: over unapproved courses, the number of their direct prerequisites
    /// already approved.
    pub fn prerequisites_met(&self, approved: &CourseSet) -> Result<usize> {
        self.graph.check_set(approved)?;
        Ok((0..self.graph.len())
            .filter(|&v| !approved.contains(v))
            .map(|v| {
                self.graph
                    .predecessors(v)
                    .iter()
                    .filter(|&&p| approved.contains(p))
                    .count()
            })
            .sum())
    }

    /// MID: mean number of prerequisites of approved courses; 0 for ∅.
    pub fn mean_in_degree_approved(&self, approved: &CourseSet) -> Result<f64> {
        self.mean_over(approved, |v| self.graph.in_degree(v))
    }

    /// MOD: mean number of successors of approved courses; 0 for ∅.
    pub fn mean_out_degree_approved(&self, approved: &CourseSet) -> Result<f64> {
        self.mean_over(approved, |v| self.graph.out_degree(v))
    }

    fn mean_over(&self, approved: &CourseSet, degree: impl Fn(usize) -> usize) -> Result<f64> {
        self.graph.check_set(approved)?;
        if approved.is_empty() {
            return Ok(0.0);
        }
        let total: usize = approved.iter().map(degree).sum();
        Ok(total as f64 / approved.len() as f64)
    }

    /// MD: Shannon entropy (natural log) of the module distribution of S.
    pub fn module_diversity(&self, approved: &CourseSet) -> Result<f64> {
        self.graph.check_set(approved)?;
        if approved.len() <= 1 {
            return Ok(0.0);
        }
        let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
        for v in approved.iter() {
            *counts
                .entry(self.graph.course(v).module.as_str())
                .or_default() += 1;
        }
        let n = approved.len() as f64;
        let entropy: f64 = counts
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            })
            .sum();
        if self.options.normalise_module_diversity {
            if counts.len() <= 1 {
                return Ok(0.0);
            }
            return Ok(entropy / (counts.len() as f64).ln());
        }
        Ok(entropy)
    }

    pub fn compute_all(&self, approved: &CourseSet) -> Result<StructuralFeatureVector> {
        Ok(StructuralFeatureVector {
            structural_credits: self.structural_credits_approved(approved)?,
            backbone_completion: self.backbone_completion_rate(approved)?,
            bottleneck_approval: self.bottleneck_approval_ratio(approved)?,
            blocked_credits: self.blocked_credits(approved)?,
            distance_to_graduation: self.distance_to_graduation(approved)?,
            prerequisites_met: self.prerequisites_met(approved)?,
            mean_in_degree: self.mean_in_degree_approved(approved)?,
            mean_out_degree: self.mean_out_degree_approved(approved)?,
            module_diversity: self.module_diversity(approved)?,
        })
    }
}
