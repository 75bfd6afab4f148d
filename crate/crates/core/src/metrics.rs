//! Course centralities, backbone and bottleneck extraction.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CourseSet, CurriculumGraph};

/// Betweenness values closer than this are treated as tied when applying the
/// bottleneck threshold.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BottleneckCriteria {
    /// Nearest-rank quantile over the nonzero betweenness values, in (0, 1].
    pub betweenness_quantile: f64,
    pub min_out_degree: usize,
}

impl Default for BottleneckCriteria {
    fn default() -> Self {
        BottleneckCriteria {
            betweenness_quantile: 0.90,
            min_out_degree: 2,
        }
    }
}

impl BottleneckCriteria {
    pub fn new(betweenness_quantile: f64, min_out_degree: usize) -> Result<Self> {
        let c = BottleneckCriteria {
            betweenness_quantile,
            min_out_degree,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.betweenness_quantile > 0.0 && self.betweenness_quantile <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "betweenness quantile {} outside (0, 1]",
                self.betweenness_quantile
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvectorOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EigenvectorOptions {
    fn default() -> Self {
        EigenvectorOptions {
            tolerance: 1e-10,
            max_iterations: 1000,
        }
    }
}

/// (in-degree, out-degree) per course.
pub fn degree_centrality(graph: &CurriculumGraph) -> Vec<(usize, usize)> {
    (0..graph.len())
        .map(|v| (graph.in_degree(v), graph.out_degree(v)))
        .collect()
}

/// Hop distances from `source`, `None` when unreachable, following
/// successors (`forward`) or predecessors.
pub(crate) fn bfs_distances(
    graph: &CurriculumGraph,
    source: usize,
    forward: bool,
) -> Vec<Option<usize>> {
    let mut dist = vec![None; graph.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap() + 1;
        let next = if forward {
            graph.successors(v)
        } else {
            graph.predecessors(v)
        };
        for &w in next {
            if dist[w].is_none() {
                dist[w] = Some(d);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Directed shortest-path betweenness (Brandes accumulation), normalised by
/// (n-1)(n-2). Zero for graphs with fewer than three courses.
pub fn betweenness_centrality(graph: &CurriculumGraph) -> Vec<f64> {
    let n = graph.len();
    let mut centrality = vec![0.0; n];
    if n < 3 {
        return centrality;
    }
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        stack.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in graph.successors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in graph.predecessors(w) {
                if dist[v] != usize::MAX && dist[w] == dist[v] + 1 {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    let scale = ((n - 1) * (n - 2)) as f64;
    for c in &mut centrality {
        *c /= scale;
    }
    centrality
}

/// Harmonic out-closeness: mean of 1/d(v, u) over the other courses, with
/// unreachable courses contributing zero.
pub fn closeness_centrality(graph: &CurriculumGraph) -> Vec<f64> {
    let n = graph.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|v| {
            let total: f64 = bfs_distances(graph, v, true)
                .iter()
                .enumerate()
                .filter(|&(u, _)| u != v)
                .filter_map(|(_, d)| d.map(|d| 1.0 / d as f64))
                // fold from +0.0: an empty f64 sum is -0.0
                .fold(0.0, |acc, x| acc + x);
            total / (n - 1) as f64
        })
        .collect()
}

/// Power iteration on the undirected projection, shifted by the identity so
/// bipartite graphs (stars, chains) converge instead of oscillating. The
/// result is max-normalised to 1. An edgeless graph yields all zeros.
pub fn eigenvector_centrality(
    graph: &CurriculumGraph,
    options: EigenvectorOptions,
) -> Result<Vec<f64>> {
    let n = graph.len();
    if graph.edge_count() == 0 {
        warn!("eigenvector centrality: graph has no edges, returning zeros");
        return Ok(vec![0.0; n]);
    }
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut nb: Vec<usize> = graph
                .successors(v)
                .iter()
                .chain(graph.predecessors(v))
                .copied()
                .collect();
            nb.sort_unstable();
            nb
        })
        .collect();
    let mut x = vec![1.0f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..options.max_iterations {
        let mut next: Vec<f64> = (0..n)
            .map(|v| x[v] + neighbours[v].iter().map(|&u| x[u]).sum::<f64>())
            .collect();
        let max = next.iter().cloned().fold(0.0, f64::max);
        for value in &mut next {
            *value /= max;
        }
        residual = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if residual < options.tolerance {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        residual,
    })
}

/// Union of the node sets of every minimum-hop path from an entry to a
/// terminal, per (entry, terminal) pair that is connected.
///
/// A course lies on a shortest s→t path exactly when
/// d(s, v) + d(v, t) = d(s, t).
pub fn identify_backbone(
    graph: &CurriculumGraph,
    entries: &[usize],
    terminals: &[usize],
) -> CourseSet {
    let from_terminal: Vec<Vec<Option<usize>>> = terminals
        .iter()
        .map(|&t| bfs_distances(graph, t, false))
        .collect();
    let mut backbone = CourseSet::new();
    for &s in entries {
        let from_entry = bfs_distances(graph, s, true);
        for (ti, &t) in terminals.iter().enumerate() {
            let Some(total) = from_entry[t] else { continue };
            for v in 0..graph.len() {
                if let (Some(a), Some(b)) = (from_entry[v], from_terminal[ti][v]) {
                    if a + b == total {
                        backbone.insert(v);
                    }
                }
            }
        }
    }
    backbone
}

/// Nearest-rank quantile of a sorted slice.
pub fn nearest_rank(sorted: &[f64], quantile: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = (quantile * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Courses whose betweenness reaches the criteria quantile of the nonzero
/// betweenness distribution and whose out-degree reaches the minimum.
pub fn identify_bottlenecks(
    graph: &CurriculumGraph,
    betweenness: &[f64],
    criteria: &BottleneckCriteria,
) -> CourseSet {
    let mut nonzero: Vec<f64> = betweenness.iter().copied().filter(|&b| b > 0.0).collect();
    nonzero.sort_by(f64::total_cmp);
    let Some(threshold) = nearest_rank(&nonzero, criteria.betweenness_quantile) else {
        return CourseSet::new();
    };
    (0..graph.len())
        .filter(|&v| betweenness[v] > 0.0 && betweenness[v] >= threshold - TIE_EPSILON)
        .filter(|&v| graph.out_degree(v) >= criteria.min_out_degree)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityRow {
    pub code: String,
    pub in_degree: usize,
    pub out_degree: usize,
    pub betweenness: f64,
    pub closeness: f64,
    pub eigenvector: f64,
    pub is_backbone: bool,
    pub is_bottleneck: bool,
}

/// Per-course structural profile, rows in code order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralityTable {
    pub rows: Vec<CentralityRow>,
}

impl CentralityTable {
    pub fn compute(
        graph: &CurriculumGraph,
        criteria: &BottleneckCriteria,
        eigen: EigenvectorOptions,
    ) -> Result<Self> {
        criteria.validate()?;
        let betweenness = betweenness_centrality(graph);
        let closeness = closeness_centrality(graph);
        let eigenvector = eigenvector_centrality(graph, eigen)?;
        let backbone = identify_backbone(graph, graph.entries(), graph.terminals());
        let bottlenecks = identify_bottlenecks(graph, &betweenness, criteria);
        let rows = (0..graph.len())
            .map(|v| CentralityRow {
                code: graph.code(v).to_string(),
                in_degree: graph.in_degree(v),
                out_degree: graph.out_degree(v),
                betweenness: betweenness[v],
                closeness: closeness[v],
                eigenvector: eigenvector[v],
                is_backbone: backbone.contains(v),
                is_bottleneck: bottlenecks.contains(v),
            })
            .collect();
        Ok(CentralityTable { rows })
    }

    pub fn betweenness(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.betweenness).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "code,in_degree,out_degree,betweenness,closeness,eigenvector,is_backbone,is_bottleneck\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{:.6},{},{}",
                r.code,
                r.in_degree,
                r.out_degree,
                r.betweenness,
                r.closeness,
                r.eigenvector,
                r.is_backbone,
                r.is_bottleneck
            );
        }
        out
    }
}

/// Mean betweenness per module, keyed by module label.
pub fn module_centrality_summary(
    graph: &CurriculumGraph,
    betweenness: &[f64],
) -> BTreeMap<String, f64> {
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (v, course) in graph.courses().iter().enumerate() {
        let entry = acc.entry(course.module.clone()).or_insert((0.0, 0));
        entry.0 += betweenness[v];
        entry.1 += 1;
    }
    acc.into_iter()
        .map(|(m, (sum, count))| (m, sum / count as f64))
        .collect()
}
