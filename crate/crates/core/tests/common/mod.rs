//! Brute-force oracles shared by the integration tests. Everything here is
//! written from the definitions by enumerating every directed path, with
//! exact rational arithmetic, and shares no code with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use curriculum_graph::graph::{CourseSpec, PrerequisiteSpec};
use curriculum_graph::{CurriculumDocument, CurriculumGraph};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn q_to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Random DAG on 3..=max_nodes courses. Codes are shuffled so that code
/// order and topological order disagree.
pub fn random_dag(seed: u64, max_nodes: usize) -> CurriculumDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_nodes);
    let density = rng.gen_range(0.1..0.6);
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng);
    let code = |i: usize| format!("K{:02}", labels[i]);
    let courses = (0..n)
        .map(|i| {
            let mut c = CourseSpec::new(
                &code(i),
                &format!("m{}", rng.gen_range(0..3)),
                rng.gen_range(1..=8),
            );
            c.promotable = rng.gen_bool(0.5);
            c
        })
        .collect();
    let mut prerequisites = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                prerequisites.push(PrerequisiteSpec::new(&code(i), &code(j)));
            }
        }
    }
    prerequisites.shuffle(&mut rng);
    CurriculumDocument {
        courses,
        prerequisites,
        unknown: BTreeMap::new(),
    }
}

pub fn diamond() -> CurriculumGraph {
    curriculum_graph::parse_curriculum(include_str!("../../examples/data/diamond.json")).unwrap()
}

/// The graph as plain adjacency with code-ordered indices, read only
/// through the public accessors.
pub struct Oracle {
    pub n: usize,
    pub succ: Vec<Vec<usize>>,
    pub pred: Vec<Vec<usize>>,
    pub credits: Vec<Q>,
    pub module: Vec<String>,
    pub entries: Vec<usize>,
    pub terminals: Vec<usize>,
    /// paths[s][t]: every directed path s ⇝ t as node lists, s == t excluded.
    pub paths: Vec<Vec<Vec<Vec<usize>>>>,
}

impl Oracle {
    pub fn new(g: &CurriculumGraph) -> Self {
        let n = g.len();
        let succ: Vec<Vec<usize>> = (0..n).map(|v| g.successors(v).to_vec()).collect();
        let mut pred = vec![Vec::new(); n];
        for (v, list) in succ.iter().enumerate() {
            for &w in list {
                pred[w].push(v);
            }
        }
        let credits = g
            .courses()
            .iter()
            .map(|c| Q::new(*c.credits.0.numer() as i128, *c.credits.0.denom() as i128))
            .collect();
        let module = g.courses().iter().map(|c| c.module.clone()).collect();
        let flagged_entries: Vec<usize> = (0..n).filter(|&v| g.course(v).is_entry).collect();
        let entries = if flagged_entries.is_empty() {
            (0..n).filter(|&v| pred[v].is_empty()).collect()
        } else {
            flagged_entries
        };
        let flagged_terminals: Vec<usize> = (0..n).filter(|&v| g.course(v).is_capstone).collect();
        let terminals = if flagged_terminals.is_empty() {
            (0..n).filter(|&v| succ[v].is_empty()).collect()
        } else {
            flagged_terminals
        };
        let mut paths = vec![vec![Vec::new(); n]; n];
        #[allow(clippy::needless_range_loop)]
        for s in 0..n {
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last != s {
                    paths[s][last].push(path.clone());
                }
                for &w in &succ[last] {
                    let mut next = path.clone();
                    next.push(w);
                    stack.push(next);
                }
            }
        }
        Oracle {
            n,
            succ,
            pred,
            credits,
            module,
            entries,
            terminals,
            paths,
        }
    }

    fn shortest(&self, s: usize, t: usize) -> Vec<&Vec<usize>> {
        let all = &self.paths[s][t];
        let Some(min) = all.iter().map(Vec::len).min() else {
            return Vec::new();
        };
        all.iter().filter(|p| p.len() == min).collect()
    }

    pub fn distance(&self, s: usize, t: usize) -> Option<usize> {
        self.paths[s][t].iter().map(|p| p.len() - 1).min()
    }

    pub fn betweenness(&self) -> Vec<Q> {
        let n = self.n;
        let mut c = vec![q(0); n];
        if n < 3 {
            return c;
        }
        for s in 0..n {
            for t in 0..n {
                if s == t {
                    continue;
                }
                let shortest = self.shortest(s, t);
                if shortest.is_empty() {
                    continue;
                }
                let sigma = shortest.len() as i128;
                for (v, cv) in c.iter_mut().enumerate() {
                    if v == s || v == t {
                        continue;
                    }
                    let through = shortest.iter().filter(|p| p.contains(&v)).count() as i128;
                    *cv += Q::new(through, sigma);
                }
            }
        }
        let scale = ((n - 1) * (n - 2)) as i128;
        c.into_iter().map(|x| x / scale).collect()
    }

    pub fn closeness(&self) -> Vec<Q> {
        let n = self.n;
        (0..n)
            .map(|v| {
                if n < 2 {
                    return q(0);
                }
                let sum: Q = (0..n)
                    .filter(|&u| u != v)
                    .filter_map(|u| self.distance(v, u))
                    .map(|d| Q::new(1, d as i128))
                    .sum();
                sum / (n as i128 - 1)
            })
            .collect()
    }

    pub fn backbone(&self) -> BTreeSet<usize> {
        let mut b = BTreeSet::new();
        for &s in &self.entries {
            for &t in &self.terminals {
                if s == t {
                    b.insert(s);
                    continue;
                }
                for p in self.shortest(s, t) {
                    b.extend(p.iter().copied());
                }
            }
        }
        b
    }

    /// Nearest-rank quantile over the nonzero betweenness values, compared
    /// exactly.
    pub fn bottlenecks(&self, quantile: f64, min_out_degree: usize) -> BTreeSet<usize> {
        let bc = self.betweenness();
        let mut nonzero: Vec<Q> = bc.iter().copied().filter(|&x| x > q(0)).collect();
        if nonzero.is_empty() {
            return BTreeSet::new();
        }
        nonzero.sort();
        let m = nonzero.len();
        let mut rank = 1;
        while (rank as f64) < quantile * m as f64 {
            rank += 1;
        }
        let threshold = nonzero[rank.min(m) - 1];
        (0..self.n)
            .filter(|&v| bc[v] > q(0) && bc[v] >= threshold && self.succ[v].len() >= min_out_degree)
            .collect()
    }

    pub fn sc(&self, s: &BTreeSet<usize>, backbone: &BTreeSet<usize>) -> Q {
        s.intersection(backbone).map(|&v| self.credits[v]).sum()
    }

    pub fn bcr(&self, s: &BTreeSet<usize>, backbone: &BTreeSet<usize>) -> Q {
        let total: Q = backbone.iter().map(|&v| self.credits[v]).sum();
        self.sc(s, backbone) / total
    }

    pub fn bar(&self, s: &BTreeSet<usize>, k: &BTreeSet<usize>) -> Q {
        if k.is_empty() {
            return q(1);
        }
        Q::new(s.intersection(k).count() as i128, k.len() as i128)
    }

    pub fn bc(&self, s: &BTreeSet<usize>) -> Q {
        (0..self.n)
            .filter(|v| !s.contains(v))
            .filter(|&v| !self.pred[v].iter().all(|p| s.contains(p)))
            .map(|v| self.credits[v])
            .sum()
    }

    pub fn dg(&self, s: &BTreeSet<usize>) -> usize {
        let starts: Vec<usize> = if s.is_empty() {
            self.entries.clone()
        } else {
            s.iter().copied().collect()
        };
        let mut best = usize::MAX;
        for &a in &starts {
            for &t in &self.terminals {
                let candidates: Vec<Vec<usize>> = if a == t {
                    vec![vec![a]]
                } else {
                    self.paths[a][t].clone()
                };
                for p in candidates {
                    best = best.min(p.iter().filter(|v| !s.contains(v)).count());
                }
            }
        }
        best
    }

    pub fn ps(&self, s: &BTreeSet<usize>) -> usize {
        (0..self.n)
            .filter(|v| !s.contains(v))
            .map(|v| self.pred[v].iter().filter(|p| s.contains(p)).count())
            .sum()
    }

    pub fn mid(&self, s: &BTreeSet<usize>) -> Q {
        if s.is_empty() {
            return q(0);
        }
        Q::new(
            s.iter().map(|&v| self.pred[v].len() as i128).sum(),
            s.len() as i128,
        )
    }

    pub fn mod_(&self, s: &BTreeSet<usize>) -> Q {
        if s.is_empty() {
            return q(0);
        }
        Q::new(
            s.iter().map(|&v| self.succ[v].len() as i128).sum(),
            s.len() as i128,
        )
    }

    /// H = ln|S| − (1/|S|) Σ c ln c, an algebraically equal form of the
    /// Shannon entropy.
    pub fn md(&self, s: &BTreeSet<usize>) -> f64 {
        if s.is_empty() {
            return 0.0;
        }
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for &v in s {
            *counts.entry(self.module[v].as_str()).or_default() += 1;
        }
        let n = s.len() as f64;
        n.ln()
            - counts
                .values()
                .map(|&c| c as f64 * (c as f64).ln())
                .sum::<f64>()
                / n
    }
}

/// Random subset with a random size, including the empty and full sets.
pub fn random_subset(rng: &mut impl Rng, n: usize) -> BTreeSet<usize> {
    let p = rng.gen_range(0.0..=1.0);
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}
