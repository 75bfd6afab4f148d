//! Curriculum prerequisite graph: parsing, validation and indexing.
//!
//! Courses are stored sorted by code, so a course's index doubles as its
//! lexicographic rank. Every tie-break in the crate that says "by code" is a
//! tie-break by index.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use log::warn;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ReachDirection, Result};

/// Exact, positive credit value. Some plans award half credits, so this is
/// a rational rather than an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Credits(pub Ratio<i64>);

impl Credits {
    pub fn from_integer(value: i64) -> Self {
        Credits(Ratio::from_integer(value))
    }

    pub fn zero() -> Self {
        Credits(Ratio::zero())
    }

    pub fn to_f64(self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_positive(self) -> bool {
        self.0 > Ratio::zero()
    }
}

impl std::ops::Add for Credits {
    type Output = Credits;
    fn add(self, rhs: Credits) -> Credits {
        Credits(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Credits {
    fn add_assign(&mut self, rhs: Credits) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for Credits {
    fn sum<I: Iterator<Item = Credits>>(iter: I) -> Credits {
        iter.fold(Credits::zero(), |acc, c| acc + c)
    }
}

impl fmt::Display for Credits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Credits {
    type Err = String;

    /// Accepts integers, finite decimals (`4.5`) and fractions (`9/2`).
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let bad = || format!("invalid credit value `{s}`");
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            return Ok(Credits(Ratio::new(n, d)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_part: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let denom = 10i64.pow(frac.len() as u32);
            let frac_part: i64 = frac.parse().map_err(|_| bad())?;
            let numer = int_part.abs() * denom + frac_part;
            let numer = if negative { -numer } else { numer };
            return Ok(Credits(Ratio::new(numer, denom)));
        }
        s.parse::<i64>()
            .map(Credits::from_integer)
            .map_err(|_| bad())
    }
}

impl Serialize for Credits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            serializer.serialize_i64(*self.0.numer())
        } else {
            serializer.serialize_str(&self.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for Credits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        let text = match &value {
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::String(s) => s.clone(),
            other => {
                return Err(serde::de::Error::custom(format!(
                    "credits must be a number or fraction string, got {other}"
                )))
            }
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn default_true() -> bool {
    true
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn is_true(b: &bool) -> bool {
    *b
}

/// One entry of the `courses` array of a curriculum file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CourseSpec {
    pub code: String,
    #[serde(default)]
    pub name: String,
    pub module: String,
    pub credits: Credits,
    #[serde(default, skip_serializing_if = "is_false")]
    pub entry: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub capstone: bool,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub promotable: bool,
    #[serde(flatten, skip_serializing)]
    pub unknown: BTreeMap<String, serde_json::Value>,
}

impl CourseSpec {
    pub fn new(code: &str, module: &str, credits: i64) -> Self {
        CourseSpec {
            code: code.to_string(),
            name: code.to_string(),
            module: module.to_string(),
            credits: Credits::from_integer(credits),
            entry: false,
            capstone: false,
            promotable: true,
            unknown: BTreeMap::new(),
        }
    }

    pub fn entry(mut self) -> Self {
        self.entry = true;
        self
    }

    pub fn capstone(mut self) -> Self {
        self.capstone = true;
        self
    }
}

/// One entry of the `prerequisites` array: `from` must be passed before `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrerequisiteSpec {
    pub from: String,
    pub to: String,
    #[serde(flatten, skip_serializing)]
    pub unknown: BTreeMap<String, serde_json::Value>,
}

impl PrerequisiteSpec {
    pub fn new(from: &str, to: &str) -> Self {
        PrerequisiteSpec {
            from: from.to_string(),
            to: to.to_string(),
            unknown: BTreeMap::new(),
        }
    }
}

/// The on-disk curriculum document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CurriculumDocument {
    pub courses: Vec<CourseSpec>,
    #[serde(default)]
    pub prerequisites: Vec<PrerequisiteSpec>,
    #[serde(flatten, skip_serializing)]
    pub unknown: BTreeMap<String, serde_json::Value>,
}

impl CurriculumDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CurriculumDocument =
            serde_json::from_str(text).map_err(|e| Error::MalformedCurriculum(e.to_string()))?;
        doc.warn_unknown_fields();
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("curriculum serialises");
        text.push('\n');
        text
    }

    fn warn_unknown_fields(&self) {
        for key in self.unknown.keys() {
            warn!("curriculum: ignoring unknown top-level field `{key}`");
        }
        for c in &self.courses {
            for key in c.unknown.keys() {
                warn!(
                    "curriculum: course `{}`: ignoring unknown field `{key}`",
                    c.code
                );
            }
        }
        for p in &self.prerequisites {
            for key in p.unknown.keys() {
                warn!(
                    "curriculum: prerequisite {} -> {}: ignoring unknown field `{key}`",
                    p.from, p.to
                );
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Course {
    pub code: String,
    pub name: String,
    pub module: String,
    pub credits: Credits,
    pub is_entry: bool,
    pub is_capstone: bool,
    pub promotable: bool,
}

/// A set of courses identified by graph index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CourseSet(BTreeSet<usize>);

impl CourseSet {
    pub fn new() -> Self {
        CourseSet(BTreeSet::new())
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.contains(&idx)
    }

    pub fn insert(&mut self, idx: usize) -> bool {
        self.0.insert(idx)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &CourseSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.iter().next_back().copied()
    }
}

impl FromIterator<usize> for CourseSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        CourseSet(iter.into_iter().collect())
    }
}

impl Extend<usize> for CourseSet {
    fn extend<T: IntoIterator<Item = usize>>(&mut self, iter: T) {
        self.0.extend(iter)
    }
}

/// Immutable, validated prerequisite DAG.
#[derive(Debug, Clone)]
pub struct CurriculumGraph {
    courses: Vec<Course>,
    index: HashMap<String, usize>,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    edge_count: usize,
    topo_order: Vec<usize>,
    entries: Vec<usize>,
    terminals: Vec<usize>,
}

/// Per-course reachability diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReachFlags {
    pub reachable_from_entry: bool,
    pub coreachable_to_terminal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityReport {
    /// Indexed like the graph's courses.
    pub flags: Vec<ReachFlags>,
}

impl ReachabilityReport {
    /// Codes of courses failing either check, in code order.
    pub fn violators<'g>(&self, graph: &'g CurriculumGraph) -> Vec<&'g str> {
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, f)| !(f.reachable_from_entry && f.coreachable_to_terminal))
            .map(|(i, _)| graph.code(i))
            .collect()
    }

    pub fn is_clean(&self) -> bool {
        self.flags
            .iter()
            .all(|f| f.reachable_from_entry && f.coreachable_to_terminal)
    }
}

/// Parse and fully validate a curriculum document given as JSON text.
pub fn parse_curriculum(source: &str) -> Result<CurriculumGraph> {
    let doc = CurriculumDocument::from_json(source)?;
    CurriculumGraph::from_document(&doc)
}

impl CurriculumGraph {
    /// Structural checks, acyclicity and reachability.
    pub fn from_document(doc: &CurriculumDocument) -> Result<Self> {
        let graph = Self::assemble(doc)?;
        graph.check_reachability()?;
        Ok(graph)
    }

    /// Structural checks and acyclicity only. Reachability is left to the
    /// caller; see [`CurriculumGraph::reachability_report`].
    pub fn assemble(doc: &CurriculumDocument) -> Result<Self> {
        let mut specs: Vec<&CourseSpec> = doc.courses.iter().collect();
        specs.sort_by(|a, b| a.code.cmp(&b.code));

        let mut index = HashMap::with_capacity(specs.len());
        let mut courses = Vec::with_capacity(specs.len());
        for (i, spec) in specs.iter().enumerate() {
            if spec.code.is_empty() {
                return Err(Error::EmptyCourseCode);
            }
            if spec.module.trim().is_empty() {
                return Err(Error::EmptyModule(spec.code.clone()));
            }
            if !spec.credits.is_positive() {
                return Err(Error::NonPositiveCredits {
                    code: spec.code.clone(),
                    credits: spec.credits.to_string(),
                });
            }
            if index.insert(spec.code.clone(), i).is_some() {
                return Err(Error::DuplicateCourse(spec.code.clone()));
            }
            courses.push(Course {
                code: spec.code.clone(),
                name: spec.name.clone(),
                module: spec.module.clone(),
                credits: spec.credits,
                is_entry: spec.entry,
                is_capstone: spec.capstone,
                promotable: spec.promotable,
            });
        }

        let n = courses.len();
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for edge in &doc.prerequisites {
            let lookup = |code: &str| {
                index
                    .get(code)
                    .copied()
                    .ok_or_else(|| Error::UnknownCourse {
                        from: edge.from.clone(),
                        to: edge.to.clone(),
                        unknown: code.to_string(),
                    })
            };
            let from = lookup(&edge.from)?;
            let to = lookup(&edge.to)?;
            if from == to {
                return Err(Error::SelfLoop(edge.from.clone()));
            }
            if !seen.insert((from, to)) {
                return Err(Error::DuplicateEdge {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                });
            }
            successors[from].push(to);
            predecessors[to].push(from);
        }
        for list in successors.iter_mut().chain(predecessors.iter_mut()) {
            list.sort_unstable();
        }

        let mut graph = CurriculumGraph {
            courses,
            index,
            successors,
            predecessors,
            edge_count: seen.len(),
            topo_order: Vec::new(),
            entries: Vec::new(),
            terminals: Vec::new(),
        };
        graph.topo_order = graph.validate_dag()?;

        let flagged_entries: Vec<usize> = (0..n).filter(|&i| graph.courses[i].is_entry).collect();
        graph.entries = if flagged_entries.is_empty() {
            (0..n)
                .filter(|&i| graph.predecessors[i].is_empty())
                .collect()
        } else {
            flagged_entries
        };
        let flagged_terminals: Vec<usize> =
            (0..n).filter(|&i| graph.courses[i].is_capstone).collect();
        graph.terminals = if flagged_terminals.is_empty() {
            (0..n).filter(|&i| graph.successors[i].is_empty()).collect()
        } else {
            flagged_terminals
        };
        Ok(graph)
    }

    /// Kahn's algorithm with a min-heap, so ties resolve by course code.
    pub fn validate_dag(&self) -> Result<Vec<usize>> {
        let n = self.courses.len();
        let mut indegree: Vec<usize> = self.predecessors.iter().map(Vec::len).collect();
        let mut heap: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = heap.pop() {
            order.push(v);
            for &w in &self.successors[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    heap.push(Reverse(w));
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        Err(Error::Cycle {
            witness: self.cycle_witness(&indegree),
        })
    }

    /// Every course left with positive in-degree after Kahn has a remaining
    /// predecessor, so walking predecessors must eventually revisit a node.
    fn cycle_witness(&self, indegree: &[usize]) -> Vec<String> {
        let start = (0..self.courses.len())
            .find(|&i| indegree[i] > 0)
            .expect("a cycle leaves nodes behind");
        let mut walk = vec![start];
        let mut position = HashMap::from([(start, 0usize)]);
        let mut current = start;
        loop {
            let prev = *self.predecessors[current]
                .iter()
                .find(|&&p| indegree[p] > 0)
                .expect("remaining node has a remaining predecessor");
            if let Some(&pos) = position.get(&prev) {
                // walk[pos..] followed backwards is the cycle
                let mut cycle: Vec<usize> = walk[pos..].to_vec();
                cycle.reverse();
                let min_at = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &v)| v)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                cycle.rotate_left(min_at);
                cycle.push(cycle[0]);
                return cycle
                    .into_iter()
                    .map(|i| self.courses[i].code.clone())
                    .collect();
            }
            position.insert(prev, walk.len());
            walk.push(prev);
            current = prev;
        }
    }

    pub fn reachability_report(&self) -> ReachabilityReport {
        let forward = self.bfs_mark(&self.entries, &self.successors);
        let backward = self.bfs_mark(&self.terminals, &self.predecessors);
        ReachabilityReport {
            flags: forward
                .into_iter()
                .zip(backward)
                .map(|(f, b)| ReachFlags {
                    reachable_from_entry: f,
                    coreachable_to_terminal: b,
                })
                .collect(),
        }
    }

    fn bfs_mark(&self, seeds: &[usize], adjacency: &[Vec<usize>]) -> Vec<bool> {
        let mut mark = vec![false; self.courses.len()];
        let mut queue: VecDeque<usize> = seeds.iter().copied().collect();
        for &s in seeds {
            mark[s] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if !mark[w] {
                    mark[w] = true;
                    queue.push_back(w);
                }
            }
        }
        mark
    }

    pub fn check_reachability(&self) -> Result<()> {
        let report = self.reachability_report();
        for (i, flags) in report.flags.iter().enumerate() {
            if !flags.reachable_from_entry {
                return Err(Error::Unreachable {
                    code: self.courses[i].code.clone(),
                    direction: ReachDirection::FromEntry,
                });
            }
            if !flags.coreachable_to_terminal {
                return Err(Error::Unreachable {
                    code: self.courses[i].code.clone(),
                    direction: ReachDirection::ToTerminal,
                });
            }
        }
        Ok(())
    }

    /// Edges `(from, to)` also implied by a longer path `from ⇝ to`, as code
    /// pairs in code order.
    pub fn transitive_redundancy(&self) -> Vec<(String, String)> {
        let reach = self.reachability_sets();
        let mut out = Vec::new();
        for from in 0..self.courses.len() {
            for &to in &self.successors[from] {
                let implied = self.successors[from]
                    .iter()
                    .any(|&k| k != to && reach[k].contains(&to));
                if implied {
                    out.push((
                        self.courses[from].code.clone(),
                        self.courses[to].code.clone(),
                    ));
                }
            }
        }
        out
    }

    /// Strict descendants of each course.
    pub fn reachability_sets(&self) -> Vec<BTreeSet<usize>> {
        let mut reach: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.courses.len()];
        for &v in self.topo_order.iter().rev() {
            let mut set = BTreeSet::new();
            for &w in &self.successors[v] {
                set.insert(w);
                set.extend(reach[w].iter().copied());
            }
            reach[v] = set;
        }
        reach
    }

    pub fn to_document(&self) -> CurriculumDocument {
        let courses = self
            .courses
            .iter()
            .map(|c| CourseSpec {
                code: c.code.clone(),
                name: c.name.clone(),
                module: c.module.clone(),
                credits: c.credits,
                entry: c.is_entry,
                capstone: c.is_capstone,
                promotable: c.promotable,
                unknown: BTreeMap::new(),
            })
            .collect();
        let prerequisites = self
            .edges()
            .map(|(f, t)| PrerequisiteSpec::new(&self.courses[f].code, &self.courses[t].code))
            .collect();
        CurriculumDocument {
            courses,
            prerequisites,
            unknown: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.courses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.courses.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn courses(&self) -> &[Course] {
        &self.courses
    }

    pub fn course(&self, idx: usize) -> &Course {
        &self.courses[idx]
    }

    pub fn code(&self, idx: usize) -> &str {
        &self.courses[idx].code
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.index.get(code).copied()
    }

    pub fn successors(&self, idx: usize) -> &[usize] {
        &self.successors[idx]
    }

    /// Direct prerequisites of a course.
    pub fn predecessors(&self, idx: usize) -> &[usize] {
        &self.predecessors[idx]
    }

    pub fn in_degree(&self, idx: usize) -> usize {
        self.predecessors[idx].len()
    }

    pub fn out_degree(&self, idx: usize) -> usize {
        self.successors[idx].len()
    }

    /// All edges in (from, to) index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(f, succ)| succ.iter().map(move |&t| (f, t)))
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn topological_codes(&self) -> Vec<&str> {
        self.topo_order.iter().map(|&i| self.code(i)).collect()
    }

    /// Flagged entry courses, or the in-degree-0 courses when none is flagged.
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Flagged capstones, or the out-degree-0 courses when none is flagged.
    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn course_set<S: AsRef<str>>(&self, codes: &[S]) -> Result<CourseSet> {
        codes
            .iter()
            .map(|c| {
                self.index_of(c.as_ref())
                    .ok_or_else(|| Error::UnknownCourseCode(c.as_ref().to_string()))
            })
            .collect()
    }

    pub fn set_codes(&self, set: &CourseSet) -> Vec<&str> {
        set.iter().map(|i| self.code(i)).collect()
    }

    pub fn all_courses(&self) -> CourseSet {
        (0..self.len()).collect()
    }

    /// Errors when the set refers to an index outside this graph.
    pub fn check_set(&self, set: &CourseSet) -> Result<()> {
        match set.max_index() {
            Some(i) if i >= self.len() => Err(Error::CourseIndexOutOfRange(i)),
            _ => Ok(()),
        }
    }

    /// Sorted distinct module labels.
    pub fn modules(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.courses.iter().map(|c| c.module.as_str()).collect();
        set.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn doc(courses: &[&str], edges: &[(&str, &str)]) -> CurriculumDocument {
        CurriculumDocument {
            courses: courses.iter().map(|c| CourseSpec::new(c, "m", 4)).collect(),
            prerequisites: edges
                .iter()
                .map(|(f, t)| PrerequisiteSpec::new(f, t))
                .collect(),
            unknown: BTreeMap::new(),
        }
    }

    #[test]
    fn chain_parses_in_order() {
        let json = r#"{
            "courses": [
                {"code": "A", "name": "Alpha", "module": "m", "credits": 4},
                {"code": "B", "name": "Beta", "module": "m", "credits": 5},
                {"code": "C", "name": "Gamma", "module": "m", "credits": 6}
            ],
            "prerequisites": [{"from": "A", "to": "B"}, {"from": "B", "to": "C"}]
        }"#;
        let g = parse_curriculum(json).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.topological_codes(), vec!["A", "B", "C"]);
        assert_eq!(g.course(2).credits, Credits::from_integer(6));
    }

    #[test]
    fn two_cycle_reports_witness() {
        let err = CurriculumGraph::from_document(&doc(&["A", "B"], &[("A", "B"), ("B", "A")]))
            .unwrap_err();
        match err {
            Error::Cycle { witness } => assert_eq!(witness, vec!["A", "B", "A"]),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn longer_cycle_witness_is_closed_and_follows_edges() {
        let edges = [("A", "B"), ("B", "C"), ("C", "D"), ("D", "B"), ("X", "A")];
        let err =
            CurriculumGraph::from_document(&doc(&["A", "B", "C", "D", "X"], &edges)).unwrap_err();
        let Error::Cycle { witness } = err else {
            panic!("expected cycle")
        };
        assert_eq!(witness, vec!["B", "C", "D", "B"]);
    }

    #[test]
    fn diamond_entries_and_sinks() {
        let g = CurriculumGraph::from_document(&doc(
            &["D", "C", "B", "A"],
            &[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")],
        ))
        .unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.entries(), &[0]);
        assert_eq!(g.terminals(), &[3]);
        assert_eq!(g.topological_codes(), vec!["A", "B", "C", "D"]);
    }

    #[test]
    fn single_node() {
        let g = CurriculumGraph::from_document(&doc(&["A"], &[])).unwrap();
        assert_eq!(g.topological_codes(), vec!["A"]);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            CurriculumGraph::from_document(&doc(&["A", "A"], &[])),
            Err(Error::DuplicateCourse(c)) if c == "A"
        ));
        assert!(matches!(
            CurriculumGraph::from_document(&doc(&["A"], &[("A", "Z")])),
            Err(Error::UnknownCourse { unknown, .. }) if unknown == "Z"
        ));
        assert!(matches!(
            CurriculumGraph::from_document(&doc(&["A"], &[("A", "A")])),
            Err(Error::SelfLoop(_))
        ));
        assert!(matches!(
            CurriculumGraph::from_document(&doc(&["A", "B"], &[("A", "B"), ("A", "B")])),
            Err(Error::DuplicateEdge { .. })
        ));
        let mut d = doc(&["A"], &[]);
        d.courses[0].credits = Credits::zero();
        assert!(matches!(
            CurriculumGraph::from_document(&d),
            Err(Error::NonPositiveCredits { .. })
        ));
        assert!(matches!(
            parse_curriculum("{\"courses\": 3}"),
            Err(Error::MalformedCurriculum(_))
        ));
    }

    #[test]
    fn unreachable_course_is_rejected_with_direction() {
        let mut d = doc(
            &["A", "B", "C", "D", "X"],
            &[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")],
        );
        d.courses[0].entry = true;
        d.courses[3].capstone = true;
        let err = CurriculumGraph::from_document(&d).unwrap_err();
        assert!(matches!(
            err,
            Error::Unreachable { ref code, direction: ReachDirection::FromEntry } if code == "X"
        ));

        let g = CurriculumGraph::assemble(&d).unwrap();
        let report = g.reachability_report();
        let x = g.index_of("X").unwrap();
        assert_eq!(
            report.flags[x],
            ReachFlags {
                reachable_from_entry: false,
                coreachable_to_terminal: false
            }
        );
        assert_eq!(report.violators(&g), vec!["X"]);
        for code in ["A", "B", "C", "D"] {
            let f = report.flags[g.index_of(code).unwrap()];
            assert!(f.reachable_from_entry && f.coreachable_to_terminal);
        }
    }

    #[test]
    fn extra_sink_is_coreachable_when_defaulted_or_flagged() {
        // A->B->C plus B->E: E is a default sink, and flagging it keeps it valid.
        let d = doc(&["A", "B", "C", "E"], &[("A", "B"), ("B", "C"), ("B", "E")]);
        let g = CurriculumGraph::from_document(&d).unwrap();
        assert!(g.reachability_report().is_clean());

        let mut flagged = d.clone();
        flagged.courses[2].capstone = true;
        flagged.courses[3].capstone = true;
        let g = CurriculumGraph::from_document(&flagged).unwrap();
        assert!(g.reachability_report().is_clean());

        // only C flagged: E cannot reach a terminal
        let mut only_c = d;
        only_c.courses[2].capstone = true;
        let err = CurriculumGraph::from_document(&only_c).unwrap_err();
        assert!(matches!(
            err,
            Error::Unreachable { ref code, direction: ReachDirection::ToTerminal } if code == "E"
        ));
    }

    #[test]
    fn transitive_redundancy_examples() {
        let g = CurriculumGraph::from_document(&doc(
            &["A", "B", "C"],
            &[("A", "B"), ("B", "C"), ("A", "C")],
        ))
        .unwrap();
        assert_eq!(g.transitive_redundancy(), vec![("A".into(), "C".into())]);

        let diamond = CurriculumGraph::from_document(&doc(
            &["A", "B", "C", "D"],
            &[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")],
        ))
        .unwrap();
        assert!(diamond.transitive_redundancy().is_empty());

        let chain =
            CurriculumGraph::from_document(&doc(&["A", "B", "C"], &[("A", "B"), ("B", "C")]))
                .unwrap();
        assert!(chain.transitive_redundancy().is_empty());
    }

    #[test]
    fn credits_parse_forms() {
        assert_eq!("4".parse::<Credits>().unwrap(), Credits::from_integer(4));
        assert_eq!("4.5".parse::<Credits>().unwrap(), Credits(Ratio::new(9, 2)));
        assert_eq!("9/2".parse::<Credits>().unwrap(), Credits(Ratio::new(9, 2)));
        assert!("x".parse::<Credits>().is_err());
        assert!("1/0".parse::<Credits>().is_err());
        let json =
            r#"{"courses":[{"code":"A","module":"m","credits":"7/2","colour":"red"}],"notes":1}"#;
        let g = parse_curriculum(json).unwrap();
        assert_eq!(g.course(0).credits.to_f64(), 3.5);
        assert!(g.course(0).promotable);
    }

    #[test]
    fn course_set_rejects_unknown_codes() {
        let g = CurriculumGraph::from_document(&doc(&["A", "B"], &[("A", "B")])).unwrap();
        assert!(g.course_set(&["A", "Q"]).is_err());
        let s = g.course_set(&["B"]).unwrap();
        assert_eq!(g.set_codes(&s), vec!["B"]);
        assert!(g.check_set(&CourseSet::from_iter([5])).is_err());
    }
}
