//! Synthetic curricula and cohorts with a tunable link between blocked
//! credits and dropout, so the pipeline can run without institutional data.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{
    assemble_features, run_comparison, ComparisonReport, ExperimentConfig, StageCounts,
    BASELINE_MODEL, STRUCTURAL_MODEL,
};
use crate::graph::{CourseSpec, CurriculumDocument, CurriculumGraph, PrerequisiteSpec};
use crate::panel::{CalendarTerm, ObservationWindow, Outcome, StudentProfile, TrajectoryRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n_courses: usize,
    pub n_modules: usize,
    /// Semester layers including the entry layer; 0 picks ceil(sqrt(n)) + 1.
    pub n_layers: usize,
    /// Probability of each optional prerequisite edge between adjacent layers.
    pub edge_density: f64,
    pub promotable_fraction: f64,
    pub n_students: usize,
    pub n_cohorts: usize,
    pub first_cohort_year: i32,
    pub terms_horizon: usize,
    pub base_pass_probability: f64,
    /// Half-width of the uniform per-student shift of the pass probability.
    pub ability_spread: f64,
    pub dropout_base_hazard: f64,
    /// Hazard multiplier per blocked credit.
    pub blocked_credits_hazard_coefficient: f64,
    pub courses_per_term_mean: f64,
    /// Enrol in the shallowest available courses first instead of a
    /// uniformly random choice.
    pub earliest_first: bool,
    /// Chance that a continuing student sits out a term.
    pub gap_probability: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            n_courses: 20,
            n_modules: 3,
            n_layers: 3,
            edge_density: 0.1,
            promotable_fraction: 0.5,
            n_students: 800,
            n_cohorts: 2,
            first_cohort_year: 2016,
            terms_horizon: 12,
            base_pass_probability: 0.7,
            ability_spread: 0.15,
            dropout_base_hazard: 0.025,
            blocked_credits_hazard_coefficient: 0.1,
            courses_per_term_mean: 4.0,
            earliest_first: true,
            gap_probability: 0.0,
            seed: 7,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let probabilities = [
            ("edge_density", self.edge_density),
            ("promotable_fraction", self.promotable_fraction),
            ("base_pass_probability", self.base_pass_probability),
            ("dropout_base_hazard", self.dropout_base_hazard),
            ("gap_probability", self.gap_probability),
            ("ability_spread", self.ability_spread),
        ];
        for (name, p) in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {p} is not in [0, 1]"
                )));
            }
        }
        if self.blocked_credits_hazard_coefficient.is_nan()
            || self.blocked_credits_hazard_coefficient < 0.0
        {
            return Err(Error::InvalidArgument(
                "hazard coefficient must be >= 0".into(),
            ));
        }
        if self.n_courses < 3 {
            return Err(Error::InvalidArgument(format!(
                "n_courses must be >= 3, got {}",
                self.n_courses
            )));
        }
        if self.n_modules == 0 || self.n_cohorts == 0 || self.terms_horizon == 0 {
            return Err(Error::InvalidArgument(
                "n_modules, n_cohorts and terms_horizon must be >= 1".into(),
            ));
        }
        if self.courses_per_term_mean.is_nan() || self.courses_per_term_mean < 1.0 {
            return Err(Error::InvalidArgument(
                "courses_per_term_mean must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

const MAX_ATTEMPTS: usize = 100;

fn course_code(i: usize, n: usize) -> String {
    let width = n.to_string().len().max(2);
    format!("C{:0width$}", i + 1)
}

/// Layer sizes: one entry course, the rest spread evenly, earlier layers
/// taking the remainder.
fn layer_sizes(n: usize, requested: usize) -> Vec<usize> {
    let auto = (n as f64).sqrt().ceil() as usize + 1;
    let layers = n.min(3.max(if requested == 0 { auto } else { requested }));
    let rest = n - 1;
    let inner = layers - 1;
    let mut sizes = vec![1];
    sizes.extend((0..inner).map(|l| rest / inner + usize::from(l < rest % inner)));
    sizes
}

/// Layered random DAG. Every non-entry course has a prerequisite in the
/// previous layer; further edges from the two preceding layers are added
/// with probability `edge_density`, then transitive shortcuts are removed.
pub fn generate_curriculum(params: &SynthParams) -> Result<CurriculumDocument> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut last = String::new();
    for _ in 0..MAX_ATTEMPTS {
        let doc = draw_curriculum(params, &mut rng);
        match CurriculumGraph::from_document(&doc) {
            Ok(_) => return Ok(doc),
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::SynthFailed {
        attempts: MAX_ATTEMPTS,
        last,
    })
}

fn draw_curriculum(params: &SynthParams, rng: &mut ChaCha8Rng) -> CurriculumDocument {
    let n = params.n_courses;
    let sizes = layer_sizes(n, params.n_layers);
    let mut layers: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    for &s in &sizes {
        layers.push((next..next + s).collect());
        next += s;
    }
    let n_layers = layers.len();
    let mut courses = Vec::with_capacity(n);
    for (l, layer) in layers.iter().enumerate() {
        let module = format!("M{}", l * params.n_modules / n_layers + 1);
        for &i in layer {
            let mut spec = CourseSpec::new(&course_code(i, n), &module, rng.gen_range(3..=8));
            spec.name = format!("Course {}", i + 1);
            spec.promotable = rng.gen_bool(params.promotable_fraction);
            courses.push(spec);
        }
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for l in 1..n_layers {
        for &v in &layers[l] {
            edges.insert((*layers[l - 1].choose(rng).expect("non-empty layer"), v));
            for back in 1..=2.min(l) {
                for &u in &layers[l - back] {
                    if rng.gen_bool(params.edge_density / back as f64) {
                        edges.insert((u, v));
                    }
                }
            }
        }
    }
    let mut doc = CurriculumDocument {
        courses,
        prerequisites: edges
            .iter()
            .map(|&(u, v)| PrerequisiteSpec::new(&course_code(u, n), &course_code(v, n)))
            .collect(),
        unknown: Default::default(),
    };
    if let Ok(graph) = CurriculumGraph::assemble(&doc) {
        let redundant: BTreeSet<(String, String)> =
            graph.transitive_redundancy().into_iter().collect();
        doc.prerequisites
            .retain(|p| !redundant.contains(&(p.from.clone(), p.to.clone())));
    }
    doc
}

/// Records and profiles for one synthetic cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub records: Vec<TrajectoryRecord>,
    pub profiles: Vec<StudentProfile>,
}

const MAX_EXAM_ATTEMPTS: usize = 3;

/// Simulate students term by term. From the second term on, a student
/// leaves with probability `base · (1 + coefficient · blocked credits)`,
/// evaluated on the courses approved so far. Students who pass every course
/// graduate.
pub fn generate_cohort(graph: &CurriculumGraph, params: &SynthParams) -> Result<Cohort> {
    params.validate()?;
    let width = params.n_students.to_string().len().max(4);
    let depth = course_depths(graph);
    let students: Vec<(Vec<TrajectoryRecord>, StudentProfile)> = (0..params.n_students)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(i as u64 + 1);
            simulate_student(
                graph,
                &depth,
                params,
                &format!("S{:0width$}", i + 1),
                i,
                &mut rng,
            )
        })
        .collect();
    let mut records = Vec::new();
    let mut profiles = Vec::with_capacity(students.len());
    for (r, p) in students {
        records.extend(r);
        profiles.push(p);
    }
    for (seq, r) in records.iter_mut().enumerate() {
        r.seq = seq as u64 + 1;
    }
    Ok(Cohort { records, profiles })
}

/// Longest prerequisite chain ending at each course.
fn course_depths(graph: &CurriculumGraph) -> Vec<usize> {
    let mut depth = vec![0usize; graph.len()];
    for &v in graph.topological_order() {
        for &w in graph.successors(v) {
            depth[w] = depth[w].max(depth[v] + 1);
        }
    }
    depth
}

fn blocked_credits(graph: &CurriculumGraph, approved: &[bool]) -> f64 {
    (0..graph.len())
        .filter(|&c| !approved[c] && graph.predecessors(c).iter().any(|&p| !approved[p]))
        .map(|c| graph.course(c).credits.to_f64())
        .sum()
}

fn simulate_student(
    graph: &CurriculumGraph,
    depth: &[usize],
    params: &SynthParams,
    id: &str,
    index: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<TrajectoryRecord>, StudentProfile) {
    let cohort_year = params.first_cohort_year + (index % params.n_cohorts) as i32;
    let hs_gap = [0, 0, 0, 1, 1, 2, 3][rng.gen_range(0..7)];
    let age_at_entry = ((17.5 + hs_gap as f64 + rng.gen_range(0.0..1.0)) * 10.0).round() / 10.0;
    let gender = if rng.gen_bool(0.5) { "F" } else { "M" };
    let ability = rng.gen_range(-params.ability_spread..=params.ability_spread);
    let p_pass = (params.base_pass_probability + ability).clamp(0.0, 1.0);

    let n = graph.len();
    let entry = CalendarTerm::new(cohort_year, 1);
    let mut approved = vec![false; n];
    let mut n_approved = 0usize;
    // course -> failed exam attempts since regularising
    let mut pending: BTreeMap<usize, usize> = BTreeMap::new();
    let mut records = Vec::new();
    let mut graduated = false;
    let mut push = |term: CalendarTerm, course: usize, outcome: Outcome, grade: Option<f64>| {
        records.push(TrajectoryRecord {
            student_id: id.to_string(),
            term,
            course_code: graph.code(course).to_string(),
            outcome,
            grade,
            seq: 0,
        });
    };

    for t in 1..=params.terms_horizon {
        let term = entry.offset(t as i64 - 1);
        if t > 1 {
            let hazard = params.dropout_base_hazard
                * (1.0
                    + params.blocked_credits_hazard_coefficient
                        * blocked_credits(graph, &approved));
            if rng.gen_bool(hazard.min(1.0)) {
                break;
            }
            if rng.gen_bool(params.gap_probability) {
                continue;
            }
        }
        let start: Vec<bool> = approved.clone();
        let mut passed_now = Vec::new();
        let examined: Vec<usize> = pending.keys().copied().collect();

        for (&course, attempts) in pending.iter_mut() {
            if rng.gen_bool(p_pass) {
                push(
                    term,
                    course,
                    Outcome::PassedExam,
                    Some(rng.gen_range(4..=10) as f64),
                );
                passed_now.push(course);
            } else {
                push(
                    term,
                    course,
                    Outcome::FailedExam,
                    Some(rng.gen_range(1..=3) as f64),
                );
                *attempts += 1;
            }
        }
        pending.retain(|c, a| !passed_now.contains(c) && *a < MAX_EXAM_ATTEMPTS);

        let mut available: Vec<usize> = (0..n)
            .filter(|&c| {
                !start[c]
                    && !pending.contains_key(&c)
                    && !examined.contains(&c)
                    && graph.predecessors(c).iter().all(|&p| start[p])
            })
            .collect();
        available.shuffle(rng);
        if params.earliest_first {
            // stable sort keeps the shuffle as tie-break within a depth
            available.sort_by_key(|&c| depth[c]);
        }
        let mean = params.courses_per_term_mean;
        let load = (mean.floor() as usize + usize::from(rng.gen_bool(mean.fract()))).max(1);
        for &course in available.iter().take(load) {
            if rng.gen_bool(p_pass) {
                if graph.course(course).promotable {
                    push(
                        term,
                        course,
                        Outcome::Promoted,
                        Some(rng.gen_range(7..=10) as f64),
                    );
                    passed_now.push(course);
                } else {
                    push(term, course, Outcome::Regularized, None);
                    pending.insert(course, 0);
                }
            } else if rng.gen_bool(0.5) {
                push(term, course, Outcome::Libre, None);
            } else {
                push(term, course, Outcome::EnrolledOnly, None);
            }
        }
        for c in passed_now {
            approved[c] = true;
            n_approved += 1;
        }
        if n_approved == n {
            graduated = true;
            break;
        }
    }

    let profile = StudentProfile {
        student_id: id.to_string(),
        cohort_year,
        hs_graduation_year: cohort_year - hs_gap,
        age_at_entry,
        gender: gender.to_string(),
        graduated: Some(graduated),
    };
    (records, profile)
}

/// One synthetic end-to-end run: curriculum, cohort, features and the
/// two-configuration comparison, all keyed by `params.seed`.
#[derive(Debug, Clone)]
pub struct SyntheticRun {
    pub comparison: ComparisonReport,
    pub counts: StageCounts,
}

impl SyntheticRun {
    /// AUC(baseline+struct) − AUC(baseline).
    pub fn auc_gain(&self) -> f64 {
        let auc = |m| self.comparison.row(m).map_or(f64::NAN, |r| r.auc);
        auc(STRUCTURAL_MODEL) - auc(BASELINE_MODEL)
    }
}

/// The forest and split use `params.seed` as well, so a single number
/// identifies the whole run.
pub fn run_synthetic_comparison(
    params: &SynthParams,
    config: &ExperimentConfig,
) -> Result<SyntheticRun> {
    let doc = generate_curriculum(params)?;
    let graph = CurriculumGraph::from_document(&doc)?;
    let cohort = generate_cohort(&graph, params)?;
    let config = config.with_seed(params.seed);
    let (matrix, counts) = assemble_features(
        &graph,
        &cohort.records,
        &cohort.profiles,
        &config,
        &ObservationWindow::default(),
        false,
    )?;
    let comparison = run_comparison(&matrix, &config)?;
    Ok(SyntheticRun { comparison, counts })
}
