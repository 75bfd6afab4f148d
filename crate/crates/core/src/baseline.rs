//! The 25-column baseline catalog: demographics, performance counters and
//! trajectory descriptors, computed from programme terms 1..=ref_term.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::CurriculumGraph;
use crate::panel::{Outcome, StudentHistory, StudentSemesterPanel};

pub const BASELINE_FEATURE_NAMES: [&str; 25] = [
    "BASE_direct_pass_ratio_promotable",
    "BASE_direct_pass_ratio_all",
    "BASE_num_direct_passes",
    "BASE_cohort_year",
    "BASE_regularized_ratio",
    "BASE_gpa",
    "BASE_hs_graduation_year",
    "BASE_hs_graduation_year_var",
    "BASE_exam_pass_rate",
    "BASE_approved_activities_ratio",
    "BASE_num_regularized",
    "BASE_subject_pass_rate",
    "BASE_num_passed_subjects",
    "BASE_promoted_exams_ratio",
    "BASE_num_exams",
    "BASE_total_courses_taken",
    "BASE_retaken_ratio",
    "BASE_approved_activities",
    "BASE_num_retaken",
    "BASE_num_libre",
    "BASE_plumbing_gender",
    "BASE_plumbing_age_at_entry",
    "BASE_plumbing_inactive_terms",
    "BASE_plumbing_mean_courses_per_active_term",
    "BASE_plumbing_terms_with_pass",
];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BaselineFeatureVector {
    pub direct_pass_ratio_promotable: f64,
    pub direct_pass_ratio_all: f64,
    pub num_direct_passes: f64,
    pub cohort_year: f64,
    pub regularized_ratio: f64,
    pub gpa: f64,
    pub hs_graduation_year: f64,
    /// Years between secondary-school completion and programme entry.
    pub hs_years_elapsed: f64,
    pub exam_pass_rate: f64,
    pub approved_activities_ratio: f64,
    pub num_regularized: f64,
    pub subject_pass_rate: f64,
    pub num_passed_subjects: f64,
    pub promoted_exams_ratio: f64,
    pub num_exams: f64,
    pub total_courses_taken: f64,
    pub retaken_ratio: f64,
    pub approved_activities: f64,
    pub num_retaken: f64,
    pub num_libre: f64,
    pub gender: f64,
    pub age_at_entry: f64,
    pub inactive_terms: f64,
    pub mean_courses_per_active_term: f64,
    pub terms_with_pass: f64,
}

impl BaselineFeatureVector {
    pub fn to_array(&self) -> [f64; 25] {
        [
            self.direct_pass_ratio_promotable,
            self.direct_pass_ratio_all,
            self.num_direct_passes,
            self.cohort_year,
            self.regularized_ratio,
            self.gpa,
            self.hs_graduation_year,
            self.hs_years_elapsed,
            self.exam_pass_rate,
            self.approved_activities_ratio,
            self.num_regularized,
            self.subject_pass_rate,
            self.num_passed_subjects,
            self.promoted_exams_ratio,
            self.num_exams,
            self.total_courses_taken,
            self.retaken_ratio,
            self.approved_activities,
            self.num_retaken,
            self.num_libre,
            self.gender,
            self.age_at_entry,
            self.inactive_terms,
            self.mean_courses_per_active_term,
            self.terms_with_pass,
        ]
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_baseline(
    panel: &StudentSemesterPanel,
    graph: &CurriculumGraph,
    student_id: &str,
    ref_term: usize,
) -> Result<BaselineFeatureVector> {
    let history = panel.student(student_id)?;
    Ok(baseline_from_history(history, graph, ref_term))
}

/// Reads only `history.rows[..ref_term]` and the static profile.
pub fn baseline_from_history(
    history: &StudentHistory,
    graph: &CurriculumGraph,
    ref_term: usize,
) -> BaselineFeatureVector {
    let rows = &history.rows[..ref_term.min(history.rows.len())];

    let mut enrolments = 0usize;
    let mut enrolments_promotable = 0usize;
    let mut promoted = 0usize;
    let mut promoted_promotable = 0usize;
    let mut regularized = 0usize;
    let mut libre = 0usize;
    let mut exams = 0usize;
    let mut exams_passed = 0usize;
    let mut retaken = 0usize;
    let mut grade_sum = 0.0;
    let mut grade_count = 0usize;
    let mut attempted: BTreeSet<usize> = BTreeSet::new();
    let mut taken_before: BTreeSet<usize> = BTreeSet::new();
    let mut active_terms = 0usize;
    let mut terms_with_pass = 0usize;

    for row in rows {
        if row.is_active() {
            active_terms += 1;
        }
        if row.events.iter().any(|e| e.outcome.is_pass()) {
            terms_with_pass += 1;
        }
        let mut taken_now = Vec::new();
        for e in &row.events {
            attempted.insert(e.course);
            if let Some(g) = e.grade {
                grade_sum += g;
                grade_count += 1;
            }
            if e.outcome.is_exam() {
                exams += 1;
                exams_passed += usize::from(e.outcome == Outcome::PassedExam);
                continue;
            }
            enrolments += 1;
            let promotable = graph.course(e.course).promotable;
            enrolments_promotable += usize::from(promotable);
            if taken_before.contains(&e.course) {
                retaken += 1;
            }
            taken_now.push(e.course);
            match e.outcome {
                Outcome::Promoted => {
                    promoted += 1;
                    promoted_promotable += usize::from(promotable);
                }
                Outcome::Regularized => regularized += 1,
                Outcome::Libre => libre += 1,
                _ => {}
            }
        }
        taken_before.extend(taken_now);
    }

    let passed_subjects = rows.last().map_or(0, |r| r.approved.len());
    let approved_activities = promoted + exams_passed;
    let profile = &history.profile;
    let gender = match profile.gender.trim().to_ascii_lowercase().as_str() {
        "f" | "female" | "mujer" => 1.0,
        _ => 0.0,
    };

    BaselineFeatureVector {
        direct_pass_ratio_promotable: ratio(promoted_promotable, enrolments_promotable),
        direct_pass_ratio_all: ratio(promoted, enrolments),
        num_direct_passes: promoted as f64,
        cohort_year: profile.cohort_year as f64,
        regularized_ratio: ratio(regularized, enrolments),
        gpa: if grade_count == 0 {
            0.0
        } else {
            grade_sum / grade_count as f64
        },
        hs_graduation_year: profile.hs_graduation_year as f64,
        hs_years_elapsed: (profile.cohort_year - profile.hs_graduation_year) as f64,
        exam_pass_rate: ratio(exams_passed, exams),
        approved_activities_ratio: ratio(approved_activities, enrolments + exams),
        num_regularized: regularized as f64,
        subject_pass_rate: ratio(passed_subjects, attempted.len()),
        num_passed_subjects: passed_subjects as f64,
        promoted_exams_ratio: ratio(promoted, promoted + exams),
        num_exams: exams as f64,
        total_courses_taken: enrolments as f64,
        retaken_ratio: ratio(retaken, enrolments),
        approved_activities: approved_activities as f64,
        num_retaken: retaken as f64,
        num_libre: libre as f64,
        gender,
        age_at_entry: profile.age_at_entry,
        inactive_terms: (ref_term.saturating_sub(active_terms)) as f64,
        mean_courses_per_active_term: ratio(enrolments, active_terms),
        terms_with_pass: terms_with_pass as f64,
    }
}

/// Errors when the student has no activity at or before `ref_term`.
pub fn check_has_history(history: &StudentHistory, ref_term: usize) -> Result<()> {
    if history.rows.iter().take(ref_term).any(|r| r.is_active()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "student `{}` has no records at or before term {ref_term}",
            history.student_id()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{CourseSpec, CurriculumDocument};
    use crate::panel::{build_panel, CalendarTerm, StudentProfile, TrajectoryRecord};

    fn flat(n: usize) -> CurriculumGraph {
        let doc = CurriculumDocument {
            courses: (0..n)
                .map(|i| CourseSpec::new(&format!("C{i}"), "m", 4))
                .collect(),
            prerequisites: vec![],
            unknown: Default::default(),
        };
        CurriculumGraph::from_document(&doc).unwrap()
    }

    fn profile() -> StudentProfile {
        StudentProfile {
            student_id: "s".into(),
            cohort_year: 2016,
            hs_graduation_year: 2013,
            age_at_entry: 19.5,
            gender: "F".into(),
            graduated: None,
        }
    }

    fn rec(
        t: usize,
        course: usize,
        outcome: Outcome,
        grade: Option<f64>,
        seq: u64,
    ) -> TrajectoryRecord {
        TrajectoryRecord {
            student_id: "s".into(),
            term: CalendarTerm::new(2016, 1).offset(t as i64 - 1),
            course_code: format!("C{course}"),
            outcome,
            grade,
            seq,
        }
    }

    #[test]
    fn counting_example() {
        let g = flat(4);
        let recs = vec![
            rec(1, 0, Outcome::Promoted, Some(7.0), 1),
            rec(1, 1, Outcome::Promoted, Some(9.0), 2),
            rec(1, 2, Outcome::Regularized, None, 3),
            rec(1, 3, Outcome::Libre, None, 4),
        ];
        let panel = build_panel(&recs, &[profile()], &g).unwrap();
        let f = compute_baseline(&panel, &g, "s", 5).unwrap();
        assert_eq!(f.num_direct_passes, 2.0);
        assert_eq!(f.subject_pass_rate, 0.5);
        assert_eq!(f.regularized_ratio, 0.25);
        assert_eq!(f.num_libre, 1.0);
        assert_eq!(f.exam_pass_rate, 0.0);
        assert_eq!(f.num_exams, 0.0);
        assert_eq!(f.gpa, 8.0);
        assert_eq!(f.total_courses_taken, 4.0);
        assert_eq!(f.hs_years_elapsed, 3.0);
        assert_eq!(f.gender, 1.0);
        assert_eq!(f.inactive_terms, 4.0);
        assert_eq!(f.mean_courses_per_active_term, 4.0);
        assert_eq!(f.terms_with_pass, 1.0);
        assert!(compute_baseline(&panel, &g, "nobody", 5).is_err());
    }

    #[test]
    fn exams_retakes_and_cutoff() {
        let g = flat(2);
        let recs = vec![
            rec(1, 0, Outcome::Regularized, None, 1),
            rec(2, 0, Outcome::FailedExam, Some(2.0), 2),
            rec(3, 0, Outcome::PassedExam, Some(6.0), 3),
            rec(1, 1, Outcome::Libre, None, 4),
            rec(2, 1, Outcome::Promoted, Some(8.0), 5),
            rec(6, 1, Outcome::EnrolledOnly, None, 6),
        ];
        let panel = build_panel(&recs, &[profile()], &g).unwrap();
        let f = compute_baseline(&panel, &g, "s", 5).unwrap();
        assert_eq!(f.num_exams, 2.0);
        assert_eq!(f.exam_pass_rate, 0.5);
        assert_eq!(f.num_retaken, 1.0);
        assert_eq!(f.total_courses_taken, 3.0);
        assert_eq!(f.retaken_ratio, 1.0 / 3.0);
        assert_eq!(f.gpa, (2.0 + 6.0 + 8.0) / 3.0);
        assert_eq!(f.approved_activities, 2.0);
        assert_eq!(f.approved_activities_ratio, 2.0 / 5.0);
        assert_eq!(f.promoted_exams_ratio, 1.0 / 3.0);
        assert_eq!(f.num_passed_subjects, 2.0);
        assert_eq!(f.inactive_terms, 2.0);
        for (name, v) in BASELINE_FEATURE_NAMES.iter().zip(f.to_array()) {
            if name.contains("ratio") || name.contains("rate") {
                assert!((0.0..=1.0).contains(&v), "{name} = {v}");
            }
        }
    }
}
