//! Student-semester panel: ingestion, deduplication, programme-term indexing
//! and labelled reference-term snapshots.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{CourseSet, CurriculumDocument, CurriculumGraph, PrerequisiteSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Promoted,
    Regularized,
    PassedExam,
    FailedExam,
    Libre,
    EnrolledOnly,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [
        Outcome::Promoted,
        Outcome::Regularized,
        Outcome::PassedExam,
        Outcome::FailedExam,
        Outcome::Libre,
        Outcome::EnrolledOnly,
    ];

    pub fn is_pass(self) -> bool {
        matches!(self, Outcome::Promoted | Outcome::PassedExam)
    }

    pub fn is_graded(self) -> bool {
        matches!(
            self,
            Outcome::Promoted | Outcome::PassedExam | Outcome::FailedExam
        )
    }

    pub fn is_exam(self) -> bool {
        matches!(self, Outcome::PassedExam | Outcome::FailedExam)
    }

    /// A course taking (cursada), as opposed to a final-exam sitting.
    pub fn is_enrolment(self) -> bool {
        !self.is_exam()
    }

    /// Tie-break order for conflicting duplicates; higher wins.
    fn precedence(self) -> u8 {
        match self {
            Outcome::Promoted => 5,
            Outcome::PassedExam => 4,
            Outcome::Regularized => 3,
            Outcome::FailedExam => 2,
            Outcome::Libre => 1,
            Outcome::EnrolledOnly => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Promoted => "promoted",
            Outcome::Regularized => "regularized",
            Outcome::PassedExam => "passed_exam",
            Outcome::FailedExam => "failed_exam",
            Outcome::Libre => "libre",
            Outcome::EnrolledOnly => "enrolled_only",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Outcome {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Outcome::ALL
            .into_iter()
            .find(|o| o.as_str() == s.trim())
            .ok_or_else(|| format!("unknown outcome `{s}`"))
    }
}

/// Academic calendar semester.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CalendarTerm {
    pub year: i32,
    pub half: u8,
}

impl CalendarTerm {
    pub fn new(year: i32, half: u8) -> Self {
        CalendarTerm { year, half }
    }

    /// Semesters since year 0.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 2 + (self.half as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        CalendarTerm {
            year: ordinal.div_euclid(2) as i32,
            half: (ordinal.rem_euclid(2) + 1) as u8,
        }
    }

    pub fn offset(self, terms: i64) -> Self {
        Self::from_ordinal(self.ordinal() + terms)
    }
}

impl FromStr for CalendarTerm {
    type Err = String;
    /// `YEAR-HALF`, e.g. `2021-2`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("`{s}` is not a term of the form YEAR-HALF");
        let (year, half) = s.trim().rsplit_once('-').ok_or_else(bad)?;
        let year: i32 = year.parse().map_err(|_| bad())?;
        match half {
            "1" => Ok(CalendarTerm::new(year, 1)),
            "2" => Ok(CalendarTerm::new(year, 2)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for CalendarTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.year, self.half)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub student_id: String,
    pub term: CalendarTerm,
    pub course_code: String,
    pub outcome: Outcome,
    pub grade: Option<f64>,
    /// Recency: later records supersede earlier ones for the same key.
    /// File readers assign the row number.
    pub seq: u64,
}

impl TrajectoryRecord {
    /// Grade present exactly for graded outcomes, and within [0, 10].
    pub fn is_valid(&self) -> bool {
        match self.grade {
            Some(g) => self.outcome.is_graded() && (0.0..=10.0).contains(&g),
            None => !self.outcome.is_graded(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudentProfile {
    pub student_id: String,
    pub cohort_year: i32,
    pub hs_graduation_year: i32,
    pub age_at_entry: f64,
    pub gender: String,
    /// Explicit graduation record; `None` falls back to full coverage.
    pub graduated: Option<bool>,
}

impl StudentProfile {
    pub fn entry_term(&self) -> CalendarTerm {
        CalendarTerm::new(self.cohort_year, 1)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordRow {
    student_id: String,
    year: i32,
    half: u8,
    course_code: String,
    outcome: String,
    grade: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileRow {
    student_id: String,
    cohort_year: i32,
    hs_graduation_year: i32,
    age_at_entry: f64,
    gender: String,
    graduated: Option<String>,
}

fn input_error(path: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Input {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map(|p| p.line()).unwrap_or(0)
}

/// Read a records file. `label` names the source in diagnostics.
pub fn read_records<R: Read>(reader: R, label: &str) -> Result<Vec<TrajectoryRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = [
        "student_id",
        "year",
        "half",
        "course_code",
        "outcome",
        "grade",
    ];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(input_error(
            label,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<RecordRow>().enumerate() {
        let row = row.map_err(|e| input_error(label, csv_line(&e), e.to_string()))?;
        let line = i as u64 + 2;
        if row.half != 1 && row.half != 2 {
            return Err(input_error(
                label,
                line,
                format!("half must be 1 or 2, got {}", row.half),
            ));
        }
        let outcome = row
            .outcome
            .parse::<Outcome>()
            .map_err(|m| input_error(label, line, m))?;
        out.push(TrajectoryRecord {
            student_id: row.student_id,
            term: CalendarTerm::new(row.year, row.half),
            course_code: row.course_code,
            outcome,
            grade: row.grade,
            seq: line,
        });
    }
    Ok(out)
}

pub fn write_records<W: Write>(writer: W, records: &[TrajectoryRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(RecordRow {
            student_id: r.student_id.clone(),
            year: r.term.year,
            half: r.term.half,
            course_code: r.course_code.clone(),
            outcome: r.outcome.as_str().to_string(),
            grade: r.grade,
        })?;
    }
    if records.is_empty() {
        wtr.write_record([
            "student_id",
            "year",
            "half",
            "course_code",
            "outcome",
            "grade",
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<records>", e))?;
    Ok(())
}

pub fn read_profiles<R: Read>(reader: R, label: &str) -> Result<Vec<StudentProfile>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = [
        "student_id",
        "cohort_year",
        "hs_graduation_year",
        "age_at_entry",
        "gender",
        "graduated",
    ];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(input_error(
            label,
            1,
            format!("expected header `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<ProfileRow>().enumerate() {
        let row = row.map_err(|e| input_error(label, csv_line(&e), e.to_string()))?;
        let line = i as u64 + 2;
        let graduated = match row
            .graduated
            .as_deref()
            .map(str::to_ascii_lowercase)
            .as_deref()
        {
            None | Some("") => None,
            Some("true" | "1" | "yes") => Some(true),
            Some("false" | "0" | "no") => Some(false),
            Some(other) => {
                return Err(input_error(
                    label,
                    line,
                    format!("invalid graduated flag `{other}`"),
                ))
            }
        };
        out.push(StudentProfile {
            student_id: row.student_id,
            cohort_year: row.cohort_year,
            hs_graduation_year: row.hs_graduation_year,
            age_at_entry: row.age_at_entry,
            gender: row.gender,
            graduated,
        });
    }
    Ok(out)
}

pub fn write_profiles<W: Write>(writer: W, profiles: &[StudentProfile]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for p in profiles {
        wtr.serialize(ProfileRow {
            student_id: p.student_id.clone(),
            cohort_year: p.cohort_year,
            hs_graduation_year: p.hs_graduation_year,
            age_at_entry: p.age_at_entry,
            gender: p.gender.clone(),
            graduated: p.graduated.map(|g| g.to_string()),
        })?;
    }
    if profiles.is_empty() {
        wtr.write_record([
            "student_id",
            "cohort_year",
            "hs_graduation_year",
            "age_at_entry",
            "gender",
            "graduated",
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<profiles>", e))?;
    Ok(())
}

pub fn read_records_file(path: &Path) -> Result<Vec<TrajectoryRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file, &path.display().to_string())
}

pub fn read_profiles_file(path: &Path) -> Result<Vec<StudentProfile>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_profiles(file, &path.display().to_string())
}

/// Drop courses with fewer than `min_enrolments` enrolment records, bridging
/// each removed course's prerequisites to its dependents so no ordering
/// constraint is lost. Returns the pruned document and the removed codes.
pub fn prune_by_enrolment(
    doc: &CurriculumDocument,
    records: &[TrajectoryRecord],
    min_enrolments: usize,
) -> (CurriculumDocument, Vec<String>) {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in records.iter().filter(|r| r.outcome.is_enrolment()) {
        *counts.entry(r.course_code.as_str()).or_default() += 1;
    }
    let mut removed: Vec<String> = doc
        .courses
        .iter()
        .filter(|c| counts.get(c.code.as_str()).copied().unwrap_or(0) < min_enrolments)
        .map(|c| c.code.clone())
        .collect();
    removed.sort();

    let mut edges: BTreeSet<(String, String)> = doc
        .prerequisites
        .iter()
        .map(|p| (p.from.clone(), p.to.clone()))
        .collect();
    for code in &removed {
        let preds: Vec<String> = edges
            .iter()
            .filter(|(_, t)| t == code)
            .map(|(f, _)| f.clone())
            .collect();
        let succs: Vec<String> = edges
            .iter()
            .filter(|(f, _)| f == code)
            .map(|(_, t)| t.clone())
            .collect();
        edges.retain(|(f, t)| f != code && t != code);
        for p in &preds {
            for s in &succs {
                edges.insert((p.clone(), s.clone()));
            }
        }
    }
    let keep: BTreeSet<&str> = removed.iter().map(String::as_str).collect();
    let pruned = CurriculumDocument {
        courses: doc
            .courses
            .iter()
            .filter(|c| !keep.contains(c.code.as_str()))
            .cloned()
            .collect(),
        prerequisites: edges
            .iter()
            .map(|(f, t)| PrerequisiteSpec::new(f, t))
            .collect(),
        unknown: Default::default(),
    };
    if !removed.is_empty() {
        info!(
            "pruned {} low-enrolment courses: {}",
            removed.len(),
            removed.join(", ")
        );
    }
    (pruned, removed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelEvent {
    pub course: usize,
    pub outcome: Outcome,
    pub grade: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelRow {
    /// 1-based programme semester.
    pub term_index: usize,
    pub calendar: CalendarTerm,
    pub events: Vec<PanelEvent>,
    /// Courses passed in terms 1..=term_index.
    pub approved: CourseSet,
    /// False for term 1 and for a graduate's final observed term once
    /// [`StudentSemesterPanel::apply_filters`] has run.
    pub is_prediction_row: bool,
}

impl PanelRow {
    pub fn is_active(&self) -> bool {
        !self.events.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudentHistory {
    pub profile: StudentProfile,
    pub rows: Vec<PanelRow>,
    pub graduated: bool,
    /// Programme term at which graduation is recorded.
    pub graduation_term: Option<usize>,
}

impl StudentHistory {
    pub fn student_id(&self) -> &str {
        &self.profile.student_id
    }

    pub fn last_term(&self) -> usize {
        self.rows.len()
    }

    /// Approved set at the end of programme term `t`; ∅ for t = 0 and
    /// frozen at the last observed value beyond the history.
    pub fn approved_at(&self, t: usize) -> CourseSet {
        if t == 0 || self.rows.is_empty() {
            return CourseSet::new();
        }
        self.rows[t.min(self.rows.len()) - 1].approved.clone()
    }

    /// Copy restricted to programme terms 1..=t. Graduation facts are kept
    /// only if they were realised by term t.
    pub fn truncated(&self, t: usize) -> StudentHistory {
        let graduated_by_t = self.graduation_term.is_some_and(|g| g <= t);
        StudentHistory {
            profile: StudentProfile {
                graduated: None,
                ..self.profile.clone()
            },
            rows: self.rows.iter().take(t).cloned().collect(),
            graduated: graduated_by_t,
            graduation_term: self.graduation_term.filter(|_| graduated_by_t),
        }
    }
}

/// Row counts at each ingestion stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelCounts {
    pub input_records: usize,
    pub invalid_records: usize,
    pub quarantined_unknown_course: usize,
    pub duplicates_resolved: usize,
    pub conflicting_duplicates: usize,
    pub students_missing_profile: usize,
    pub profiles_without_records: usize,
    pub students_entry_inconsistent: usize,
    pub students_implausible: usize,
    pub students: usize,
    pub student_terms: usize,
    pub prediction_rows: usize,
}

#[derive(Debug, Clone)]
pub struct StudentSemesterPanel {
    pub students: BTreeMap<String, StudentHistory>,
    /// Latest calendar term observed anywhere in the input.
    pub window_end: Option<CalendarTerm>,
    pub counts: PanelCounts,
}

impl StudentSemesterPanel {
    pub fn build(
        records: &[TrajectoryRecord],
        profiles: &[StudentProfile],
        graph: &CurriculumGraph,
    ) -> Result<Self> {
        build_panel(records, profiles, graph)
    }

    pub fn student(&self, student_id: &str) -> Result<&StudentHistory> {
        self.students
            .get(student_id)
            .ok_or_else(|| Error::UnknownStudent(student_id.to_string()))
    }

    pub fn approved_set(&self, student_id: &str, t: usize) -> Result<CourseSet> {
        Ok(self.student(student_id)?.approved_at(t))
    }

    /// Marks prediction rows: every term except the first, and except a
    /// graduate's final observed term. History rows stay in place.
    pub fn apply_filters(mut self) -> Self {
        let mut prediction_rows = 0;
        for history in self.students.values_mut() {
            let last = history.rows.len();
            let graduated = history.graduated;
            for row in &mut history.rows {
                row.is_prediction_row =
                    row.term_index != 1 && !(graduated && row.term_index == last);
                prediction_rows += usize::from(row.is_prediction_row);
            }
        }
        self.counts.prediction_rows = prediction_rows;
        self
    }

    pub fn prediction_rows(&self) -> Vec<(&str, usize)> {
        self.students
            .iter()
            .flat_map(|(id, h)| {
                h.rows
                    .iter()
                    .filter(|r| r.is_prediction_row)
                    .map(move |r| (id.as_str(), r.term_index))
            })
            .collect()
    }

    /// Label every student at programme term `ref_term`.
    pub fn snapshot_at(&self, ref_term: usize, window: &ObservationWindow) -> Result<SnapshotSet> {
        if ref_term < 2 {
            return Err(Error::InvalidArgument(format!(
                "reference term must be >= 2, got {ref_term}"
            )));
        }
        let window_end = window.end.or(self.window_end);
        let mut set = SnapshotSet {
            ref_term,
            ..Default::default()
        };
        for (id, history) in &self.students {
            let ref_calendar = history.profile.entry_term().offset(ref_term as i64 - 1);
            if window_end.is_some_and(|end| ref_calendar > end) {
                set.excluded_not_reached += 1;
                continue;
            }
            let active_before = history.rows.iter().take(ref_term).any(PanelRow::is_active);
            if !active_before {
                set.excluded_inactive += 1;
                continue;
            }
            let active_after = history.rows.iter().skip(ref_term).any(PanelRow::is_active);
            let label = if active_after || history.graduated {
                Label::Persist
            } else {
                Label::Dropout
            };
            let censored = window_end.is_some_and(|end| {
                end.ordinal() - ref_calendar.ordinal() < window.min_follow_up_terms as i64
            });
            set.censored += usize::from(censored);
            set.snapshots.push(Snapshot {
                student_id: id.clone(),
                ref_term,
                history: history.truncated(ref_term),
                label,
                censored,
            });
        }
        if set.excluded_not_reached > 0 {
            info!(
                "snapshot at term {ref_term}: {} students had not reached the reference term",
                set.excluded_not_reached
            );
        }
        Ok(set)
    }
}

/// The observation window used to label snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservationWindow {
    /// Defaults to the panel's latest observed term.
    pub end: Option<CalendarTerm>,
    /// Snapshots with fewer follow-up semesters than this before `end` are
    /// flagged censored.
    pub min_follow_up_terms: usize,
}

impl Default for ObservationWindow {
    fn default() -> Self {
        ObservationWindow {
            end: None,
            min_follow_up_terms: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Dropout,
    Persist,
}

impl Label {
    pub fn is_dropout(self) -> bool {
        self == Label::Dropout
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub student_id: String,
    pub ref_term: usize,
    /// History up to and including the reference term, nothing later.
    pub history: StudentHistory,
    pub label: Label,
    pub censored: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SnapshotSet {
    pub ref_term: usize,
    pub snapshots: Vec<Snapshot>,
    pub excluded_not_reached: usize,
    pub excluded_inactive: usize,
    pub censored: usize,
}

/// Build the panel. Students without records or profile are dropped with a
/// warning; records naming unknown courses are quarantined.
pub fn build_panel(
    records: &[TrajectoryRecord],
    profiles: &[StudentProfile],
    graph: &CurriculumGraph,
) -> Result<StudentSemesterPanel> {
    let mut counts = PanelCounts {
        input_records: records.len(),
        ..Default::default()
    };
    let profile_by_id: BTreeMap<&str, &StudentProfile> = profiles
        .iter()
        .map(|p| (p.student_id.as_str(), p))
        .collect();

    // (student, term ordinal, course) -> winning record
    let mut by_key: BTreeMap<(&str, i64, usize), &TrajectoryRecord> = BTreeMap::new();
    let mut missing_profile: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        if !r.is_valid() {
            counts.invalid_records += 1;
            warn!(
                "record {}: {} {} {} has inconsistent grade {:?}, skipped",
                r.seq, r.student_id, r.course_code, r.outcome, r.grade
            );
            continue;
        }
        let Some(course) = graph.index_of(&r.course_code) else {
            counts.quarantined_unknown_course += 1;
            warn!(
                "record {}: unknown course `{}` quarantined",
                r.seq, r.course_code
            );
            continue;
        };
        if !profile_by_id.contains_key(r.student_id.as_str()) {
            missing_profile.insert(r.student_id.as_str());
            continue;
        }
        let key = (r.student_id.as_str(), r.term.ordinal(), course);
        match by_key.get(&key) {
            None => {
                by_key.insert(key, r);
            }
            Some(existing) => {
                counts.duplicates_resolved += 1;
                let replace = if r.seq != existing.seq {
                    r.seq > existing.seq
                } else {
                    if r.outcome != existing.outcome {
                        counts.conflicting_duplicates += 1;
                        warn!(
                            "conflicting duplicates for {} {} {}: {} vs {}, resolved by precedence",
                            r.student_id, r.term, r.course_code, existing.outcome, r.outcome
                        );
                    }
                    r.outcome.precedence() > existing.outcome.precedence()
                };
                if replace {
                    by_key.insert(key, r);
                }
            }
        }
    }
    counts.students_missing_profile = missing_profile.len();
    for id in &missing_profile {
        warn!("student `{id}` has records but no profile, excluded");
    }

    let mut per_student: BTreeMap<&str, Vec<&TrajectoryRecord>> = BTreeMap::new();
    for ((student, _, _), r) in &by_key {
        per_student.entry(student).or_default().push(r);
    }

    let mut students = BTreeMap::new();
    let mut window_end: Option<CalendarTerm> = None;
    for profile in profiles {
        let Some(recs) = per_student.get(profile.student_id.as_str()) else {
            counts.profiles_without_records += 1;
            warn!("student `{}` has no records, excluded", profile.student_id);
            continue;
        };
        let entry = profile.entry_term();
        let first = recs.iter().map(|r| r.term).min().expect("non-empty");
        if first < entry {
            counts.students_entry_inconsistent += 1;
            warn!(
                "student `{}`: record in {first} precedes cohort entry {entry}, excluded",
                profile.student_id
            );
            continue;
        }
        match assemble_history(profile, recs, graph) {
            Some(history) => {
                let last = history.rows.last().map(|r| r.calendar);
                window_end = window_end.max(last);
                counts.student_terms += history.rows.len();
                students.insert(profile.student_id.clone(), history);
            }
            None => {
                counts.students_implausible += 1;
                warn!(
                    "student `{}` passes the same course in more than one term, excluded",
                    profile.student_id
                );
            }
        }
    }
    counts.students = students.len();
    counts.prediction_rows = counts.student_terms;
    Ok(StudentSemesterPanel {
        students,
        window_end,
        counts,
    })
}

fn assemble_history(
    profile: &StudentProfile,
    records: &[&TrajectoryRecord],
    graph: &CurriculumGraph,
) -> Option<StudentHistory> {
    let entry = profile.entry_term().ordinal();
    let last_index = records
        .iter()
        .map(|r| (r.term.ordinal() - entry) as usize + 1)
        .max()
        .unwrap_or(0);
    let mut events: Vec<Vec<PanelEvent>> = vec![Vec::new(); last_index];
    let mut passed_in: HashMap<usize, usize> = HashMap::new();
    for r in records {
        let t = (r.term.ordinal() - entry) as usize + 1;
        let course = graph.index_of(&r.course_code).expect("filtered upstream");
        if r.outcome.is_pass() {
            if let Some(&earlier) = passed_in.get(&course) {
                if earlier != t {
                    return None;
                }
            }
            passed_in.insert(course, t);
        }
        events[t - 1].push(PanelEvent {
            course,
            outcome: r.outcome,
            grade: r.grade,
        });
    }

    let mut approved = CourseSet::new();
    let mut rows = Vec::with_capacity(last_index);
    let mut coverage_term = None;
    for (i, mut term_events) in events.into_iter().enumerate() {
        term_events.sort_by_key(|e| e.course);
        approved.extend(
            term_events
                .iter()
                .filter(|e| e.outcome.is_pass())
                .map(|e| e.course),
        );
        if coverage_term.is_none() && approved.len() == graph.len() {
            coverage_term = Some(i + 1);
        }
        rows.push(PanelRow {
            term_index: i + 1,
            calendar: CalendarTerm::from_ordinal(entry + i as i64),
            events: term_events,
            approved: approved.clone(),
            is_prediction_row: true,
        });
    }
    let (graduated, graduation_term) = match profile.graduated {
        Some(true) => (true, Some(last_index)),
        Some(false) => (false, None),
        None => (coverage_term.is_some(), coverage_term),
    };
    Some(StudentHistory {
        profile: profile.clone(),
        rows,
        graduated,
        graduation_term,
    })
}
