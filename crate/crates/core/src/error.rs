use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which half of the entry→terminal reachability check a course failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReachDirection {
    /// No entry course reaches it.
    FromEntry,
    /// It reaches no terminal course.
    ToTerminal,
}

impl std::fmt::Display for ReachDirection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReachDirection::FromEntry => f.write_str("not reachable from any entry course"),
            ReachDirection::ToTerminal => f.write_str("cannot reach any terminal course"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed curriculum: {0}")]
    MalformedCurriculum(String),

    #[error("duplicate course code `{0}`")]
    DuplicateCourse(String),

    #[error("course code must be non-empty")]
    EmptyCourseCode,

    #[error("course `{0}` has an empty module label")]
    EmptyModule(String),

    #[error("course `{code}` has non-positive credits {credits}")]
    NonPositiveCredits { code: String, credits: String },

    #[error("prerequisite {from} -> {to} references unknown course `{unknown}`")]
    UnknownCourse {
        from: String,
        to: String,
        unknown: String,
    },

    #[error("self-loop on course `{0}`")]
    SelfLoop(String),

    #[error("duplicate prerequisite {from} -> {to}")]
    DuplicateEdge { from: String, to: String },

    #[error("prerequisite cycle: {}", .witness.join(" -> "))]
    Cycle { witness: Vec<String> },

    #[error("course `{code}` is {direction}")]
    Unreachable {
        code: String,
        direction: ReachDirection,
    },

    #[error("course `{0}` is not in the curriculum")]
    UnknownCourseCode(String),

    #[error("course index {0} is out of range")]
    CourseIndexOutOfRange(usize),

    #[error("backbone carries zero credits")]
    EmptyBackbone,

    #[error("no path from the approved set or the entry courses reaches a terminal course")]
    NoGraduationPath,

    #[error("eigenvector centrality did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("unknown student `{0}`")]
    UnknownStudent(String),

    #[error("{path}:{line}: {message}")]
    Input {
        path: String,
        line: u64,
        message: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class `{class}` has {count} rows; at least 2 are required")]
    ClassTooSmall { class: &'static str, count: usize },

    #[error("training set contains a single class")]
    SingleClass,

    #[error("row width {got} does not match model width {expected}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("AUC undefined: labels contain a single class")]
    AucUndefined,

    #[error("degenerate split for seed {seed}: {partition} partition holds a single class")]
    DegenerateSplit { seed: u64, partition: &'static str },

    #[error("feature column `{0}` not found")]
    MissingColumn(String),

    #[error("synthetic curriculum failed validation after {attempts} attempts: {last}")]
    SynthFailed { attempts: usize, last: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
