//! Prerequisite-graph analytics for curriculum-constrained attrition models.
//!
//! The crate turns a curriculum into a validated prerequisite DAG, computes
//! course centralities and the backbone/bottleneck course sets, derives
//! leakage-aware structural features for each student at a reference term,
//! and compares a baseline against a baseline-plus-structure random forest.
//!
//! Runnable walkthroughs live in `examples/`; the `curgraph` binary wraps
//! [`cli::run`].

pub mod baseline;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod forest;
pub mod graph;
pub mod metrics;
pub mod panel;
pub mod structural;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{
    parse_curriculum, Course, CourseSet, Credits, CurriculumDocument, CurriculumGraph,
};
pub use metrics::{BottleneckCriteria, CentralityTable};
