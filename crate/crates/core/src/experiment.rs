//! Feature matrix assembly, the two-configuration comparison, leave-one-out
//! ablation of the structural columns and the importance ranking.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::baseline::{baseline_from_history, BASELINE_FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::forest::{
    evaluate, stratified_split, train, Dataset, ForestConfig, ForestModel, Metrics, Split,
};
use crate::graph::CurriculumGraph;
use crate::metrics::BottleneckCriteria;
use crate::panel::{
    build_panel, Label, ObservationWindow, PanelCounts, SnapshotSet, StudentProfile,
    TrajectoryRecord,
};
use crate::structural::{StructuralContext, STRUCTURAL_FEATURE_NAMES};

pub const BASELINE_WIDTH: usize = BASELINE_FEATURE_NAMES.len();
pub const FULL_WIDTH: usize = BASELINE_WIDTH + STRUCTURAL_FEATURE_NAMES.len();

/// The 34 column names: baseline first, structural appended.
pub fn feature_names() -> Vec<String> {
    BASELINE_FEATURE_NAMES
        .iter()
        .chain(STRUCTURAL_FEATURE_NAMES.iter())
        .map(|s| s.to_string())
        .collect()
}

pub fn is_structural(name: &str) -> bool {
    name.starts_with("STRUCT_")
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub student_id: String,
    pub values: [f64; FULL_WIDTH],
    pub label: Label,
}

/// One row per student snapshot at a fixed reference term.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureRow>,
}

impl FeatureMatrix {
    /// Censored snapshots are dropped unless `include_censored` is set.
    pub fn build(
        snapshots: &SnapshotSet,
        ctx: &StructuralContext,
        include_censored: bool,
    ) -> Result<Self> {
        let ref_term = snapshots.ref_term;
        let mut rows = Vec::with_capacity(snapshots.snapshots.len());
        for snap in &snapshots.snapshots {
            if snap.censored && !include_censored {
                continue;
            }
            let base = baseline_from_history(&snap.history, ctx.graph(), ref_term);
            let structural = ctx.compute_all(&snap.history.approved_at(ref_term))?;
            let mut values = [0.0; FULL_WIDTH];
            values[..BASELINE_WIDTH].copy_from_slice(&base.to_array());
            values[BASELINE_WIDTH..].copy_from_slice(&structural.to_array());
            rows.push(FeatureRow {
                student_id: snap.student_id.clone(),
                values,
                label: snap.label,
            });
        }
        Ok(FeatureMatrix { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.label.is_dropout()).collect()
    }

    pub fn dataset(&self) -> Result<Dataset> {
        let rows: Vec<Vec<f64>> = self.rows.iter().map(|r| r.values.to_vec()).collect();
        Dataset::from_rows(feature_names(), &rows, self.labels())
    }

    /// Header `student_id`, the 34 feature columns, then `label` (1 = dropout).
    /// Values use the shortest exact representation so the file round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("student_id");
        for name in feature_names() {
            out.push(',');
            out.push_str(&name);
        }
        out.push_str(",label\n");
        for row in &self.rows {
            out.push_str(&row.student_id);
            for v in row.values {
                write!(out, ",{v}").unwrap();
            }
            writeln!(out, ",{}", u8::from(row.label.is_dropout())).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str, path: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut expected = vec!["student_id".to_string()];
        expected.extend(feature_names());
        expected.push("label".into());
        if let Some(missing) = expected.iter().find(|c| !header.contains(c)) {
            return Err(Error::Input {
                path: path.into(),
                line: 1,
                message: format!("missing column `{missing}`"),
            });
        }
        let position: Vec<usize> = expected
            .iter()
            .map(|c| header.iter().position(|h| h == c).unwrap())
            .collect();
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i as u64 + 2;
            let record = record?;
            let field = |k: usize| record.get(position[k]).unwrap_or("").trim();
            let bad = |message: String| Error::Input {
                path: path.into(),
                line,
                message,
            };
            let mut values = [0.0; FULL_WIDTH];
            for (j, v) in values.iter_mut().enumerate() {
                let raw = field(j + 1);
                *v = if raw.is_empty() {
                    f64::NAN
                } else {
                    raw.parse().map_err(|_| {
                        bad(format!(
                            "column `{}`: `{raw}` is not a number",
                            expected[j + 1]
                        ))
                    })?
                };
            }
            let label = match field(FULL_WIDTH + 1) {
                "1" => Label::Dropout,
                "0" => Label::Persist,
                other => return Err(bad(format!("label `{other}` is not 0 or 1"))),
            };
            rows.push(FeatureRow {
                student_id: field(0).to_string(),
                values,
                label,
            });
        }
        Ok(FeatureMatrix { rows })
    }
}

/// Row counts from ingestion to the feature matrix.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub panel: PanelCounts,
    pub snapshots: usize,
    pub excluded_not_reached: usize,
    pub excluded_inactive: usize,
    pub censored: usize,
    pub matrix_rows: usize,
    pub dropouts: usize,
}

/// Records and profiles to the feature matrix at `config.ref_term`.
pub fn assemble_features(
    graph: &CurriculumGraph,
    records: &[TrajectoryRecord],
    profiles: &[StudentProfile],
    config: &ExperimentConfig,
    window: &ObservationWindow,
    include_censored: bool,
) -> Result<(FeatureMatrix, StageCounts)> {
    let panel = build_panel(records, profiles, graph)?.apply_filters();
    let snapshots = panel.snapshot_at(config.ref_term, window)?;
    let ctx = StructuralContext::new(graph, &config.criteria)?;
    let matrix = FeatureMatrix::build(&snapshots, &ctx, include_censored)?;
    let counts = StageCounts {
        panel: panel.counts.clone(),
        snapshots: snapshots.snapshots.len(),
        excluded_not_reached: snapshots.excluded_not_reached,
        excluded_inactive: snapshots.excluded_inactive,
        censored: snapshots.censored,
        matrix_rows: matrix.len(),
        dropouts: matrix.labels().iter().filter(|&&l| l).count(),
    };
    Ok((matrix, counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub ref_term: usize,
    pub train_fraction: f64,
    pub forest: ForestConfig,
    pub criteria: BottleneckCriteria,
    /// Score threshold for the positive (dropout) class.
    pub threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ref_term: 5,
            train_fraction: 0.8,
            forest: ForestConfig::default(),
            criteria: BottleneckCriteria::default(),
            threshold: 0.5,
        }
    }
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        self.forest.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.forest.seed = seed;
        self
    }
}

/// The split shared by every model of one experiment.
pub fn draw_split(matrix: &FeatureMatrix, config: &ExperimentConfig) -> Result<Split> {
    let seed = config.seed();
    let labels = matrix.labels();
    let split = stratified_split(&labels, config.train_fraction, seed).map_err(|e| match e {
        Error::ClassTooSmall { .. } => Error::DegenerateSplit {
            seed,
            partition: "input",
        },
        other => other,
    })?;
    for (idx, partition) in [(&split.train, "train"), (&split.test, "test")] {
        let pos = idx.iter().filter(|&&i| labels[i]).count();
        if pos == 0 || pos == idx.len() {
            return Err(Error::DegenerateSplit { seed, partition });
        }
    }
    Ok(split)
}

struct Fitted {
    test: Metrics,
    train_accuracy: f64,
}

fn fit_and_score(data: &Dataset, split: &Split, config: &ExperimentConfig) -> Result<Fitted> {
    let train_set = data.select_rows(&split.train);
    let test_set = data.select_rows(&split.test);
    let model = train(&train_set, &config.forest)?;
    let train_scores = model.predict_dataset(&train_set)?;
    let train_accuracy = evaluate(&train_scores, train_set.labels(), config.threshold)?.accuracy;
    let test_scores = model.predict_dataset(&test_set)?;
    let test = evaluate(&test_scores, test_set.labels(), config.threshold)?;
    Ok(Fitted {
        test,
        train_accuracy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub num_features: usize,
    pub auc: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub balanced_accuracy: f64,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub rows: Vec<ComparisonRow>,
}

pub const COMPARISON_COLUMNS: [&str; 7] = [
    "model",
    "num_features",
    "auc",
    "accuracy",
    "f1",
    "balanced_accuracy",
    "train_accuracy",
];

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn to_table(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.model.clone(),
                    r.num_features.to_string(),
                    format!("{:.4}", r.auc),
                    format!("{:.4}", r.accuracy),
                    format!("{:.4}", r.f1),
                    format!("{:.4}", r.balanced_accuracy),
                    format!("{:.4}", r.train_accuracy),
                ]
            })
            .collect();
        aligned(&COMPARISON_COLUMNS, &cells)
    }

    pub fn row(&self, model: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.model == model)
    }
}

pub const BASELINE_MODEL: &str = "baseline";
pub const STRUCTURAL_MODEL: &str = "baseline+struct";

pub fn run_comparison(
    matrix: &FeatureMatrix,
    config: &ExperimentConfig,
) -> Result<ComparisonReport> {
    let split = draw_split(matrix, config)?;
    let full = matrix.dataset()?;
    let base = full.select_columns(&BASELINE_FEATURE_NAMES)?;
    let mut rows = Vec::with_capacity(2);
    for (name, data) in [(BASELINE_MODEL, &base), (STRUCTURAL_MODEL, &full)] {
        let fitted = fit_and_score(data, &split, config)?;
        rows.push(ComparisonRow {
            model: name.to_string(),
            num_features: data.n_features(),
            auc: fitted.test.auc.ok_or(Error::AucUndefined)?,
            accuracy: fitted.test.accuracy,
            f1: fitted.test.f1,
            balanced_accuracy: fitted.test.balanced_accuracy,
            train_accuracy: fitted.train_accuracy,
        });
    }
    Ok(ComparisonReport {
        seed: config.seed(),
        n_train: split.train.len(),
        n_test: split.test.len(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub feature: String,
    pub delta_auc: f64,
    pub delta_accuracy: f64,
    pub delta_balanced_accuracy: f64,
    pub delta_f1: f64,
}

/// Deltas are full − ablated, so a positive delta means the column helped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub seed: u64,
    pub full: ComparisonRow,
    pub rows: Vec<AblationRow>,
}

impl AblationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    /// Long format `feature,metric,delta`.
    pub fn to_long_csv(&self) -> String {
        let mut out = String::from("feature,metric,delta\n");
        for r in &self.rows {
            for (metric, delta) in [
                ("auc", r.delta_auc),
                ("accuracy", r.delta_accuracy),
                ("balanced_accuracy", r.delta_balanced_accuracy),
                ("f1", r.delta_f1),
            ] {
                writeln!(out, "{},{metric},{delta:.6}", r.feature).unwrap();
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.feature.clone(),
                    format!("{:+.4}", r.delta_auc),
                    format!("{:+.4}", r.delta_accuracy),
                    format!("{:+.4}", r.delta_balanced_accuracy),
                    format!("{:+.4}", r.delta_f1),
                ]
            })
            .collect();
        aligned(
            &[
                "removed",
                "d_auc",
                "d_accuracy",
                "d_balanced_accuracy",
                "d_f1",
            ],
            &cells,
        )
    }
}

pub fn run_ablation(matrix: &FeatureMatrix, config: &ExperimentConfig) -> Result<AblationReport> {
    let split = draw_split(matrix, config)?;
    let full = matrix.dataset()?;
    let reference = fit_and_score(&full, &split, config)?;
    let full_auc = reference.test.auc.ok_or(Error::AucUndefined)?;
    let mut rows = Vec::with_capacity(STRUCTURAL_FEATURE_NAMES.len());
    for name in STRUCTURAL_FEATURE_NAMES {
        let ablated = fit_and_score(&full.without_column(name)?, &split, config)?;
        rows.push(AblationRow {
            feature: name.to_string(),
            delta_auc: full_auc - ablated.test.auc.ok_or(Error::AucUndefined)?,
            delta_accuracy: reference.test.accuracy - ablated.test.accuracy,
            delta_balanced_accuracy: reference.test.balanced_accuracy
                - ablated.test.balanced_accuracy,
            delta_f1: reference.test.f1 - ablated.test.f1,
        });
    }
    rows.sort_by(|a, b| a.feature.cmp(&b.feature));
    Ok(AblationReport {
        seed: config.seed(),
        full: ComparisonRow {
            model: STRUCTURAL_MODEL.into(),
            num_features: full.n_features(),
            auc: full_auc,
            accuracy: reference.test.accuracy,
            f1: reference.test.f1,
            balanced_accuracy: reference.test.balanced_accuracy,
            train_accuracy: reference.train_accuracy,
        },
        rows,
    })
}

/// The baseline+struct model fitted on the training partition.
pub fn train_full_model(matrix: &FeatureMatrix, config: &ExperimentConfig) -> Result<ForestModel> {
    let split = draw_split(matrix, config)?;
    let full = matrix.dataset()?;
    train(&full.select_rows(&split.train), &config.forest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub rank: usize,
    pub feature: String,
    pub importance: f64,
    pub is_structural: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub rows: Vec<ImportanceRow>,
}

impl ImportanceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rank,feature,importance,is_structural\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{:.6},{}",
                r.rank, r.feature, r.importance, r.is_structural
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises") + "\n"
    }

    pub fn to_table(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.rank.to_string(),
                    r.feature.clone(),
                    format!("{:.4}", r.importance),
                    if r.is_structural {
                        "*".into()
                    } else {
                        String::new()
                    },
                ]
            })
            .collect();
        aligned(&["rank", "feature", "importance", "structural"], &cells)
    }
}

/// Top-`k` MDI ranking; `None` keeps every column.
pub fn report_importance(model: &ForestModel, top_k: Option<usize>) -> ImportanceReport {
    let ranked = model.feature_importance();
    let k = top_k.unwrap_or(ranked.len()).min(ranked.len());
    ImportanceReport {
        rows: ranked
            .into_iter()
            .take(k)
            .enumerate()
            .map(|(i, (feature, importance))| ImportanceRow {
                rank: i + 1,
                is_structural: is_structural(&feature),
                feature,
                importance,
            })
            .collect(),
    }
}

fn aligned(header: &[&str], cells: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |row: &[String]| -> String {
        let parts: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, &w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&line(&rule));
    for row in cells {
        out.push_str(&line(row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_matrix(n: usize) -> FeatureMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut values = [0.0; FULL_WIDTH];
                for (j, v) in values.iter_mut().enumerate() {
                    *v = ((i * (j + 3)) % 17) as f64;
                }
                // BAR held constant
                values[BASELINE_WIDTH + 2] = 1.0;
                let label = if (i * 7) % 10 < 3 {
                    Label::Dropout
                } else {
                    Label::Persist
                };
                FeatureRow {
                    student_id: format!("s{i:03}"),
                    values,
                    label,
                }
            })
            .collect();
        FeatureMatrix { rows }
    }

    fn small_config() -> ExperimentConfig {
        let mut c = ExperimentConfig::default().with_seed(42);
        c.forest.n_trees = 30;
        c
    }

    #[test]
    fn names_are_nested() {
        let names = feature_names();
        assert_eq!(names.len(), 34);
        assert_eq!(
            &names[..25],
            BASELINE_FEATURE_NAMES.map(String::from).as_slice()
        );
        assert!(names[25..].iter().all(|n| is_structural(n)));
    }

    #[test]
    fn comparison_shape_and_determinism() {
        let m = toy_matrix(120);
        let a = run_comparison(&m, &small_config()).unwrap();
        assert_eq!(a.rows.len(), 2);
        assert_eq!(a.rows[0].num_features, 25);
        assert_eq!(a.rows[1].num_features, 34);
        assert_eq!(a.n_train + a.n_test, 120);
        assert_eq!(
            a.to_json(),
            run_comparison(&m, &small_config()).unwrap().to_json()
        );
        assert!(a.to_table().starts_with("model"));
    }

    #[test]
    fn ablation_rows_and_constant_column() {
        let m = toy_matrix(100);
        let r = run_ablation(&m, &small_config()).unwrap();
        assert_eq!(r.rows.len(), 9);
        let bar = r
            .rows
            .iter()
            .find(|r| r.feature == "STRUCT_bottleneck_approval_ratio")
            .unwrap();
        assert_eq!(
            (
                bar.delta_auc,
                bar.delta_accuracy,
                bar.delta_balanced_accuracy,
                bar.delta_f1
            ),
            (0.0, 0.0, 0.0, 0.0)
        );
        let csv = r.to_long_csv();
        assert_eq!(csv.lines().count(), 1 + 36);
        assert!(csv.starts_with("feature,metric,delta\n"));
    }

    #[test]
    fn importance_top_k() {
        let m = toy_matrix(80);
        let model = train_full_model(&m, &small_config()).unwrap();
        let all = report_importance(&model, None);
        assert_eq!(all.rows.len(), 34);
        let total: f64 = all.rows.iter().map(|r| r.importance).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let top = report_importance(&model, Some(20));
        assert_eq!(top.rows.len(), 20);
        assert_eq!(top.rows[0].rank, 1);
        assert_eq!(
            top.to_csv().lines().next(),
            Some("rank,feature,importance,is_structural")
        );
    }

    #[test]
    fn degenerate_split_names_seed() {
        let mut m = toy_matrix(20);
        for r in &mut m.rows {
            r.label = Label::Persist;
        }
        m.rows[0].label = Label::Dropout;
        match run_comparison(&m, &small_config()) {
            Err(Error::DegenerateSplit { seed: 42, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut m = toy_matrix(5);
        m.rows[0].values[30] = 1.0 / 3.0;
        m.rows[1].values[0] = 0.1 + 0.2;
        let back = FeatureMatrix::from_csv(&m.to_csv(), "f.csv").unwrap();
        assert_eq!(back, m);
        let err = FeatureMatrix::from_csv("student_id,label\n", "f.csv").unwrap_err();
        assert!(err.to_string().starts_with("f.csv:1:"));
    }
}
