//! Command-line front end. Every subcommand writes its outputs and a
//! `manifest.json` into `--out-dir` and prints the manifest path.
//!
//! Exit codes: 0 success, 1 invalid input, 2 usage error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::experiment::{
    assemble_features, report_importance, run_ablation, run_comparison, train_full_model,
    ExperimentConfig, FeatureMatrix,
};
use crate::forest::ForestConfig;
use crate::graph::{parse_curriculum, CurriculumGraph};
use crate::metrics::{
    betweenness_centrality, identify_backbone, identify_bottlenecks, module_centrality_summary,
    BottleneckCriteria, CentralityTable, EigenvectorOptions,
};
use crate::panel::{
    build_panel, read_profiles_file, read_records_file, write_profiles, write_records,
    CalendarTerm, ObservationWindow, StudentProfile, TrajectoryRecord,
};
use crate::synth::{generate_cohort, generate_curriculum, SynthParams};

#[derive(Debug, Parser)]
#[command(
    name = "curgraph",
    version,
    about = "Curriculum prerequisite graphs and structural attrition features"
)]
struct Cli {
    /// Directory receiving outputs and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Curriculum graph validation and metrics.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Student-semester panel construction.
    #[command(subcommand)]
    Panel(PanelCommand),
    /// Reference-term feature matrix.
    #[command(subcommand)]
    Features(FeaturesCommand),
    /// Baseline vs baseline+struct experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Synthetic curricula and cohorts.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Full pipeline from raw inputs to every report.
    Report(ReportArgs),
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Check structure, acyclicity and reachability.
    Validate { curriculum: PathBuf },
    /// Write the per-course centrality table.
    Metrics {
        curriculum: PathBuf,
        #[command(flatten)]
        criteria: CriteriaArgs,
    },
    /// List backbone courses.
    Backbone { curriculum: PathBuf },
    /// List bottleneck courses.
    Bottlenecks {
        curriculum: PathBuf,
        #[command(flatten)]
        criteria: CriteriaArgs,
    },
}

#[derive(Debug, Subcommand)]
enum PanelCommand {
    /// Build the panel and write one row per student-term.
    Build(RawInputs),
}

#[derive(Debug, Subcommand)]
enum FeaturesCommand {
    /// Write the 25 + 9 feature matrix at the reference term.
    Compute {
        #[command(flatten)]
        inputs: RawInputs,
        #[command(flatten)]
        snapshot: SnapshotArgs,
        #[command(flatten)]
        criteria: CriteriaArgs,
    },
}

#[derive(Debug, Subcommand)]
enum ExperimentCommand {
    /// Two-configuration comparison on a shared split.
    Compare(ExperimentArgs),
    /// Leave-one-out ablation of the structural columns.
    Ablate(ExperimentArgs),
    /// MDI importance ranking of the full model.
    Importance {
        #[command(flatten)]
        args: ExperimentArgs,
        /// Rows to keep.
        #[arg(long, default_value_t = 20)]
        top_k: usize,
    },
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// Generate a layered random curriculum.
    Curriculum(SynthCurriculumArgs),
    /// Simulate a cohort on a curriculum.
    Cohort(SynthCohortArgs),
}

#[derive(Debug, Args)]
struct RawInputs {
    #[arg(long)]
    curriculum: PathBuf,
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    profiles: PathBuf,
}

#[derive(Debug, Args, Clone, Copy)]
struct CriteriaArgs {
    /// Betweenness quantile for bottlenecks, in (0, 1].
    #[arg(long, default_value_t = 0.90)]
    bt_quantile: f64,
    /// Minimum out-degree for bottlenecks.
    #[arg(long, default_value_t = 2)]
    min_outdeg: usize,
}

impl CriteriaArgs {
    fn resolve(self) -> Result<BottleneckCriteria, Error> {
        BottleneckCriteria::new(self.bt_quantile, self.min_outdeg)
    }
}

#[derive(Debug, Args, Clone)]
struct SnapshotArgs {
    /// Programme term of the snapshot.
    #[arg(long, default_value_t = 5)]
    ref_term: usize,
    /// Last observed term, YEAR-HALF; defaults to the latest term in the records.
    #[arg(long)]
    window_end: Option<CalendarTerm>,
    /// Keep snapshots with under two semesters of follow-up.
    #[arg(long)]
    include_censored: bool,
}

impl SnapshotArgs {
    fn window(&self) -> ObservationWindow {
        ObservationWindow {
            end: self.window_end,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args, Clone, Copy)]
struct ForestArgs {
    /// Master seed for the split and every tree.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 500)]
    trees: usize,
    /// Tree depth limit; unlimited by default.
    #[arg(long)]
    max_depth: Option<usize>,
}

impl ForestArgs {
    fn config(self, ref_term: usize, criteria: BottleneckCriteria) -> ExperimentConfig {
        ExperimentConfig {
            ref_term,
            train_fraction: self.train_fraction,
            forest: ForestConfig {
                n_trees: self.trees,
                max_depth: self.max_depth,
                seed: self.seed,
                ..Default::default()
            },
            criteria,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// Feature matrix written by `features compute`.
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    forest: ForestArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    inputs: RawInputs,
    #[command(flatten)]
    snapshot: SnapshotArgs,
    #[command(flatten)]
    criteria: CriteriaArgs,
    #[command(flatten)]
    forest: ForestArgs,
    #[arg(long, default_value_t = 20)]
    top_k: usize,
}

#[derive(Debug, Args)]
struct SynthCurriculumArgs {
    #[arg(long, default_value_t = SynthParams::default().n_courses)]
    courses: usize,
    #[arg(long, default_value_t = SynthParams::default().n_modules)]
    modules: usize,
    /// Semester layers; 0 chooses from the course count.
    #[arg(long, default_value_t = SynthParams::default().n_layers)]
    layers: usize,
    #[arg(long, default_value_t = SynthParams::default().edge_density)]
    edge_density: f64,
    #[arg(long, default_value_t = SynthParams::default().promotable_fraction)]
    promotable: f64,
    #[arg(long, default_value_t = SynthParams::default().seed)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SynthCohortArgs {
    #[arg(long)]
    curriculum: PathBuf,
    #[arg(long, default_value_t = SynthParams::default().n_students)]
    students: usize,
    #[arg(long, default_value_t = SynthParams::default().n_cohorts)]
    cohorts: usize,
    #[arg(long, default_value_t = SynthParams::default().first_cohort_year)]
    first_year: i32,
    #[arg(long, default_value_t = SynthParams::default().terms_horizon)]
    horizon: usize,
    #[arg(long, default_value_t = SynthParams::default().base_pass_probability)]
    pass_probability: f64,
    #[arg(long, default_value_t = SynthParams::default().ability_spread)]
    ability_spread: f64,
    #[arg(long, default_value_t = SynthParams::default().dropout_base_hazard)]
    base_hazard: f64,
    /// Hazard multiplier per blocked credit.
    #[arg(long, default_value_t = SynthParams::default().blocked_credits_hazard_coefficient)]
    coefficient: f64,
    #[arg(long, default_value_t = SynthParams::default().courses_per_term_mean)]
    load: f64,
    #[arg(long, default_value_t = SynthParams::default().gap_probability)]
    gap_probability: f64,
    #[arg(long, default_value_t = SynthParams::default().seed)]
    seed: u64,
}

/// An error with the input or stage it came from.
#[derive(Debug)]
struct Failure {
    context: Option<String>,
    error: Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.context {
            Some(c) => write!(f, "{c}: {}", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            context: None,
            error,
        }
    }
}

trait Context<T> {
    fn context(self, c: impl fmt::Display) -> Result<T, Failure>;
}

impl<T> Context<T> for Result<T, Error> {
    fn context(self, c: impl fmt::Display) -> Result<T, Failure> {
        self.map_err(|error| match error {
            // these already name their file
            Error::Input { .. } | Error::Io { .. } => Failure {
                context: None,
                error,
            },
            error => Failure {
                context: Some(c.to_string()),
                error,
            },
        })
    }
}

#[derive(Debug, Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Runtime {
    threads: Option<usize>,
    unix_time: u64,
}

#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    inputs: Vec<FileDigest>,
    config: Value,
    seed: Option<u64>,
    counts: Value,
    outputs: Vec<FileDigest>,
    runtime: Runtime,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects one run's inputs, outputs and counts for the manifest.
struct Run {
    command: String,
    out_dir: PathBuf,
    threads: Option<usize>,
    inputs: Vec<(PathBuf, FileDigest)>,
    outputs: Vec<FileDigest>,
    config: Value,
    seed: Option<u64>,
    counts: Value,
}

impl Run {
    fn new(command: &str, out_dir: &Path, threads: Option<usize>) -> Self {
        Run {
            command: command.to_string(),
            out_dir: out_dir.to_path_buf(),
            threads,
            inputs: Vec::new(),
            outputs: Vec::new(),
            config: Value::Null,
            seed: None,
            counts: Value::Null,
        }
    }

    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if !self.inputs.iter().any(|(p, _)| p == path) {
            self.inputs.push((
                path.to_path_buf(),
                FileDigest {
                    path: path.display().to_string(),
                    sha256: sha256_hex(&bytes),
                },
            ));
        }
        String::from_utf8(bytes).map_err(|e| {
            Failure::from(Error::Input {
                path: path.display().to_string(),
                line: 0,
                message: format!("not valid UTF-8: {e}"),
            })
        })
    }

    fn curriculum(&mut self, path: &Path) -> Result<CurriculumGraph, Failure> {
        let text = self.read(path)?;
        parse_curriculum(&text).context(path.display())
    }

    fn records(&mut self, path: &Path) -> Result<Vec<TrajectoryRecord>, Failure> {
        self.read(path)?;
        Ok(read_records_file(path)?)
    }

    fn profiles(&mut self, path: &Path) -> Result<Vec<StudentProfile>, Failure> {
        self.read(path)?;
        Ok(read_profiles_file(path)?)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.out_dir).map_err(|e| Error::io(&self.out_dir, e))?;
        let path = self.out_dir.join(name);
        if let Ok(target) = path.canonicalize() {
            if self
                .inputs
                .iter()
                .any(|(p, _)| p.canonicalize().ok().as_ref() == Some(&target))
            {
                return Err(Error::InvalidArgument(format!(
                    "refusing to overwrite input file {}",
                    path.display()
                ))
                .into());
            }
        }
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    fn finish(self) -> Result<PathBuf, Failure> {
        let unix_time = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            inputs: self.inputs.into_iter().map(|(_, d)| d).collect(),
            config: self.config,
            seed: self.seed,
            counts: self.counts,
            outputs: self.outputs,
            runtime: Runtime {
                threads: self.threads,
                unix_time,
            },
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(Error::from)? + "\n";
        let path = self.out_dir.join("manifest.json");
        fs::create_dir_all(&self.out_dir).map_err(|e| Error::io(&self.out_dir, e))?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

/// Parse `args` (including the program name) and execute. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be >= 1".into()).into()),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::InvalidArgument(format!("thread pool: {e}")).into()),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(manifest) => {
            println!("manifest: {}", manifest.display());
            0
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            match failure.error {
                Error::InvalidArgument(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<PathBuf, Failure> {
    let new_run = |name: &str| Run::new(name, &cli.out_dir, cli.threads);
    match &cli.command {
        Command::Graph(cmd) => graph_command(cmd, new_run),
        Command::Panel(PanelCommand::Build(inputs)) => {
            let mut run = new_run("panel build");
            panel_build(&mut run, inputs)?;
            run.finish()
        }
        Command::Features(FeaturesCommand::Compute {
            inputs,
            snapshot,
            criteria,
        }) => {
            let mut run = new_run("features compute");
            let criteria = criteria.resolve()?;
            let config = ExperimentConfig {
                ref_term: snapshot.ref_term,
                criteria,
                ..Default::default()
            };
            let matrix = compute_features(&mut run, inputs, snapshot, &config)?;
            run.write("features.csv", matrix.to_csv().as_bytes())?;
            println!("{} snapshots at term {}", matrix.len(), snapshot.ref_term);
            run.finish()
        }
        Command::Experiment(cmd) => experiment_command(cmd, new_run),
        Command::Synth(cmd) => synth_command(cmd, new_run),
        Command::Report(args) => {
            let mut run = new_run("report");
            report(&mut run, args)?;
            run.finish()
        }
    }
}

fn graph_command(cmd: &GraphCommand, new_run: impl Fn(&str) -> Run) -> Result<PathBuf, Failure> {
    match cmd {
        GraphCommand::Validate { curriculum } => {
            let mut run = new_run("graph validate");
            let graph = run.curriculum(curriculum)?;
            let redundant = graph.transitive_redundancy();
            for (from, to) in &redundant {
                log::warn!("prerequisite {from} -> {to} is implied by a longer chain");
            }
            println!(
                "{} courses, {} edges, acyclic",
                graph.len(),
                graph.edge_count()
            );
            run.counts = json!({
                "courses": graph.len(),
                "edges": graph.edge_count(),
                "entries": graph.entries().len(),
                "terminals": graph.terminals().len(),
                "redundant_edges": redundant.len(),
            });
            run.finish()
        }
        GraphCommand::Metrics {
            curriculum,
            criteria,
        } => {
            let mut run = new_run("graph metrics");
            let criteria = criteria.resolve()?;
            let graph = run.curriculum(curriculum)?;
            let table = CentralityTable::compute(&graph, &criteria, EigenvectorOptions::default())?;
            run.config = json!({ "criteria": criteria });
            run.counts = json!({ "courses": table.rows.len() });
            run.write("centrality.csv", table.to_csv().as_bytes())?;
            let modules = module_centrality_summary(&graph, &table.betweenness());
            let mut text = String::from("module,mean_betweenness\n");
            for (m, b) in modules {
                text.push_str(&format!("{m},{b:.6}\n"));
            }
            run.write("modules.csv", text.as_bytes())?;
            let bottlenecks = table.rows.iter().filter(|r| r.is_bottleneck).count();
            println!("{} courses, {} bottlenecks", table.rows.len(), bottlenecks);
            run.finish()
        }
        GraphCommand::Backbone { curriculum } => {
            let mut run = new_run("graph backbone");
            let graph = run.curriculum(curriculum)?;
            let backbone = identify_backbone(&graph, graph.entries(), graph.terminals());
            let codes = graph.set_codes(&backbone);
            run.counts = json!({ "backbone": codes.len() });
            run.write("backbone.txt", lines(&codes).as_bytes())?;
            println!("{}", codes.join(" "));
            run.finish()
        }
        GraphCommand::Bottlenecks {
            curriculum,
            criteria,
        } => {
            let mut run = new_run("graph bottlenecks");
            let criteria = criteria.resolve()?;
            let graph = run.curriculum(curriculum)?;
            let set = identify_bottlenecks(&graph, &betweenness_centrality(&graph), &criteria);
            let codes = graph.set_codes(&set);
            run.config = json!({ "criteria": criteria });
            run.counts = json!({ "bottlenecks": codes.len() });
            run.write("bottlenecks.txt", lines(&codes).as_bytes())?;
            println!("{}", codes.join(" "));
            run.finish()
        }
    }
}

fn lines(codes: &[&str]) -> String {
    codes.iter().map(|c| format!("{c}\n")).collect()
}

fn panel_build(run: &mut Run, inputs: &RawInputs) -> Result<(), Failure> {
    let graph = run.curriculum(&inputs.curriculum)?;
    let records = run.records(&inputs.records)?;
    let profiles = run.profiles(&inputs.profiles)?;
    let panel = build_panel(&records, &profiles, &graph)?.apply_filters();
    let mut text =
        String::from("student_id,term_index,year,half,active,events,approved,is_prediction_row\n");
    for (id, history) in &panel.students {
        for row in &history.rows {
            text.push_str(&format!(
                "{id},{},{},{},{},{},{},{}\n",
                row.term_index,
                row.calendar.year,
                row.calendar.half,
                row.is_active(),
                row.events.len(),
                row.approved.len(),
                row.is_prediction_row
            ));
        }
    }
    run.counts = serde_json::to_value(&panel.counts).map_err(Error::from)?;
    run.write("panel.csv", text.as_bytes())?;
    println!(
        "{} students, {} student-terms, {} prediction rows",
        panel.counts.students, panel.counts.student_terms, panel.counts.prediction_rows
    );
    Ok(())
}

fn compute_features(
    run: &mut Run,
    inputs: &RawInputs,
    snapshot: &SnapshotArgs,
    config: &ExperimentConfig,
) -> Result<FeatureMatrix, Failure> {
    let graph = run.curriculum(&inputs.curriculum)?;
    let records = run.records(&inputs.records)?;
    let profiles = run.profiles(&inputs.profiles)?;
    let (matrix, counts) = assemble_features(
        &graph,
        &records,
        &profiles,
        config,
        &snapshot.window(),
        snapshot.include_censored,
    )?;
    run.config = json!({
        "ref_term": config.ref_term,
        "window_end": snapshot.window_end.map(|t| t.to_string()),
        "include_censored": snapshot.include_censored,
        "criteria": config.criteria,
    });
    run.counts = serde_json::to_value(&counts).map_err(Error::from)?;
    Ok(matrix)
}

fn load_matrix(run: &mut Run, path: &Path) -> Result<FeatureMatrix, Failure> {
    let text = run.read(path)?;
    Ok(FeatureMatrix::from_csv(&text, &path.display().to_string())?)
}

fn experiment_command(
    cmd: &ExperimentCommand,
    new_run: impl Fn(&str) -> Run,
) -> Result<PathBuf, Failure> {
    let (name, args) = match cmd {
        ExperimentCommand::Compare(a) => ("experiment compare", a),
        ExperimentCommand::Ablate(a) => ("experiment ablate", a),
        ExperimentCommand::Importance { args, .. } => ("experiment importance", args),
    };
    let mut run = new_run(name);
    let matrix = load_matrix(&mut run, &args.features)?;
    let config = args.forest.config(5, BottleneckCriteria::default());
    run.seed = Some(config.seed());
    run.config = json!({ "train_fraction": config.train_fraction, "forest": config.forest, "threshold": config.threshold });
    let seed_context = format!("seed {}", config.seed());
    match cmd {
        ExperimentCommand::Compare(_) => {
            write_comparison(&mut run, &matrix, &config, &seed_context)?
        }
        ExperimentCommand::Ablate(_) => write_ablation(&mut run, &matrix, &config, &seed_context)?,
        ExperimentCommand::Importance { top_k, .. } => {
            write_importance(&mut run, &matrix, &config, *top_k, &seed_context)?
        }
    }
    run.finish()
}

fn write_comparison(
    run: &mut Run,
    matrix: &FeatureMatrix,
    config: &ExperimentConfig,
    ctx: &str,
) -> Result<(), Failure> {
    let report = run_comparison(matrix, config).context(ctx)?;
    run.write("comparison.json", report.to_json().as_bytes())?;
    let table = report.to_table();
    run.write("comparison.txt", table.as_bytes())?;
    merge_counts(
        run,
        json!({ "rows": matrix.len(), "train": report.n_train, "test": report.n_test }),
    );
    print!("{table}");
    Ok(())
}

fn write_ablation(
    run: &mut Run,
    matrix: &FeatureMatrix,
    config: &ExperimentConfig,
    ctx: &str,
) -> Result<(), Failure> {
    let report = run_ablation(matrix, config).context(ctx)?;
    run.write("ablation.json", report.to_json().as_bytes())?;
    run.write("ablation_long.csv", report.to_long_csv().as_bytes())?;
    let table = report.to_table();
    run.write("ablation.txt", table.as_bytes())?;
    merge_counts(
        run,
        json!({ "rows": matrix.len(), "ablations": report.rows.len() }),
    );
    print!("{table}");
    Ok(())
}

fn write_importance(
    run: &mut Run,
    matrix: &FeatureMatrix,
    config: &ExperimentConfig,
    top_k: usize,
    ctx: &str,
) -> Result<(), Failure> {
    let model = train_full_model(matrix, config).context(ctx)?;
    let report = report_importance(&model, Some(top_k));
    run.write("importance.csv", report.to_csv().as_bytes())?;
    let table = report.to_table();
    run.write("importance.txt", table.as_bytes())?;
    merge_counts(
        run,
        json!({ "rows": matrix.len(), "importance_rows": report.rows.len() }),
    );
    print!("{table}");
    Ok(())
}

fn merge_counts(run: &mut Run, extra: Value) {
    match (&mut run.counts, extra) {
        (Value::Object(existing), Value::Object(extra)) => existing.extend(extra),
        (slot, extra) => *slot = extra,
    }
}

fn synth_command(cmd: &SynthCommand, new_run: impl Fn(&str) -> Run) -> Result<PathBuf, Failure> {
    match cmd {
        SynthCommand::Curriculum(a) => {
            let mut run = new_run("synth curriculum");
            let params = SynthParams {
                n_courses: a.courses,
                n_modules: a.modules,
                n_layers: a.layers,
                edge_density: a.edge_density,
                promotable_fraction: a.promotable,
                seed: a.seed,
                ..Default::default()
            };
            let doc = generate_curriculum(&params)?;
            run.seed = Some(a.seed);
            run.config = serde_json::to_value(params).map_err(Error::from)?;
            run.counts = json!({ "courses": doc.courses.len(), "edges": doc.prerequisites.len() });
            run.write("curriculum.json", doc.to_json().as_bytes())?;
            println!(
                "{} courses, {} edges",
                doc.courses.len(),
                doc.prerequisites.len()
            );
            run.finish()
        }
        SynthCommand::Cohort(a) => {
            let mut run = new_run("synth cohort");
            let graph = run.curriculum(&a.curriculum)?;
            let params = SynthParams {
                n_students: a.students,
                n_cohorts: a.cohorts,
                first_cohort_year: a.first_year,
                terms_horizon: a.horizon,
                base_pass_probability: a.pass_probability,
                ability_spread: a.ability_spread,
                dropout_base_hazard: a.base_hazard,
                blocked_credits_hazard_coefficient: a.coefficient,
                courses_per_term_mean: a.load,
                gap_probability: a.gap_probability,
                seed: a.seed,
                ..Default::default()
            };
            let cohort = generate_cohort(&graph, &params)?;
            let mut records = Vec::new();
            write_records(&mut records, &cohort.records)?;
            let mut profiles = Vec::new();
            write_profiles(&mut profiles, &cohort.profiles)?;
            run.seed = Some(a.seed);
            run.config = serde_json::to_value(params).map_err(Error::from)?;
            let graduates = cohort
                .profiles
                .iter()
                .filter(|p| p.graduated == Some(true))
                .count();
            run.counts = json!({
                "students": cohort.profiles.len(),
                "records": cohort.records.len(),
                "graduates": graduates,
            });
            run.write("records.csv", &records)?;
            run.write("profiles.csv", &profiles)?;
            println!(
                "{} students, {} records",
                cohort.profiles.len(),
                cohort.records.len()
            );
            run.finish()
        }
    }
}

fn report(run: &mut Run, args: &ReportArgs) -> Result<(), Failure> {
    let criteria = args.criteria.resolve()?;
    let config = args.forest.config(args.snapshot.ref_term, criteria);
    let graph = run.curriculum(&args.inputs.curriculum)?;
    let table = CentralityTable::compute(&graph, &criteria, EigenvectorOptions::default())?;
    run.write("centrality.csv", table.to_csv().as_bytes())?;

    let matrix = compute_features(run, &args.inputs, &args.snapshot, &config)?;
    run.write("features.csv", matrix.to_csv().as_bytes())?;
    run.seed = Some(config.seed());
    run.config = json!({
        "ref_term": config.ref_term,
        "window_end": args.snapshot.window_end.map(|t| t.to_string()),
        "include_censored": args.snapshot.include_censored,
        "criteria": criteria,
        "train_fraction": config.train_fraction,
        "forest": config.forest,
        "threshold": config.threshold,
        "top_k": args.top_k,
    });
    let ctx = format!("seed {}", config.seed());
    write_comparison(run, &matrix, &config, &ctx)?;
    write_importance(run, &matrix, &config, args.top_k, &ctx)?;
    write_ablation(run, &matrix, &config, &ctx)?;
    Ok(())
}
