//! Bagged CART classifier with Gini splits, balanced class weights and
//! mean-decrease-in-impurity importances, plus the evaluation metrics.
//!
//! Trees are grown from per-tree ChaCha streams of the master seed, so a
//! model depends only on (data, config) and never on thread scheduling.

use log::warn;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column-major feature matrix with binary labels (true = dropout).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    labels: Vec<bool>,
}

impl Dataset {
    /// Missing (non-finite) values are replaced by 0 and counted in a warning.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<f64>], labels: Vec<bool>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut columns = vec![Vec::with_capacity(rows.len()); names.len()];
        let mut imputed = 0usize;
        for row in rows {
            if row.len() != names.len() {
                return Err(Error::WidthMismatch {
                    expected: names.len(),
                    got: row.len(),
                });
            }
            for (col, &v) in columns.iter_mut().zip(row) {
                if v.is_finite() {
                    col.push(v);
                } else {
                    imputed += 1;
                    col.push(0.0);
                }
            }
        }
        if imputed > 0 {
            warn!("dataset: {imputed} missing values imputed as 0");
        }
        Ok(Dataset {
            names,
            columns,
            labels,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|i| self.row(i)).collect()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Dataset {
        Dataset {
            names: self.names.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| idx.iter().map(|&i| c[i]).collect())
                .collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Keep the named columns, in the given order.
    pub fn select_columns<S: AsRef<str>>(&self, names: &[S]) -> Result<Dataset> {
        let mut columns = Vec::with_capacity(names.len());
        for name in names {
            let j = self
                .names
                .iter()
                .position(|n| n == name.as_ref())
                .ok_or_else(|| Error::MissingColumn(name.as_ref().to_string()))?;
            columns.push(self.columns[j].clone());
        }
        Ok(Dataset {
            names: names.iter().map(|n| n.as_ref().to_string()).collect(),
            columns,
            labels: self.labels.clone(),
        })
    }

    pub fn without_column(&self, name: &str) -> Result<Dataset> {
        if !self.names.iter().any(|n| n == name) {
            return Err(Error::MissingColumn(name.to_string()));
        }
        let keep: Vec<&String> = self.names.iter().filter(|n| *n != name).collect();
        self.select_columns(&keep)
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l).count();
        (self.labels.len() - pos, pos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeight {
    /// n / (2 · n_class), from the original training set.
    Balanced,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    Sqrt,
    All,
    Fixed(usize),
}

impl MaxFeatures {
    fn resolve(self, p: usize) -> usize {
        let k = match self {
            MaxFeatures::Sqrt => (p as f64).sqrt().floor() as usize,
            MaxFeatures::All => p,
            MaxFeatures::Fixed(k) => k,
        };
        k.clamp(1, p.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub class_weight: ClassWeight,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 500,
            max_depth: None,
            min_samples_split: 2,
            class_weight: ClassWeight::Balanced,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidArgument("n_trees must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::InvalidArgument(
                "min_samples_split must be >= 2".into(),
            ));
        }
        if let MaxFeatures::Fixed(0) = self.max_features {
            return Err(Error::InvalidArgument("max_features must be >= 1".into()));
        }
        Ok(())
    }
}

const LEAF: i32 = -1;

/// Flattened binary tree; node 0 is the root. A row goes left when
/// `x[feature] <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub feature: Vec<i32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    /// Weighted positive-class fraction.
    pub value: Vec<f64>,
    /// Weighted Gini impurity.
    pub impurity: Vec<f64>,
    /// Total sample weight reaching the node.
    pub weight: Vec<f64>,
}

impl Tree {
    fn empty() -> Self {
        Tree {
            feature: Vec::new(),
            threshold: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            value: Vec::new(),
            impurity: Vec::new(),
            weight: Vec::new(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.feature.len()
    }

    fn push_leaf(&mut self, value: f64, impurity: f64, weight: f64) -> usize {
        self.feature.push(LEAF);
        self.threshold.push(0.0);
        self.left.push(0);
        self.right.push(0);
        self.value.push(value);
        self.impurity.push(impurity);
        self.weight.push(weight);
        self.feature.len() - 1
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut node = 0usize;
        while self.feature[node] != LEAF {
            let f = self.feature[node] as usize;
            node = if row[f] <= self.threshold[node] {
                self.left[node] as usize
            } else {
                self.right[node] as usize
            };
        }
        self.value[node]
    }

    /// Unnormalised impurity decrease per feature, each split weighted by the
    /// fraction of root weight reaching it.
    pub fn impurity_decrease(&self, n_features: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_features];
        if self.n_nodes() == 0 {
            return out;
        }
        let root = self.weight[0];
        for node in 0..self.n_nodes() {
            if self.feature[node] == LEAF {
                continue;
            }
            let (l, r) = (self.left[node] as usize, self.right[node] as usize);
            let decrease = self.weight[node] * self.impurity[node]
                - self.weight[l] * self.impurity[l]
                - self.weight[r] * self.impurity[r];
            out[self.feature[node] as usize] += decrease / root;
        }
        out
    }

    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, node: usize) -> usize {
            if t.feature[node] == LEAF {
                0
            } else {
                1 + walk(t, t.left[node] as usize).max(walk(t, t.right[node] as usize))
            }
        }
        if self.n_nodes() == 0 {
            0
        } else {
            walk(self, 0)
        }
    }
}

fn gini(pos: f64, total: f64) -> f64 {
    if total <= 0.0 {
        return 0.0;
    }
    let p = pos / total;
    2.0 * p * (1.0 - p)
}

/// Parameters for growing a single tree.
#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
}

struct Grower<'a> {
    data: &'a Dataset,
    weights: &'a [f64],
    /// Columns not constant over the training set.
    pool: Vec<usize>,
    max_features: usize,
    params: TreeParams,
}

#[derive(Clone, Copy)]
struct Candidate {
    child_impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        (self.child_impurity, self.feature)
            .partial_cmp(&(other.child_impurity, other.feature))
            .map(|o| o.is_lt() || (o.is_eq() && self.threshold < other.threshold))
            .unwrap_or(false)
    }
}

impl<'a> Grower<'a> {
    fn new(data: &'a Dataset, weights: &'a [f64], params: TreeParams) -> Self {
        let pool: Vec<usize> = (0..data.n_features())
            .filter(|&j| {
                let col = data.column(j);
                col.iter().any(|&v| v != col[0])
            })
            .collect();
        let max_features = params.max_features.resolve(pool.len());
        Grower {
            data,
            weights,
            pool,
            max_features,
            params,
        }
    }

    fn grow(&self, samples: Vec<usize>, rng: &mut ChaCha8Rng) -> Tree {
        let mut tree = Tree::empty();
        // (node id, samples, depth)
        let mut stack: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let root = self.make_node(&mut tree, &samples);
        stack.push((root, samples, 0));
        while let Some((node, samples, depth)) = stack.pop() {
            if tree.impurity[node] == 0.0
                || samples.len() < self.params.min_samples_split
                || self.params.max_depth.is_some_and(|d| depth >= d)
            {
                continue;
            }
            let Some(best) = self.best_split(&samples, rng) else {
                continue;
            };
            let column = self.data.column(best.feature);
            let (left, right): (Vec<usize>, Vec<usize>) =
                samples.iter().partition(|&&i| column[i] <= best.threshold);
            let l = self.make_node(&mut tree, &left);
            let r = self.make_node(&mut tree, &right);
            tree.feature[node] = best.feature as i32;
            tree.threshold[node] = best.threshold;
            tree.left[node] = l as u32;
            tree.right[node] = r as u32;
            // right pushed first so the left subtree is expanded first
            stack.push((r, right, depth + 1));
            stack.push((l, left, depth + 1));
        }
        tree
    }

    fn make_node(&self, tree: &mut Tree, samples: &[usize]) -> usize {
        let labels = self.data.labels();
        let (mut total, mut pos) = (0.0, 0.0);
        for &i in samples {
            total += self.weights[i];
            if labels[i] {
                pos += self.weights[i];
            }
        }
        let value = if total > 0.0 { pos / total } else { 0.0 };
        let impurity = if pos == 0.0 || pos == total {
            0.0
        } else {
            gini(pos, total)
        };
        tree.push_leaf(value, impurity, total)
    }

    /// Visits pool features in a random order. Features constant within the
    /// node do not count towards `max_features`.
    fn best_split(&self, samples: &[usize], rng: &mut ChaCha8Rng) -> Option<Candidate> {
        let mut order = self.pool.clone();
        let mut best: Option<Candidate> = None;
        let mut evaluated = 0usize;
        for k in 0..order.len() {
            if evaluated == self.max_features {
                break;
            }
            let j = rng.gen_range(k..order.len());
            order.swap(k, j);
            let feature = order[k];
            if let Some(candidate) = self.evaluate_feature(feature, samples) {
                evaluated += 1;
                if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
                    best = Some(candidate);
                }
            }
        }
        best
    }

    /// Best threshold of one feature, `None` when it is constant on the node.
    fn evaluate_feature(&self, feature: usize, samples: &[usize]) -> Option<Candidate> {
        let column = self.data.column(feature);
        let labels = self.data.labels();
        let mut sorted: Vec<(f64, f64, bool)> = samples
            .iter()
            .map(|&i| (column[i], self.weights[i], labels[i]))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted.first()?.0 == sorted.last()?.0 {
            return None;
        }
        let total: f64 = sorted.iter().map(|s| s.1).sum();
        let total_pos: f64 = sorted.iter().filter(|s| s.2).map(|s| s.1).sum();
        let (mut left_w, mut left_pos) = (0.0, 0.0);
        let mut best: Option<Candidate> = None;
        for i in 0..sorted.len() - 1 {
            left_w += sorted[i].1;
            if sorted[i].2 {
                left_pos += sorted[i].1;
            }
            let (v, next) = (sorted[i].0, sorted[i + 1].0);
            if v == next {
                continue;
            }
            let right_w = total - left_w;
            let right_pos = total_pos - left_pos;
            let child_impurity =
                left_w * gini(left_pos, left_w) + right_w * gini(right_pos, right_w);
            let mut threshold = v + (next - v) / 2.0;
            if threshold >= next || threshold < v {
                threshold = v;
            }
            let candidate = Candidate {
                child_impurity,
                feature,
                threshold,
            };
            if best.as_ref().is_none_or(|b| candidate.better_than(b)) {
                best = Some(candidate);
            }
        }
        best
    }
}

/// A single CART tree on every row with unit bootstrap multiplicity.
pub fn fit_tree(
    data: &Dataset,
    class_weight: ClassWeight,
    params: TreeParams,
    seed: u64,
) -> Result<Tree> {
    let weights = class_weights(data, class_weight)?;
    let grower = Grower::new(data, &weights, params);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(grower.grow((0..data.n_rows()).collect(), &mut rng))
}

fn class_weights(data: &Dataset, class_weight: ClassWeight) -> Result<Vec<f64>> {
    let (neg, pos) = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let n = data.n_rows() as f64;
    let (w_neg, w_pos) = match class_weight {
        ClassWeight::Balanced => (n / (2.0 * neg as f64), n / (2.0 * pos as f64)),
        ClassWeight::None => (1.0, 1.0),
    };
    Ok(data
        .labels()
        .iter()
        .map(|&l| if l { w_pos } else { w_neg })
        .collect())
}

/// Tree `t` draws from stream `t + 1` of the master seed.
fn tree_rng(seed: u64, tree_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree_index as u64 + 1);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub config: ForestConfig,
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
}

/// Train a forest. Trees are grown in parallel on the current rayon pool.
pub fn train(data: &Dataset, config: &ForestConfig) -> Result<ForestModel> {
    config.validate()?;
    let base_weights = class_weights(data, config.class_weight)?;
    let params = TreeParams {
        max_depth: config.max_depth,
        min_samples_split: config.min_samples_split,
        max_features: config.max_features,
    };
    let n = data.n_rows();
    let trees: Vec<Tree> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(config.seed, t);
            let (weights, samples) = if config.bootstrap {
                let mut counts = vec![0u32; n];
                for _ in 0..n {
                    counts[rng.gen_range(0..n)] += 1;
                }
                let weights: Vec<f64> = counts
                    .iter()
                    .zip(&base_weights)
                    .map(|(&c, &w)| c as f64 * w)
                    .collect();
                let samples = (0..n).filter(|&i| counts[i] > 0).collect();
                (weights, samples)
            } else {
                (base_weights.clone(), (0..n).collect())
            };
            Grower::new(data, &weights, params).grow(samples, &mut rng)
        })
        .collect();
    Ok(ForestModel {
        config: *config,
        feature_names: data.names().to_vec(),
        trees,
    })
}

impl ForestModel {
    pub fn predict_proba(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let p = self.feature_names.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(Error::WidthMismatch {
                expected: p,
                got: bad.len(),
            });
        }
        Ok(rows
            .par_iter()
            .map(|row| {
                let sum: f64 = self.trees.iter().map(|t| t.predict_row(row)).sum();
                sum / self.trees.len() as f64
            })
            .collect())
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.names() != self.feature_names.as_slice() {
            return Err(Error::WidthMismatch {
                expected: self.feature_names.len(),
                got: data.n_features(),
            });
        }
        self.predict_proba(&data.rows())
    }

    /// MDI per feature, normalised to sum to 1, sorted descending with ties
    /// broken by name.
    pub fn feature_importance(&self) -> Vec<(String, f64)> {
        let p = self.feature_names.len();
        let mut total = vec![0.0; p];
        for tree in &self.trees {
            for (acc, d) in total.iter_mut().zip(tree.impurity_decrease(p)) {
                *acc += d;
            }
        }
        let n = self.trees.len().max(1) as f64;
        for v in &mut total {
            *v /= n;
        }
        let sum: f64 = total.iter().sum();
        if sum > 0.0 {
            for v in &mut total {
                *v /= sum;
            }
        }
        let mut ranked: Vec<(String, f64)> =
            self.feature_names.iter().cloned().zip(total).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Train/test row indices, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Per-class seeded shuffle, then a proportional cut. Each class sends
/// floor(fraction · n_class) rows to training; leftover rows go to training
/// one per class, largest fractional remainder first, until the training
/// set reaches round(fraction · n).
pub fn stratified_split(labels: &[bool], train_fraction: f64, seed: u64) -> Result<Split> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let mut classes: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, &l) in labels.iter().enumerate() {
        classes[usize::from(l)].push(i);
    }
    for (c, name) in [(0, "persist"), (1, "dropout")] {
        if classes[c].len() < 2 {
            return Err(Error::ClassTooSmall {
                class: name,
                count: classes[c].len(),
            });
        }
    }
    const EPS: f64 = 1e-9;
    let exact: Vec<f64> = classes
        .iter()
        .map(|c| train_fraction * c.len() as f64)
        .collect();
    let mut take: Vec<usize> = exact.iter().map(|&x| (x + EPS).floor() as usize).collect();
    let target = (train_fraction * labels.len() as f64 + EPS).round() as usize;
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| {
        let fa = exact[a] - take[a] as f64;
        let fb = exact[b] - take[b] as f64;
        fb.total_cmp(&fa).then(b.cmp(&a))
    });
    for &c in &order {
        if take.iter().sum::<usize>() >= target {
            break;
        }
        if take[c] < classes[c].len() && exact[c] - (take[c] as f64) > EPS {
            take[c] += 1;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (c, members) in classes.iter_mut().enumerate() {
        members.shuffle(&mut rng);
        train.extend_from_slice(&members[..take[c]]);
        test.extend_from_slice(&members[take[c]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub f1: f64,
    /// `None` when the labels hold a single class.
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn from_scores(scores: &[f64], labels: &[bool], threshold: f64) -> Self {
        let mut c = Confusion::default();
        for (&s, &l) in scores.iter().zip(labels) {
            match (s >= threshold, l) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        c
    }

    fn div(a: usize, b: usize) -> f64 {
        if b == 0 {
            0.0
        } else {
            a as f64 / b as f64
        }
    }

    pub fn accuracy(&self) -> f64 {
        Self::div(self.tp + self.tn, self.tp + self.tn + self.fp + self.fn_)
    }

    pub fn balanced_accuracy(&self) -> f64 {
        (Self::div(self.tp, self.tp + self.fn_) + Self::div(self.tn, self.tn + self.fp)) / 2.0
    }

    pub fn f1(&self) -> f64 {
        let precision = Self::div(self.tp, self.tp + self.fp);
        let recall = Self::div(self.tp, self.tp + self.fn_);
        if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        }
    }
}

/// Mann-Whitney AUC: share of (positive, negative) pairs where the positive
/// scores higher, ties counted half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let mut pairs: Vec<(f64, bool)> = scores.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n_pos = labels.iter().filter(|&&l| l).count() as u64;
    let n_neg = labels.len() as u64 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::AucUndefined);
    }
    // in half-pair units, so the count stays an exact integer
    let mut half_wins: u64 = 0;
    let mut negatives_below: u64 = 0;
    let mut i = 0;
    while i < pairs.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u64, 0u64);
        while j < pairs.len() && pairs[j].0 == pairs[i].0 {
            if pairs[j].1 {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        half_wins += 2 * pos * negatives_below + pos * neg;
        negatives_below += neg;
        i = j;
    }
    Ok(half_wins as f64 / (2 * n_pos * n_neg) as f64)
}

pub fn evaluate(scores: &[f64], labels: &[bool], threshold: f64) -> Result<Metrics> {
    if scores.len() != labels.len() || scores.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let c = Confusion::from_scores(scores, labels, threshold);
    Ok(Metrics {
        accuracy: c.accuracy(),
        balanced_accuracy: c.balanced_accuracy(),
        f1: c.f1(),
        auc: roc_auc(scores, labels).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[[f64; 2]], labels: &[bool]) -> Dataset {
        Dataset::from_rows(
            vec!["x".into(), "y".into()],
            &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(),
            labels.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(0.0, 4.0), 0.0);
        assert_eq!(gini(4.0, 4.0), 0.0);
        assert_eq!(gini(2.0, 4.0), 0.5);
    }

    #[test]
    fn confusion_example() {
        // TP=4, FN=1, TN=3, FP=2
        let mut scores = vec![0.9; 4];
        let mut labels = vec![true; 4];
        scores.push(0.1);
        labels.push(true);
        scores.extend([0.2; 3]);
        labels.extend([false; 3]);
        scores.extend([0.8; 2]);
        labels.extend([false; 2]);
        let m = evaluate(&scores, &labels, 0.5).unwrap();
        assert!((m.accuracy - 0.7).abs() < 1e-12);
        assert!((m.balanced_accuracy - 0.7).abs() < 1e-12);
        let p = 4.0 / 6.0;
        let r = 4.0 / 5.0;
        assert!((m.f1 - 2.0 * p * r / (p + r)).abs() < 1e-12);
        assert!((m.f1 - 0.727_272_727_272_727_3).abs() < 1e-12);
    }

    #[test]
    fn auc_edge_cases() {
        assert_eq!(
            roc_auc(&[0.1, 0.2, 0.8, 0.9], &[false, false, true, true]).unwrap(),
            1.0
        );
        assert_eq!(
            roc_auc(&[0.5; 4], &[false, true, false, true]).unwrap(),
            0.5
        );
        assert!(matches!(
            roc_auc(&[0.1, 0.2], &[true, true]),
            Err(Error::AucUndefined)
        ));
        let m = evaluate(&[0.1, 0.9], &[true, true], 0.5).unwrap();
        assert_eq!(m.auc, None);
        assert_eq!(m.accuracy, 0.5);
    }

    #[test]
    fn split_examples() {
        let labels: Vec<bool> = (0..10).map(|i| i % 2 == 0).collect();
        let s = stratified_split(&labels, 0.8, 3).unwrap();
        assert_eq!(s.train.len(), 8);
        assert_eq!(s.test.len(), 2);
        assert_eq!(s.test.iter().filter(|&&i| labels[i]).count(), 1);
        assert_eq!(s, stratified_split(&labels, 0.8, 3).unwrap());
        assert!(matches!(
            stratified_split(&[true, false, false], 0.8, 1),
            Err(Error::ClassTooSmall {
                class: "dropout",
                count: 1
            })
        ));
    }

    #[test]
    fn split_821_rows() {
        for pos in [100usize, 164, 250, 333, 410] {
            let labels: Vec<bool> = (0..821).map(|i| i < pos).collect();
            let s = stratified_split(&labels, 0.8, 11).unwrap();
            assert!(
                s.train.len() == 656 || s.train.len() == 657,
                "{}",
                s.train.len()
            );
            assert_eq!(s.train.len() + s.test.len(), 821);
            let train_pos = s.train.iter().filter(|&&i| labels[i]).count() as f64;
            assert!((train_pos - 0.8 * pos as f64).abs() <= 1.0);
        }
    }

    #[test]
    fn separable_toy_set_is_interpolated() {
        let rows: Vec<[f64; 2]> = (0..20)
            .map(|i| {
                [
                    i as f64,
                    (i * 3 % 7) as f64 + if i >= 10 { 10.0 } else { 0.0 },
                ]
            })
            .collect();
        let labels: Vec<bool> = (0..20).map(|i| i >= 10).collect();
        let data = ds(&rows, &labels);
        let config = ForestConfig {
            n_trees: 50,
            seed: 4,
            ..Default::default()
        };
        let model = train(&data, &config).unwrap();
        let scores = model.predict_dataset(&data).unwrap();
        let m = evaluate(&scores, data.labels(), 0.5).unwrap();
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn single_tree_forest_matches_cart() {
        let rows: Vec<[f64; 2]> = (0..40)
            .map(|i| [(i * 7 % 13) as f64, (i * 5 % 11) as f64])
            .collect();
        let labels: Vec<bool> = (0..40)
            .map(|i| (i * 7 % 13 + i * 5 % 11) % 3 == 0)
            .collect();
        let data = ds(&rows, &labels);
        let config = ForestConfig {
            n_trees: 1,
            bootstrap: false,
            max_features: MaxFeatures::All,
            seed: 99,
            ..Default::default()
        };
        let forest = train(&data, &config).unwrap();
        let params = TreeParams {
            max_depth: None,
            min_samples_split: 2,
            max_features: MaxFeatures::All,
        };
        let tree = fit_tree(&data, ClassWeight::Balanced, params, 12345).unwrap();
        let a = forest.predict_dataset(&data).unwrap();
        let b: Vec<f64> = data.rows().iter().map(|r| tree.predict_row(r)).collect();
        assert_eq!(a, b);
        assert_eq!(forest.trees[0], tree);
    }

    #[test]
    fn stump_importance() {
        let data = ds(
            &[[0.0, 5.0], [1.0, 5.0], [2.0, 5.0], [3.0, 5.0]],
            &[false, false, true, true],
        );
        let model = train(
            &data,
            &ForestConfig {
                n_trees: 1,
                bootstrap: false,
                seed: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let imp = model.feature_importance();
        assert_eq!(imp, vec![("x".to_string(), 1.0), ("y".to_string(), 0.0)]);
        assert_eq!(model.trees[0].n_nodes(), 3);
        assert_eq!(model.trees[0].threshold[0], 1.5);
    }

    #[test]
    fn hand_built_tree_importance() {
        // root splits on a (weighted decrease 0.3), its left child on b (0.1)
        let tree = Tree {
            feature: vec![0, 1, LEAF, LEAF, LEAF],
            threshold: vec![0.5, 0.5, 0.0, 0.0, 0.0],
            left: vec![1, 3, 0, 0, 0],
            right: vec![2, 4, 0, 0, 0],
            value: vec![0.5; 5],
            impurity: vec![0.5, 0.4, 0.0, 0.2, 0.2],
            weight: vec![1.0, 0.5, 0.5, 0.25, 0.25],
        };
        let dec = tree.impurity_decrease(2);
        assert!((dec[0] - 0.3).abs() < 1e-12);
        assert!((dec[1] - 0.1).abs() < 1e-12);
        let model = ForestModel {
            config: ForestConfig::default(),
            feature_names: vec!["a".into(), "b".into()],
            trees: vec![tree],
        };
        let imp = model.feature_importance();
        assert_eq!(imp[0].0, "a");
        assert!((imp[0].1 - 0.75).abs() < 1e-12);
        assert!((imp[1].1 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn predict_width_and_vote_average() {
        let data = ds(
            &[[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]],
            &[false, true, false, true],
        );
        let model = train(
            &data,
            &ForestConfig {
                n_trees: 3,
                seed: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            model.predict_proba(&[vec![1.0]]),
            Err(Error::WidthMismatch {
                expected: 2,
                got: 1
            })
        ));
        let leaf = |v: f64| Tree {
            feature: vec![LEAF],
            threshold: vec![0.0],
            left: vec![0],
            right: vec![0],
            value: vec![v],
            impurity: vec![0.0],
            weight: vec![1.0],
        };
        let votes = ForestModel {
            config: ForestConfig::default(),
            feature_names: vec!["x".into()],
            trees: vec![leaf(1.0), leaf(0.0)],
        };
        assert_eq!(votes.predict_proba(&[vec![3.0]]).unwrap(), vec![0.5]);
    }

    #[test]
    fn training_errors() {
        let data = ds(&[[0.0, 0.0], [1.0, 1.0]], &[true, true]);
        assert!(matches!(
            train(&data, &ForestConfig::default()),
            Err(Error::SingleClass)
        ));
        let ok = ds(&[[0.0, 0.0], [1.0, 1.0]], &[true, false]);
        let bad = ForestConfig {
            n_trees: 0,
            ..Default::default()
        };
        assert!(train(&ok, &bad).is_err());
        let bad = ForestConfig {
            min_samples_split: 1,
            ..Default::default()
        };
        assert!(train(&ok, &bad).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let data = ds(
            &[[0.1, 0.7], [1.3, 1.1], [0.2, 1.9], [1.7, 0.3], [0.9, 0.4]],
            &[false, true, false, true, true],
        );
        let model = train(
            &data,
            &ForestConfig {
                n_trees: 4,
                seed: 8,
                ..Default::default()
            },
        )
        .unwrap();
        let back = ForestModel::from_json(&model.to_json()).unwrap();
        assert_eq!(back, model);
    }

    #[test]
    fn missing_values_are_imputed() {
        let data = Dataset::from_rows(
            vec!["a".into()],
            &[vec![f64::NAN], vec![2.0]],
            vec![true, false],
        )
        .unwrap();
        assert_eq!(data.column(0), &[0.0, 2.0]);
    }
}
