//! Cosine K-nearest-neighbor classification and the (features × K) sweep.

use std::cmp::Ordering;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Task};
use crate::error::{Error, Result};
use crate::text::{FeatureUnit, TokenizedDoc};
use crate::vsm::{self, FeatureSet};

/// Neighbor counts compared during model selection.
pub const DEFAULT_K_VALUES: [usize; 10] = [1, 2, 3, 4, 5, 10, 15, 20, 25, 50];

/// 500, 1000, ..., 30000.
pub fn default_feature_counts() -> Vec<usize> {
    (1..=60).map(|i| i * 500).collect()
}

/// Term counts of a document: `(feature index, count)` in index order.
pub type Counts = Vec<(u32, u32)>;

/// Stored training documents for one task.
///
/// Documents are kept as integer term counts, so neighbor ranking compares
/// cosines exactly: `a` outranks `b` when `dot_a² · |b|² > dot_b² · |a|²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "KnnRepr", into = "KnnRepr")]
pub struct KnnModel {
    task: Task,
    unit: FeatureUnit,
    features: FeatureSet,
    counts: Vec<Counts>,
    labels: Vec<usize>,
    k: usize,
    // derived
    class_counts: Vec<u64>,
    sq_norms: Vec<u64>,
    postings: Vec<Vec<(u32, u32)>>,
}

#[derive(Serialize, Deserialize)]
struct KnnRepr {
    task: Task,
    unit: FeatureUnit,
    features: FeatureSet,
    counts: Vec<Counts>,
    labels: Vec<usize>,
    k: usize,
}

impl From<KnnRepr> for KnnModel {
    fn from(r: KnnRepr) -> Self {
        KnnModel::assemble(r.task, r.unit, r.features, r.counts, r.labels, r.k)
    }
}

impl From<KnnModel> for KnnRepr {
    fn from(m: KnnModel) -> Self {
        KnnRepr {
            task: m.task,
            unit: m.unit,
            features: m.features,
            counts: m.counts,
            labels: m.labels,
            k: m.k,
        }
    }
}

/// Fits on `train` using token features.
pub fn knn_fit(train: &Corpus, task: Task, fs: &FeatureSet, k: usize) -> Result<KnnModel> {
    let labels = train.task_labels(task)?;
    let docs = vsm::tokenize_corpus(train, FeatureUnit::Token);
    KnnModel::fit(&docs, &labels, task, fs, k, FeatureUnit::Token)
}

/// Predicted class index of `doc`.
pub fn knn_predict(model: &KnnModel, doc: &TokenizedDoc) -> usize {
    model.predict(doc)
}

fn sq_norm(counts: &[(u32, u32)]) -> u64 {
    counts.iter().map(|&(_, c)| c as u64 * c as u64).sum()
}

/// Cosine of a query against one training item, given their dot product
/// and squared norms.
pub fn cosine_from_counts(dot: u64, q_sq: u64, t_sq: u64) -> f64 {
    if dot == 0 || q_sq == 0 || t_sq == 0 {
        return 0.0;
    }
    (dot as f64 / ((q_sq as f64) * (t_sq as f64)).sqrt()).min(1.0)
}

/// Exact comparison of `dot_a / sqrt(n_a)` against `dot_b / sqrt(n_b)`.
fn cmp_cosine(dot_a: u64, n_a: u64, dot_b: u64, n_b: u64) -> Ordering {
    match (dot_a == 0 || n_a == 0, dot_b == 0 || n_b == 0) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => {
            let lhs = (dot_a as u128) * (dot_a as u128) * (n_b as u128);
            let rhs = (dot_b as u128) * (dot_b as u128) * (n_a as u128);
            lhs.cmp(&rhs)
        }
    }
}

impl KnnModel {
    pub fn fit(
        docs: &[TokenizedDoc],
        labels: &[usize],
        task: Task,
        fs: &FeatureSet,
        k: usize,
        unit: FeatureUnit,
    ) -> Result<KnnModel> {
        if docs.is_empty() {
            return Err(Error::Empty("KNN training set"));
        }
        if docs.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: docs.len(),
                actual: labels.len(),
            });
        }
        if k == 0 || k > docs.len() {
            return Err(Error::InvalidArgument(format!(
                "K = {k} outside 1..={}",
                docs.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= task.n_classes()) {
            return Err(Error::InvalidArgument(format!("class {bad} invalid for {task}")));
        }
        let counts = docs.par_iter().map(|d| vsm::term_counts(d, fs)).collect();
        Ok(KnnModel::assemble(
            task,
            unit,
            fs.clone(),
            counts,
            labels.to_vec(),
            k,
        ))
    }

    fn assemble(
        task: Task,
        unit: FeatureUnit,
        features: FeatureSet,
        counts: Vec<Counts>,
        labels: Vec<usize>,
        k: usize,
    ) -> KnnModel {
        let mut class_counts = vec![0u64; task.n_classes()];
        for &y in &labels {
            class_counts[y] += 1;
        }
        let sq_norms = counts.iter().map(|c| sq_norm(c)).collect();
        let mut postings = vec![Vec::new(); features.len()];
        for (d, doc) in counts.iter().enumerate() {
            for &(i, c) in doc {
                postings[i as usize].push((d as u32, c));
            }
        }
        KnnModel {
            task,
            unit,
            features,
            counts,
            labels,
            k,
            class_counts,
            sq_norms,
            postings,
        }
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn unit(&self) -> FeatureUnit {
        self.unit
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    /// Number of stored training items.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Term counts of every training item.
    pub fn train_counts(&self) -> &[Counts] {
        &self.counts
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Same model with a different K.
    pub fn with_k(&self, k: usize) -> Result<KnnModel> {
        if k == 0 || k > self.len() {
            return Err(Error::InvalidArgument(format!(
                "K = {k} outside 1..={}",
                self.len()
            )));
        }
        Ok(KnnModel { k, ..self.clone() })
    }

    /// Term counts of `doc` over this model's features.
    pub fn query_counts(&self, doc: &TokenizedDoc) -> Counts {
        vsm::term_counts(doc, &self.features)
    }

    /// Dot products with every training item, plus the list of items with a
    /// non-zero dot product.
    fn dots(&self, query: &[(u32, u32)]) -> (Vec<u64>, Vec<u32>) {
        let mut dots = vec![0u64; self.len()];
        let mut touched = Vec::new();
        for &(i, q) in query {
            for &(d, t) in &self.postings[i as usize] {
                let slot = &mut dots[d as usize];
                if *slot == 0 {
                    touched.push(d);
                }
                *slot += q as u64 * t as u64;
            }
        }
        (dots, touched)
    }

    /// Cosine similarity of `query` to every training item.
    pub fn similarities(&self, query: &[(u32, u32)]) -> Vec<f64> {
        let q_sq = sq_norm(query);
        let (dots, _) = self.dots(query);
        dots.iter()
            .zip(&self.sq_norms)
            .map(|(&dot, &t_sq)| cosine_from_counts(dot, q_sq, t_sq))
            .collect()
    }

    /// Indices and similarities of the `k` most similar training items, most
    /// similar first; equal cosines go to the lower training index.
    pub fn neighbors(&self, query: &[(u32, u32)], k: usize) -> Vec<(usize, f64)> {
        let k = k.min(self.len());
        if k == 0 {
            return Vec::new();
        }
        let q_sq = sq_norm(query);
        let (dots, mut ranked) = self.dots(query);
        let order = |a: &u32, b: &u32| {
            let (a, b) = (*a as usize, *b as usize);
            cmp_cosine(dots[b], self.sq_norms[b], dots[a], self.sq_norms[a]).then(a.cmp(&b))
        };
        if ranked.len() > k {
            ranked.select_nth_unstable_by(k - 1, order);
            ranked.truncate(k);
        }
        ranked.sort_unstable_by(order);
        let mut out: Vec<(usize, f64)> = ranked
            .iter()
            .map(|&d| {
                let d = d as usize;
                (d, cosine_from_counts(dots[d], q_sq, self.sq_norms[d]))
            })
            .collect();
        // the rest all have cosine 0, so they follow in index order
        let mut d = 0;
        while out.len() < k {
            if dots[d] == 0 {
                out.push((d, 0.0));
            }
            d += 1;
        }
        out
    }

    pub fn predict_counts(&self, query: &[(u32, u32)]) -> usize {
        let nn = self.neighbors(query, self.k);
        vote(&nn, &self.labels, &self.class_counts, self.task)
    }

    pub fn predict(&self, doc: &TokenizedDoc) -> usize {
        self.predict_counts(&self.query_counts(doc))
    }

    pub fn predict_text(&self, text: &str) -> usize {
        self.predict(&TokenizedDoc::with_unit("", text, self.unit))
    }

    pub fn predict_docs(&self, docs: &[TokenizedDoc]) -> Vec<usize> {
        docs.par_iter().map(|d| self.predict(d)).collect()
    }
}

/// Majority label among ranked neighbors. Ties: larger summed similarity,
/// then larger training prior, then lexicographically smaller class name.
fn vote(neighbors: &[(usize, f64)], labels: &[usize], class_counts: &[u64], task: Task) -> usize {
    let n_classes = class_counts.len();
    let mut votes = vec![0usize; n_classes];
    let mut mass = vec![0.0f64; n_classes];
    for &(i, s) in neighbors {
        votes[labels[i]] += 1;
        mass[labels[i]] += s;
    }
    (0..n_classes)
        .max_by(|&a, &b| {
            votes[a]
                .cmp(&votes[b])
                .then(mass[a].total_cmp(&mass[b]))
                .then(class_counts[a].cmp(&class_counts[b]))
                .then(task.class_name(b).cmp(task.class_name(a)))
        })
        .expect("at least one class")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    /// Number of selected features.
    pub n: usize,
    pub k: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub task: Task,
    pub k_values: Vec<usize>,
    pub feature_counts: Vec<usize>,
    /// Ordered by `n`, then `k`.
    pub cells: Vec<SweepCell>,
    pub best: SweepCell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k_values: Vec<usize>,
    pub feature_counts: Vec<usize>,
    pub unit: FeatureUnit,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            k_values: DEFAULT_K_VALUES.to_vec(),
            feature_counts: default_feature_counts(),
            unit: FeatureUnit::Token,
        }
    }
}

/// Sweep over the default grid, scoring accuracy on `dev`.
pub fn knn_sweep(train: &Corpus, dev: &Corpus, task: Task) -> Result<SweepGrid> {
    knn_sweep_with(train, dev, task, &SweepConfig::default())
}

pub fn knn_sweep_with(train: &Corpus, dev: &Corpus, task: Task, config: &SweepConfig) -> Result<SweepGrid> {
    let train_labels = train.task_labels(task)?;
    let dev_labels = dev.task_labels(task)?;
    let train_docs = vsm::tokenize_corpus(train, config.unit);
    let dev_docs = vsm::tokenize_corpus(dev, config.unit);
    sweep_docs(&train_docs, &train_labels, &dev_docs, &dev_labels, task, config)
}

/// Grid evaluation over pre-tokenized documents. K values larger than the
/// training set are left out of the grid.
pub fn sweep_docs(
    train_docs: &[TokenizedDoc],
    train_labels: &[usize],
    dev_docs: &[TokenizedDoc],
    dev_labels: &[usize],
    task: Task,
    config: &SweepConfig,
) -> Result<SweepGrid> {
    if dev_docs.is_empty() {
        return Err(Error::Empty("sweep dev set"));
    }
    if dev_docs.len() != dev_labels.len() {
        return Err(Error::DimensionMismatch {
            expected: dev_docs.len(),
            actual: dev_labels.len(),
        });
    }
    let mut k_values: Vec<usize> = config
        .k_values
        .iter()
        .copied()
        .filter(|&k| k >= 1 && k <= train_docs.len())
        .collect();
    k_values.sort_unstable();
    k_values.dedup();
    let mut feature_counts: Vec<usize> = config
        .feature_counts
        .iter()
        .copied()
        .filter(|&n| n >= 1)
        .collect();
    feature_counts.sort_unstable();
    feature_counts.dedup();
    if k_values.is_empty() || feature_counts.is_empty() {
        return Err(Error::InvalidArgument("empty sweep grid".into()));
    }
    let max_k = *k_values.last().unwrap();
    let max_n = *feature_counts.last().unwrap();

    let ranked = vsm::rank_features(train_docs, train_labels, task, vsm::CANDIDATE_POOL.max(max_n))?;

    let rows: Vec<Vec<SweepCell>> = feature_counts
        .par_iter()
        .map(|&n| -> Result<Vec<SweepCell>> {
            let fs = ranked.prefix(n);
            let model = KnnModel::fit(train_docs, train_labels, task, &fs, max_k, config.unit)?;
            let hits: Vec<Vec<bool>> = dev_docs
                .par_iter()
                .zip(dev_labels)
                .map(|(doc, &gold)| {
                    let nn = model.neighbors(&model.query_counts(doc), max_k);
                    k_values
                        .iter()
                        .map(|&k| vote(&nn[..k], &model.labels, &model.class_counts, task) == gold)
                        .collect()
                })
                .collect();
            Ok(k_values
                .iter()
                .enumerate()
                .map(|(j, &k)| SweepCell {
                    n,
                    k,
                    accuracy: hits.iter().filter(|h| h[j]).count() as f64 / dev_docs.len() as f64,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let cells: Vec<SweepCell> = rows.into_iter().flatten().collect();
    let best = *cells
        .iter()
        .max_by(|a, b| {
            a.accuracy
                .total_cmp(&b.accuracy)
                .then(b.k.cmp(&a.k))
                .then(b.n.cmp(&a.n))
        })
        .expect("non-empty grid");
    Ok(SweepGrid {
        task,
        k_values,
        feature_counts,
        cells,
        best,
    })
}

impl SweepGrid {
    pub fn accuracy(&self, n: usize, k: usize) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| c.n == n && c.k == k)
            .map(|c| c.accuracy)
    }

    /// `n`, `K`, `accuracy` rows.
    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut body = String::from("n\tK\taccuracy\n");
        for c in &self.cells {
            body.push_str(&format!("{}\t{}\t{}\n", c.n, c.k, c.accuracy));
        }
        std::fs::write(path, body).map_err(|e| Error::io(path, e))
    }

    /// Summary with the best cell.
    pub fn write_summary_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let summary = serde_json::json!({
            "task": self.task,
            "best": self.best,
            "k_values": self.k_values,
            "feature_counts": self.feature_counts,
            "cells": self.cells.len(),
        });
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(&mut f, &summary)?;
        f.write_all(b"\n").map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Instance, LabelTriple};

    fn gender_corpus(rows: &[(&str, &str)]) -> Corpus {
        Corpus::new(
            "t",
            rows.iter()
                .enumerate()
                .map(|(i, (text, g))| Instance {
                    id: format!("d{i}"),
                    text: text.to_string(),
                    labels: LabelTriple::parse("NAG", g, "NCOM"),
                })
                .collect(),
        )
        .unwrap()
    }

    fn all_features(c: &Corpus) -> FeatureSet {
        vsm::select_features(c, Task::Gender, 1000).unwrap()
    }

    #[test]
    fn fit_stores_everything() {
        let c = gender_corpus(&[("a b", "GEN"), ("c d", "NGEN"), ("a c", "GEN")]);
        let fs = all_features(&c);
        let m = knn_fit(&c, Task::Gender, &fs, 3).unwrap();
        assert_eq!(m.len(), 3);
        assert!(knn_fit(&c, Task::Gender, &fs, 0).is_err());
        assert!(knn_fit(&c, Task::Gender, &fs, 4).is_err());
        // K = |train| is a majority-class rule
        let q = TokenizedDoc::new("q", "c d");
        assert_eq!(knn_predict(&m, &q), 0);
    }

    #[test]
    fn exact_match_wins_at_k1() {
        let c = gender_corpus(&[("a b", "GEN"), ("c d", "NGEN"), ("a c", "GEN")]);
        let m = knn_fit(&c, Task::Gender, &all_features(&c), 1).unwrap();
        assert_eq!(knn_predict(&m, &TokenizedDoc::new("q", "d c")), 1);
    }

    #[test]
    fn zero_query_uses_first_k_by_index() {
        let c = gender_corpus(&[("a", "NGEN"), ("b", "GEN"), ("c", "GEN"), ("d", "GEN")]);
        let m = knn_fit(&c, Task::Gender, &all_features(&c), 3).unwrap();
        let q = TokenizedDoc::new("q", "zzz");
        let nn = m.neighbors(&m.query_counts(&q), 3);
        assert_eq!(nn.iter().map(|p| p.0).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(knn_predict(&m, &q), 0); // GEN 2 vs NGEN 1
    }

    #[test]
    fn scaled_copies_tie_exactly() {
        for texts in [["a b", "a a a b b b"], ["a a a b b b", "a b"]] {
            let c = gender_corpus(&[(texts[0], "NGEN"), (texts[1], "GEN"), ("a c c c", "GEN")]);
            let m = knn_fit(&c, Task::Gender, &all_features(&c), 1).unwrap();
            let q = TokenizedDoc::new("q", "a");
            let nn = m.neighbors(&m.query_counts(&q), 3);
            assert_eq!(nn.iter().map(|p| p.0).collect::<Vec<_>>(), [0, 1, 2]);
            assert_eq!(knn_predict(&m, &q), 1);
        }
    }

    #[test]
    fn vote_majority_and_ties() {
        let labels = [0, 0, 1];
        let nn = [(0, 0.9), (1, 0.5), (2, 0.99)];
        assert_eq!(vote(&nn, &labels, &[2, 1], Task::Gender), 0);
        // one vote each: similarity mass decides
        let nn = [(2, 0.9), (0, 0.8)];
        assert_eq!(vote(&nn, &labels, &[2, 1], Task::Gender), 1);
        // equal votes and mass: larger prior decides
        let nn = [(2, 0.5), (0, 0.5)];
        assert_eq!(vote(&nn, &labels, &[2, 1], Task::Gender), 0);
        // everything equal: lexicographic (GEN < NGEN)
        assert_eq!(vote(&nn, &labels, &[1, 1], Task::Gender), 0);
    }

    #[test]
    fn sweep_self_match_and_single_class() {
        let c = gender_corpus(&[("a b", "GEN"), ("c d", "NGEN"), ("e f", "GEN"), ("g", "NGEN")]);
        let cfg = SweepConfig {
            k_values: vec![1, 2, 50],
            feature_counts: vec![1000, 2000],
            unit: FeatureUnit::Token,
        };
        let grid = knn_sweep_with(&c, &c, Task::Gender, &cfg).unwrap();
        assert_eq!(grid.k_values, [1, 2]);
        assert_eq!(grid.accuracy(1000, 1), Some(1.0));
        assert_eq!(
            grid.best,
            SweepCell {
                n: 1000,
                k: 1,
                accuracy: 1.0
            }
        );

        let one = gender_corpus(&[("a", "GEN"), ("b", "GEN"), ("c", "GEN")]);
        let dev = gender_corpus(&[("x", "GEN"), ("y", "NGEN")]);
        let grid = knn_sweep_with(&one, &dev, Task::Gender, &cfg).unwrap();
        assert!(grid.cells.iter().all(|c| c.accuracy == 0.5));
    }

    #[test]
    fn serde_rebuilds_index() {
        let c = gender_corpus(&[("a b", "GEN"), ("c d", "NGEN"), ("a c", "GEN")]);
        let m = knn_fit(&c, Task::Gender, &all_features(&c), 1).unwrap();
        let back: KnnModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        let q = TokenizedDoc::new("q", "c");
        assert_eq!(back.predict(&q), m.predict(&q));
        assert_eq!(
            back.similarities(&back.query_counts(&q)),
            m.similarities(&m.query_counts(&q))
        );
    }
}
