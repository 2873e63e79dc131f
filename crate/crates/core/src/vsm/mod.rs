//! Vector space model: vocabulary, chi-square feature selection, TF vectors
//! and cosine similarity.

pub mod chi2;
mod sparse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use sparse::{cosine, SparseVector};

use crate::corpus::{Corpus, Task};
use crate::error::{Error, Result};
use crate::text::{FeatureUnit, TokenizedDoc};

/// Most frequent strings considered for chi-square ranking. Must exceed the
/// largest selection size used by the sweep.
pub const CANDIDATE_POOL: usize = 60_000;

/// Tokenizes every instance of `corpus` with `unit`.
pub fn tokenize_corpus(corpus: &Corpus, unit: FeatureUnit) -> Vec<TokenizedDoc> {
    corpus
        .instances()
        .par_iter()
        .map(|i| TokenizedDoc::with_unit(i.id.clone(), &i.text, unit))
        .collect()
}

/// Corpus-wide string frequencies, most frequent first (ties lexicographic).
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Counts every occurrence of every string in `docs` and keeps the top
    /// `cap`.
    pub fn from_docs(docs: &[TokenizedDoc], cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(Error::InvalidArgument("vocabulary cap must be at least 1".into()));
        }
        if docs.is_empty() {
            return Err(Error::Empty("cannot build a vocabulary from an empty corpus"));
        }
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for doc in docs {
            for t in &doc.tokens {
                *counts.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut entries: Vec<(String, u64)> = counts.into_iter().map(|(t, n)| (t.to_string(), n)).collect();
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(cap);
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        Ok(Vocabulary { entries, index })
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn frequency(&self, term: &str) -> Option<u64> {
        self.index_of(term).map(|i| self.entries[i].1)
    }
}

/// Token vocabulary of `corpus` capped at `cap` entries.
pub fn build_vocabulary(corpus: &Corpus, cap: usize) -> Result<Vocabulary> {
    Vocabulary::from_docs(&tokenize_corpus(corpus, FeatureUnit::Token), cap)
}

fn class_doc_counts(labels: &[usize], n_classes: usize) -> Vec<u64> {
    let mut counts = vec![0u64; n_classes];
    for &y in labels {
        counts[y] += 1;
    }
    counts
}

/// χ² (max over one-vs-rest classes of `task`) of the presence of
/// `feature` among the corpus tokens.
pub fn chi2_score(feature: &str, corpus: &Corpus, task: Task) -> Result<f64> {
    let labels = corpus.task_labels(task)?;
    let docs = tokenize_corpus(corpus, FeatureUnit::Token);
    Ok(chi2_score_docs(feature, &docs, &labels, task.n_classes()))
}

/// [`chi2_score`] over pre-tokenized documents and class indices.
pub fn chi2_score_docs(feature: &str, docs: &[TokenizedDoc], labels: &[usize], n_classes: usize) -> f64 {
    let class_docs = class_doc_counts(labels, n_classes);
    let mut df_by_class = vec![0u64; n_classes];
    for (doc, &y) in docs.iter().zip(labels) {
        if doc.tokens.iter().any(|t| t == feature) {
            df_by_class[y] += 1;
        }
    }
    let df = df_by_class.iter().sum();
    chi2::chi2_max(docs.len() as u64, df, &df_by_class, &class_docs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeature {
    pub term: String,
    pub chi2: f64,
    pub frequency: u64,
}

/// Features chosen for one task, best chi-square first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FeatureSetRepr", into = "FeatureSetRepr")]
pub struct FeatureSet {
    task: Task,
    features: Vec<SelectedFeature>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct FeatureSetRepr {
    task: Task,
    features: Vec<SelectedFeature>,
}

impl From<FeatureSetRepr> for FeatureSet {
    fn from(r: FeatureSetRepr) -> Self {
        FeatureSet::from_ranked(r.task, r.features)
    }
}

impl From<FeatureSet> for FeatureSetRepr {
    fn from(f: FeatureSet) -> Self {
        FeatureSetRepr {
            task: f.task,
            features: f.features,
        }
    }
}

fn feature_order(a: &SelectedFeature, b: &SelectedFeature) -> Ordering {
    b.chi2
        .total_cmp(&a.chi2)
        .then_with(|| b.frequency.cmp(&a.frequency))
        .then_with(|| a.term.cmp(&b.term))
}

impl FeatureSet {
    /// Wraps an already ranked list.
    pub fn from_ranked(task: Task, features: Vec<SelectedFeature>) -> Self {
        let index = features
            .iter()
            .enumerate()
            .map(|(i, f)| (f.term.clone(), i))
            .collect();
        FeatureSet {
            task,
            features,
            index,
        }
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn features(&self) -> &[SelectedFeature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// The `n` best features (all of them if fewer exist).
    pub fn prefix(&self, n: usize) -> FeatureSet {
        FeatureSet::from_ranked(self.task, self.features[..n.min(self.len())].to_vec())
    }

    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::io(path, e))?);
        let mut write = || -> std::io::Result<()> {
            writeln!(out, "rank\tfeature\tchi2\tfrequency")?;
            for (rank, f) in self.features.iter().enumerate() {
                writeln!(out, "{}\t{}\t{}\t{}", rank + 1, f.term, f.chi2, f.frequency)?;
            }
            out.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: impl AsRef<Path>, task: Task) -> Result<FeatureSet> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let bad = |line: usize, msg: &str| Error::Parse {
            what: "feature set TSV",
            message: format!("{}:{line}: {msg}", path.display()),
        };
        let mut features = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if n == 0 {
                if line != "rank\tfeature\tchi2\tfrequency" {
                    return Err(bad(1, "unexpected header"));
                }
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(bad(n + 1, "expected 4 columns"));
            }
            if cols[0].parse::<usize>().ok() != Some(features.len() + 1) {
                return Err(bad(n + 1, "ranks must be 1, 2, 3, ..."));
            }
            features.push(SelectedFeature {
                term: cols[1].to_string(),
                chi2: cols[2].parse().map_err(|_| bad(n + 1, "bad chi2 value"))?,
                frequency: cols[3].parse().map_err(|_| bad(n + 1, "bad frequency"))?,
            });
        }
        Ok(FeatureSet::from_ranked(task, features))
    }
}

/// Ranks the `pool` most frequent strings of `docs` by chi-square against
/// `labels` (class indices of `task`), ties going to the more frequent, then
/// lexicographically smaller string.
pub fn rank_features(docs: &[TokenizedDoc], labels: &[usize], task: Task, pool: usize) -> Result<FeatureSet> {
    if docs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: docs.len(),
            actual: labels.len(),
        });
    }
    let vocab = Vocabulary::from_docs(docs, pool)?;
    let n_classes = task.n_classes();
    let class_docs = class_doc_counts(labels, n_classes);

    let mut df_by_class = vec![0u64; vocab.len() * n_classes];
    let mut present = HashSet::new();
    for (doc, &y) in docs.iter().zip(labels) {
        present.clear();
        for t in &doc.tokens {
            if let Some(i) = vocab.index_of(t) {
                if present.insert(i) {
                    df_by_class[i * n_classes + y] += 1;
                }
            }
        }
    }

    let n_docs = docs.len() as u64;
    let mut features: Vec<SelectedFeature> = vocab
        .entries()
        .par_iter()
        .enumerate()
        .map(|(i, (term, freq))| {
            let row = &df_by_class[i * n_classes..(i + 1) * n_classes];
            let df = row.iter().sum();
            SelectedFeature {
                term: term.clone(),
                chi2: chi2::chi2_max(n_docs, df, row, &class_docs),
                frequency: *freq,
            }
        })
        .collect();
    features.sort_by(feature_order);
    Ok(FeatureSet::from_ranked(task, features))
}

/// Top-`n` chi-square token features of `corpus` for `task`.
pub fn select_features(corpus: &Corpus, task: Task, n: usize) -> Result<FeatureSet> {
    select_features_with(corpus, task, n, FeatureUnit::Token)
}

pub fn select_features_with(corpus: &Corpus, task: Task, n: usize, unit: FeatureUnit) -> Result<FeatureSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("feature count must be at least 1".into()));
    }
    let labels = corpus.task_labels(task)?;
    let docs = tokenize_corpus(corpus, unit);
    Ok(rank_features(&docs, &labels, task, CANDIDATE_POOL.max(n))?.prefix(n))
}

/// Raw term counts of `doc` over `fs`, as `(feature index, count)` pairs in
/// increasing index order.
pub fn term_counts(doc: &TokenizedDoc, fs: &FeatureSet) -> Vec<(u32, u32)> {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for t in &doc.tokens {
        if let Some(i) = fs.index_of(t) {
            *counts.entry(i as u32).or_default() += 1;
        }
    }
    counts.into_iter().collect()
}

/// L2-normalized term-frequency vector of `doc` over `fs`.
pub fn vectorize(doc: &TokenizedDoc, fs: &FeatureSet) -> SparseVector {
    let counts = term_counts(doc, fs)
        .into_iter()
        .map(|(i, c)| (i as usize, c as f64));
    let mut v = SparseVector::from_pairs(fs.len(), counts).expect("counts are positive and sorted");
    v.normalize();
    v
}
