//! Stacked generalization: base learners produce out-of-fold probability
//! rows, and a logistic-regression final estimator is trained on them.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::error::{Error, Result};
use crate::learners::{self, argmax, FeatureMatrix, LearnerModel, LearnerSpec};
use crate::persist;

pub const DEFAULT_FOLDS: usize = 5;

/// Columns contributed per base learner: one probability per class plus the
/// predicted class index.
pub fn meta_width(n_bases: usize, n_classes: usize) -> usize {
    n_bases * (n_classes + 1)
}

/// Assigns each row to one of `folds` folds, stratified by label. Rows of
/// each class are shuffled with `seed` and dealt round-robin, continuing
/// where the previous class stopped so fold sizes stay balanced.
pub fn stratified_folds(y: &[usize], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = y.iter().copied().max().map_or(0, |m| m + 1);
    let mut assignment = vec![0; y.len()];
    let mut next = 0;
    for c in 0..n_classes {
        let mut rows: Vec<usize> = (0..y.len()).filter(|&i| y[i] == c).collect();
        rows.shuffle(&mut rng);
        for i in rows {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    assignment
}

/// The fold count actually used: `folds` lowered to the smallest class
/// size (but never below 2), with a warning when lowered.
pub fn effective_folds(y: &[usize], folds: usize) -> Result<usize> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if y.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "{} rows cannot be split into folds",
            y.len()
        )));
    }
    let mut counts = std::collections::BTreeMap::new();
    for &c in y {
        *counts.entry(c).or_insert(0usize) += 1;
    }
    let smallest = counts.values().copied().min().unwrap_or(0);
    if smallest < folds {
        let reduced = smallest.max(2).min(y.len());
        log::warn!("smallest class has {smallest} rows; using {reduced} folds instead of {folds}");
        return Ok(reduced);
    }
    Ok(folds)
}

/// Appends the meta-feature block for one probability row of `model`.
fn push_block(model: &LearnerModel, proba: &[f64], n_classes: usize, out: &mut Vec<f64>) {
    let start = out.len();
    out.resize(start + n_classes, 0.0);
    for (&c, &p) in model.classes().iter().zip(proba) {
        out[start + c] = p;
    }
    out.push(model.classes()[argmax(proba)] as f64);
}

fn meta_rows(models: &[LearnerModel], x: &FeatureMatrix, n_classes: usize) -> Result<Vec<Vec<f64>>> {
    let probas = models
        .iter()
        .map(|m| learners::predict_proba(m, x))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..x.n_rows())
        .map(|i| {
            let mut row = Vec::with_capacity(meta_width(models.len(), n_classes));
            for (m, p) in models.iter().zip(&probas) {
                push_block(m, &p[i], n_classes, &mut row);
            }
            row
        })
        .collect())
}

fn check_inputs(bases: &[LearnerSpec], x: &FeatureMatrix, y: &[usize], n_classes: usize) -> Result<()> {
    if bases.is_empty() {
        return Err(Error::Empty("base learner list"));
    }
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            actual: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::InvalidArgument(format!(
            "label {bad} outside {n_classes} classes"
        )));
    }
    Ok(())
}

/// Out-of-fold meta-features with stratified, seeded folds.
pub fn make_oof_meta_features(
    bases: &[LearnerSpec],
    x: &FeatureMatrix,
    y: &[usize],
    n_classes: usize,
    folds: usize,
    seed: u64,
) -> Result<FeatureMatrix> {
    check_inputs(bases, x, y, n_classes)?;
    let folds = effective_folds(y, folds)?;
    make_oof_meta_features_with_folds(bases, x, y, n_classes, &stratified_folds(y, folds, seed))
}

/// Out-of-fold meta-features for an explicit fold assignment: the row of
/// instance `i` comes only from models trained without fold
/// `assignment[i]`.
pub fn make_oof_meta_features_with_folds(
    bases: &[LearnerSpec],
    x: &FeatureMatrix,
    y: &[usize],
    n_classes: usize,
    assignment: &[usize],
) -> Result<FeatureMatrix> {
    check_inputs(bases, x, y, n_classes)?;
    if assignment.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            actual: assignment.len(),
        });
    }
    let n_folds = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let fold_rows: Vec<(Vec<usize>, Vec<usize>)> = (0..n_folds)
        .map(|f| {
            let (held, train): (Vec<usize>, Vec<usize>) = (0..y.len()).partition(|&i| assignment[i] == f);
            (train, held)
        })
        .filter(|(train, held)| !held.is_empty() && !train.is_empty())
        .collect();
    if fold_rows.iter().map(|(_, h)| h.len()).sum::<usize>() != y.len() {
        return Err(Error::InvalidArgument("every fold needs rows outside it".into()));
    }

    let cells: Vec<(usize, usize)> = (0..fold_rows.len())
        .flat_map(|f| (0..bases.len()).map(move |b| (f, b)))
        .collect();
    let blocks = cells
        .par_iter()
        .map(|&(f, b)| {
            let (train, held) = &fold_rows[f];
            let ty: Vec<usize> = train.iter().map(|&i| y[i]).collect();
            let model = learners::train_learner(&bases[b], &x.select_rows(train), &ty)?;
            learners::predict_proba(&model, &x.select_rows(held)).map(|p| (model, p))
        })
        .collect::<Result<Vec<_>>>()?;

    let block = n_classes + 1;
    let mut rows = vec![vec![0.0; meta_width(bases.len(), n_classes)]; y.len()];
    for (&(f, b), (model, probas)) in cells.iter().zip(&blocks) {
        for (&i, p) in fold_rows[f].1.iter().zip(probas) {
            let mut out = Vec::with_capacity(block);
            push_block(model, p, n_classes, &mut out);
            rows[i][b * block..(b + 1) * block].copy_from_slice(&out);
        }
    }
    FeatureMatrix::from_dense(&rows)
}

/// Meta-features from base models trained on all rows and evaluated on
/// those same rows. This leaks labels; it exists to show what the
/// out-of-fold construction prevents.
pub fn make_in_fold_meta_features(
    bases: &[LearnerSpec],
    x: &FeatureMatrix,
    y: &[usize],
    n_classes: usize,
) -> Result<FeatureMatrix> {
    check_inputs(bases, x, y, n_classes)?;
    let models = train_bases(bases, x, y)?;
    FeatureMatrix::from_dense(&meta_rows(&models, x, n_classes)?)
}

fn train_bases(bases: &[LearnerSpec], x: &FeatureMatrix, y: &[usize]) -> Result<Vec<LearnerModel>> {
    bases
        .par_iter()
        .map(|s| learners::train_learner(s, x, y))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StackModel {
    task: Task,
    folds: usize,
    seed: u64,
    bases: Vec<LearnerModel>,
    final_estimator: LearnerModel,
}

/// Labels and class distributions (over all of the task's classes).
#[derive(Debug, Clone, PartialEq)]
pub struct StackedPrediction {
    pub labels: Vec<usize>,
    pub probabilities: Vec<Vec<f64>>,
}

const MODEL_KIND: &str = "stack";

/// Trains the final estimator on out-of-fold meta-features, then retrains
/// every base learner on all of `(x, y)` for inference.
pub fn fit_stacked(
    bases: &[LearnerSpec],
    final_spec: &LearnerSpec,
    x: &FeatureMatrix,
    y: &[usize],
    task: Task,
    folds: usize,
    seed: u64,
) -> Result<StackModel> {
    let n_classes = task.n_classes();
    check_inputs(bases, x, y, n_classes)?;
    let folds = effective_folds(y, folds)?;
    let meta = make_oof_meta_features_with_folds(bases, x, y, n_classes, &stratified_folds(y, folds, seed))?;
    let final_estimator = learners::train_learner(final_spec, &meta, y)?;
    let bases = train_bases(bases, x, y)?;
    Ok(StackModel {
        task,
        folds,
        seed,
        bases,
        final_estimator,
    })
}

pub fn predict_stacked(model: &StackModel, x: &FeatureMatrix) -> Result<StackedPrediction> {
    let n_classes = model.task.n_classes();
    let meta = FeatureMatrix::from_dense(&meta_rows(&model.bases, x, n_classes)?)?;
    let probas = learners::predict_proba(&model.final_estimator, &meta)?;
    let classes = model.final_estimator.classes();
    let mut labels = Vec::with_capacity(probas.len());
    let mut probabilities = Vec::with_capacity(probas.len());
    for p in probas {
        labels.push(classes[argmax(&p)]);
        let mut full = vec![0.0; n_classes];
        for (&c, &v) in classes.iter().zip(&p) {
            full[c] = v;
        }
        probabilities.push(full);
    }
    Ok(StackedPrediction {
        labels,
        probabilities,
    })
}

impl StackModel {
    pub fn task(&self) -> Task {
        self.task
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bases(&self) -> &[LearnerModel] {
        &self.bases
    }

    pub fn final_estimator(&self) -> &LearnerModel {
        &self.final_estimator
    }

    pub fn n_features(&self) -> usize {
        self.bases[0].n_features()
    }

    pub fn predict(&self, x: &FeatureMatrix) -> Result<StackedPrediction> {
        predict_stacked(self, x)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::save(path, MODEL_KIND, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        persist::load(path, MODEL_KIND)
    }
}
