//! Natively implemented classifiers behind one train / predict-probability
//! contract.

mod adaboost;
mod forest;
mod gbm;
mod gradcheck;
mod logistic;
mod matrix;
mod mlp;
mod naive_bayes;
mod svm;
mod tree;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use adaboost::{AdaBoostModel, AdaBoostParams};
pub use forest::{ForestModel, ForestParams, MaxFeatures};
pub use gbm::{GbmModel, GbmParams};
pub use gradcheck::gradient_check;
pub use logistic::{LogisticModel, LogisticParams};
pub use matrix::FeatureMatrix;
pub use mlp::{MlpModel, MlpParams};
pub use naive_bayes::{NaiveBayesModel, NaiveBayesParams};
pub use svm::{SvmModel, SvmParams};
pub use tree::{Node, Tree};

use crate::error::{Error, Result};
use crate::persist;

/// Numerically stable in-place softmax.
pub(crate) fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
}

/// Index of the first maximum.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &p) in v.iter().enumerate() {
        if p > v[best] {
            best = k;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    NaiveBayes,
    LinearSvm,
    RandomForest,
    Gbm,
    #[serde(rename = "adaboost")]
    AdaBoost,
    Mlp,
    LogisticRegression,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 7] = [
        LearnerKind::NaiveBayes,
        LearnerKind::LinearSvm,
        LearnerKind::RandomForest,
        LearnerKind::Gbm,
        LearnerKind::AdaBoost,
        LearnerKind::Mlp,
        LearnerKind::LogisticRegression,
    ];

    /// The six stacked base learners, in ordinal order.
    pub const BASE: [LearnerKind; 6] = [
        LearnerKind::NaiveBayes,
        LearnerKind::LinearSvm,
        LearnerKind::RandomForest,
        LearnerKind::Gbm,
        LearnerKind::AdaBoost,
        LearnerKind::Mlp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::NaiveBayes => "naive_bayes",
            LearnerKind::LinearSvm => "linear_svm",
            LearnerKind::RandomForest => "random_forest",
            LearnerKind::Gbm => "gbm",
            LearnerKind::AdaBoost => "adaboost",
            LearnerKind::Mlp => "mlp",
            LearnerKind::LogisticRegression => "logistic_regression",
        }
    }

    /// Position used when deriving per-learner seeds.
    pub fn ordinal(self) -> u64 {
        LearnerKind::ALL.iter().position(|&k| k == self).unwrap() as u64
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown learner kind {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Hyperparameters {
    NaiveBayes(NaiveBayesParams),
    LinearSvm(SvmParams),
    RandomForest(ForestParams),
    Gbm(GbmParams),
    #[serde(rename = "adaboost")]
    AdaBoost(AdaBoostParams),
    Mlp(MlpParams),
    LogisticRegression(LogisticParams),
}

impl Hyperparameters {
    pub fn default_for(kind: LearnerKind) -> Self {
        match kind {
            LearnerKind::NaiveBayes => Hyperparameters::NaiveBayes(Default::default()),
            LearnerKind::LinearSvm => Hyperparameters::LinearSvm(Default::default()),
            LearnerKind::RandomForest => Hyperparameters::RandomForest(Default::default()),
            LearnerKind::Gbm => Hyperparameters::Gbm(Default::default()),
            LearnerKind::AdaBoost => Hyperparameters::AdaBoost(Default::default()),
            LearnerKind::Mlp => Hyperparameters::Mlp(Default::default()),
            LearnerKind::LogisticRegression => Hyperparameters::LogisticRegression(Default::default()),
        }
    }

    pub fn kind(&self) -> LearnerKind {
        match self {
            Hyperparameters::NaiveBayes(_) => LearnerKind::NaiveBayes,
            Hyperparameters::LinearSvm(_) => LearnerKind::LinearSvm,
            Hyperparameters::RandomForest(_) => LearnerKind::RandomForest,
            Hyperparameters::Gbm(_) => LearnerKind::Gbm,
            Hyperparameters::AdaBoost(_) => LearnerKind::AdaBoost,
            Hyperparameters::Mlp(_) => LearnerKind::Mlp,
            Hyperparameters::LogisticRegression(_) => LearnerKind::LogisticRegression,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub hyper: Hyperparameters,
    pub seed: u64,
}

impl LearnerSpec {
    /// Default hyperparameters for `kind`.
    pub fn new(kind: LearnerKind, seed: u64) -> Self {
        LearnerSpec {
            hyper: Hyperparameters::default_for(kind),
            seed,
        }
    }

    /// Spec seeded as `experiment_seed * 1000 + ordinal`.
    pub fn for_experiment(kind: LearnerKind, experiment_seed: u64) -> Self {
        Self::new(
            kind,
            experiment_seed.wrapping_mul(1000).wrapping_add(kind.ordinal()),
        )
    }

    pub fn kind(&self) -> LearnerKind {
        self.hyper.kind()
    }

    pub fn base_learners(experiment_seed: u64) -> Vec<LearnerSpec> {
        LearnerKind::BASE
            .iter()
            .map(|&k| Self::for_experiment(k, experiment_seed))
            .collect()
    }

    pub fn final_estimator(experiment_seed: u64) -> LearnerSpec {
        Self::for_experiment(LearnerKind::LogisticRegression, experiment_seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "model", rename_all = "snake_case")]
enum Params {
    /// Training labels held a single class.
    Constant,
    NaiveBayes(NaiveBayesModel),
    LinearSvm(SvmModel),
    RandomForest(ForestModel),
    Gbm(GbmModel),
    AdaBoost(AdaBoostModel),
    Mlp(MlpModel),
    LogisticRegression(LogisticModel),
}

/// A trained classifier. Probabilities are reported over [`Self::classes`],
/// the sorted set of labels seen in training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerModel {
    spec: LearnerSpec,
    classes: Vec<usize>,
    n_features: usize,
    params: Params,
}

const MODEL_KIND: &str = "learner";

impl LearnerModel {
    pub fn kind(&self) -> LearnerKind {
        self.spec.kind()
    }

    pub fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.params, Params::Constant)
    }

    fn proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        match &self.params {
            Params::Constant => vec![1.0],
            Params::NaiveBayes(m) => m.predict_proba_row(x, i),
            Params::LinearSvm(m) => m.predict_proba_row(x, i),
            Params::RandomForest(m) => m.predict_proba_row(x, i),
            Params::Gbm(m) => m.predict_proba_row(x, i),
            Params::AdaBoost(m) => m.predict_proba_row(x, i),
            Params::Mlp(m) => m.predict_proba_row(x, i),
            Params::LogisticRegression(m) => m.predict_proba_row(x, i),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::save(path, MODEL_KIND, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        persist::load(path, MODEL_KIND)
    }
}

/// Trains `spec` on rows `x` with labels `y`. Labels may be any indices; the
/// model remembers which ones it saw.
pub fn train_learner(spec: &LearnerSpec, x: &FeatureMatrix, y: &[usize]) -> Result<LearnerModel> {
    if y.is_empty() {
        return Err(Error::Empty("training rows"));
    }
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            actual: y.len(),
        });
    }
    x.check_finite()?;

    let mut classes: Vec<usize> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let n_features = x.n_cols();
    if classes.len() == 1 {
        return Ok(LearnerModel {
            spec: *spec,
            classes,
            n_features,
            params: Params::Constant,
        });
    }
    let yy: Vec<usize> = y.iter().map(|c| classes.binary_search(c).unwrap()).collect();
    let k = classes.len();
    let seed = spec.seed;
    let params = match &spec.hyper {
        Hyperparameters::NaiveBayes(p) => Params::NaiveBayes(NaiveBayesModel::fit(p, x, &yy, k)),
        Hyperparameters::LinearSvm(p) => Params::LinearSvm(SvmModel::fit(p, x, &yy, k, seed)),
        Hyperparameters::RandomForest(p) => Params::RandomForest(ForestModel::fit(p, x, &yy, k, seed)),
        Hyperparameters::Gbm(p) => Params::Gbm(GbmModel::fit(p, x, &yy, k)),
        Hyperparameters::AdaBoost(p) => Params::AdaBoost(AdaBoostModel::fit(p, x, &yy, k)),
        Hyperparameters::Mlp(p) => Params::Mlp(MlpModel::fit(p, x, &yy, k, seed)),
        Hyperparameters::LogisticRegression(p) => {
            Params::LogisticRegression(LogisticModel::fit(p, x, &yy, k))
        }
    };
    Ok(LearnerModel {
        spec: *spec,
        classes,
        n_features,
        params,
    })
}

/// One distribution per row, aligned with `model.classes()`.
pub fn predict_proba(model: &LearnerModel, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
    if x.n_cols() != model.n_features {
        return Err(Error::DimensionMismatch {
            expected: model.n_features,
            actual: x.n_cols(),
        });
    }
    x.check_finite()?;
    Ok((0..x.n_rows()).map(|i| model.proba_row(x, i)).collect())
}

/// Most probable training label for each row.
pub fn predict(model: &LearnerModel, x: &FeatureMatrix) -> Result<Vec<usize>> {
    Ok(predict_proba(model, x)?
        .iter()
        .map(|p| model.classes[argmax(p)])
        .collect())
}
