//! A trained system: one classifier per task, applied to whole corpora.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, LabelTriple, Task};
use crate::error::{Error, Result};
use crate::eval::PredictionSet;
use crate::features::{DenseFeatureSpace, DEFAULT_LEARNER_FEATURES};
use crate::knn::KnnModel;
use crate::learners::LearnerSpec;
use crate::persist;
use crate::stacking::{self, StackModel, DEFAULT_FOLDS};
use crate::text::{FeatureUnit, TokenizedDoc};
use crate::vsm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum System {
    /// Stacked ensemble of the six base learners.
    S1,
    /// Chi-square cosine KNN.
    #[default]
    S2,
}

impl std::str::FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s1" | "stack" | "stacking" => Ok(System::S1),
            "s2" | "knn" => Ok(System::S2),
            other => Err(Error::InvalidArgument(format!(
                "system {other:?} (expected s1 or s2)"
            ))),
        }
    }
}

impl std::fmt::Display for System {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            System::S1 => "s1",
            System::S2 => "s2",
        })
    }
}

/// Everything needed to train a [`SystemModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub system: System,
    /// Tasks that get a trained classifier; the others predict the training
    /// majority class.
    pub tasks: Vec<Task>,
    pub unit: FeatureUnit,
    pub seed: u64,
    /// KNN feature count and K, per task.
    pub knn_cells: Vec<(Task, usize, usize)>,
    pub stack_features: usize,
    pub folds: usize,
}

impl SystemSpec {
    pub fn new(system: System) -> Self {
        SystemSpec {
            system,
            tasks: Task::ALL.to_vec(),
            unit: FeatureUnit::Token,
            seed: 1,
            knn_cells: Task::ALL.iter().map(|&t| (t, 30_000, 1)).collect(),
            stack_features: DEFAULT_LEARNER_FEATURES,
            folds: DEFAULT_FOLDS,
        }
    }

    fn knn_cell(&self, task: Task) -> (usize, usize) {
        self.knn_cells
            .iter()
            .find(|c| c.0 == task)
            .map_or((30_000, 1), |c| (c.1, c.2))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TaskModel {
    Knn {
        model: KnnModel,
    },
    Stack {
        space: DenseFeatureSpace,
        model: StackModel,
    },
    Majority {
        class: usize,
    },
}

impl TaskModel {
    fn predict(&self, docs: &[TokenizedDoc]) -> Result<Vec<usize>> {
        match self {
            TaskModel::Knn { model } => Ok(model.predict_docs(docs)),
            TaskModel::Stack { space, model } => {
                Ok(stacking::predict_stacked(model, &space.transform(docs)?)?.labels)
            }
            TaskModel::Majority { class } => Ok(vec![*class; docs.len()]),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemModel {
    spec: SystemSpec,
    /// One entry per task, in [`Task::ALL`] order.
    models: Vec<(Task, TaskModel)>,
}

const MODEL_KIND: &str = "system";

fn majority(labels: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for &y in labels {
        counts[y] += 1;
    }
    // first maximum, so ties go to the lower class index
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

impl SystemModel {
    pub fn train(spec: &SystemSpec, train: &Corpus) -> Result<SystemModel> {
        if train.is_empty() {
            return Err(Error::Empty("training corpus"));
        }
        let docs = vsm::tokenize_corpus(train, spec.unit);
        let models = Task::ALL
            .par_iter()
            .map(|&task| {
                let labels = train.task_labels(task)?;
                let model = if !spec.tasks.contains(&task) {
                    TaskModel::Majority {
                        class: majority(&labels, task.n_classes()),
                    }
                } else {
                    match spec.system {
                        System::S2 => {
                            let (n, k) = spec.knn_cell(task);
                            let fs = vsm::rank_features(&docs, &labels, task, vsm::CANDIDATE_POOL.max(n))?
                                .prefix(n);
                            TaskModel::Knn {
                                model: KnnModel::fit(&docs, &labels, task, &fs, k, spec.unit)?,
                            }
                        }
                        System::S1 => {
                            let space =
                                DenseFeatureSpace::fit(&docs, &labels, task, spec.stack_features, spec.unit)?;
                            let x = space.transform(&docs)?;
                            let model = stacking::fit_stacked(
                                &LearnerSpec::base_learners(spec.seed),
                                &LearnerSpec::final_estimator(spec.seed),
                                &x,
                                &labels,
                                task,
                                spec.folds,
                                spec.seed,
                            )?;
                            TaskModel::Stack { space, model }
                        }
                    }
                };
                Ok((task, model))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SystemModel {
            spec: spec.clone(),
            models,
        })
    }

    pub fn spec(&self) -> &SystemSpec {
        &self.spec
    }

    pub fn task_model(&self, task: Task) -> &TaskModel {
        &self
            .models
            .iter()
            .find(|m| m.0 == task)
            .expect("every task has a model")
            .1
    }

    /// Predicted triples for every instance of `corpus`, in corpus order.
    pub fn predict(&self, corpus: &Corpus) -> Result<PredictionSet> {
        let docs = vsm::tokenize_corpus(corpus, self.spec.unit);
        let per_task = self
            .models
            .par_iter()
            .map(|(_, m)| m.predict(&docs))
            .collect::<Result<Vec<_>>>()?;
        let labels = (0..docs.len())
            .map(|i| LabelTriple::from_indices(per_task[0][i], per_task[1][i], per_task[2][i]))
            .collect();
        PredictionSet::new(docs.into_iter().map(|d| d.id).collect(), labels)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        persist::save(path, MODEL_KIND, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        persist::load(path, MODEL_KIND)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_synthetic, SyntheticSpec};

    #[test]
    fn unselected_tasks_use_the_majority() {
        let train = generate_synthetic(
            &SyntheticSpec {
                instances: 60,
                ..Default::default()
            },
            "train",
        )
        .unwrap();
        let mut spec = SystemSpec::new(System::S2);
        spec.tasks = vec![Task::Gender];
        let model = SystemModel::train(&spec, &train).unwrap();
        let labels = train.task_labels(Task::Aggression).unwrap();
        let expect = majority(&labels, 3);
        let preds = model.predict(&train).unwrap();
        assert!(preds.labels.iter().all(|t| t.get(Task::Aggression) == expect));
        assert!(matches!(model.task_model(Task::Gender), TaskModel::Knn { .. }));
    }

    #[test]
    fn majority_ties_go_low() {
        assert_eq!(majority(&[1, 0, 2, 2, 0], 3), 0);
    }
}
