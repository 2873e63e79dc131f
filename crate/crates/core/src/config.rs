//! Experiment configuration: a sectioned TOML file whose keys are all
//! unique, so each can be overridden by a flag of the same name.
//!
//! ```toml
//! [experiment]
//! seed = 1
//! system = "s2"
//! tasks = ["aggression", "gender", "communal"]
//! unit = "token"
//! strict = false
//!
//! [data]
//! train = "data/train.tsv"
//! dev = "data/dev.tsv"
//! output = "runs/s2"
//!
//! [knn]
//! knn_features = 30000
//! k = 1
//! sweep = true
//!
//! [stacking]
//! stack_features = 2000
//! folds = 5
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::error::{Error, Result};
use crate::features::DEFAULT_LEARNER_FEATURES;
use crate::knn::{default_feature_counts, DEFAULT_K_VALUES};
use crate::stacking::DEFAULT_FOLDS;
use crate::system::{System, SystemSpec};
use crate::text::FeatureUnit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub seed: u64,
    pub system: System,
    pub tasks: Vec<String>,
    pub unit: String,
    pub strict: bool,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            seed: 1,
            system: System::S2,
            tasks: Task::ALL.iter().map(|t| t.name().to_string()).collect(),
            unit: "token".into(),
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub output: PathBuf,
}

impl Default for DataSection {
    fn default() -> Self {
        DataSection {
            train: None,
            dev: None,
            test: None,
            output: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnSection {
    pub knn_features: usize,
    pub k: usize,
    /// Sweep the grid on the dev split and use each task's best cell.
    pub sweep: bool,
    pub k_values: Vec<usize>,
    pub feature_counts: Vec<usize>,
}

impl Default for KnnSection {
    fn default() -> Self {
        KnnSection {
            knn_features: 30_000,
            k: 1,
            sweep: true,
            k_values: DEFAULT_K_VALUES.to_vec(),
            feature_counts: default_feature_counts(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackingSection {
    pub stack_features: usize,
    pub folds: usize,
}

impl Default for StackingSection {
    fn default() -> Self {
        StackingSection {
            stack_features: DEFAULT_LEARNER_FEATURES,
            folds: DEFAULT_FOLDS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub data: DataSection,
    pub knn: KnnSection,
    pub stacking: StackingSection,
}

/// Values from the command line that replace config-file keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub system: Option<System>,
    pub tasks: Option<Vec<String>>,
    pub unit: Option<String>,
    pub strict: Option<bool>,
    pub train: Option<PathBuf>,
    pub dev: Option<PathBuf>,
    pub test: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub knn_features: Option<usize>,
    pub k: Option<usize>,
    pub sweep: Option<bool>,
    pub k_values: Option<Vec<usize>>,
    pub feature_counts: Option<Vec<usize>>,
    pub stack_features: Option<usize>,
    pub folds: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        let e = &mut self.experiment;
        set(&mut e.seed, &o.seed);
        set(&mut e.system, &o.system);
        set(&mut e.tasks, &o.tasks);
        set(&mut e.unit, &o.unit);
        set(&mut e.strict, &o.strict);
        let d = &mut self.data;
        if o.train.is_some() {
            d.train = o.train.clone();
        }
        if o.dev.is_some() {
            d.dev = o.dev.clone();
        }
        if o.test.is_some() {
            d.test = o.test.clone();
        }
        set(&mut d.output, &o.output);
        let k = &mut self.knn;
        set(&mut k.knn_features, &o.knn_features);
        set(&mut k.k, &o.k);
        set(&mut k.sweep, &o.sweep);
        set(&mut k.k_values, &o.k_values);
        set(&mut k.feature_counts, &o.feature_counts);
        let s = &mut self.stacking;
        set(&mut s.stack_features, &o.stack_features);
        set(&mut s.folds, &o.folds);
    }

    pub fn tasks(&self) -> Result<Vec<Task>> {
        let mut tasks = self
            .experiment
            .tasks
            .iter()
            .map(|t| t.parse::<Task>())
            .collect::<Result<Vec<_>>>()?;
        tasks.sort();
        tasks.dedup();
        if tasks.is_empty() {
            return Err(Error::Config("no tasks selected".into()));
        }
        Ok(tasks)
    }

    pub fn unit(&self) -> Result<FeatureUnit> {
        self.experiment
            .unit
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))
    }

    /// Checks values and that every configured input file exists.
    pub fn validate(&self, need_train: bool) -> Result<()> {
        self.tasks()?;
        self.unit()?;
        if need_train && self.data.train.is_none() {
            return Err(Error::Config(
                "no training file given (data.train / --train)".into(),
            ));
        }
        for path in [&self.data.train, &self.data.dev, &self.data.test]
            .into_iter()
            .flatten()
        {
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "input file {} does not exist",
                    path.display()
                )));
            }
        }
        if self.knn.knn_features == 0 || self.knn.k == 0 {
            return Err(Error::Config("knn_features and k must be positive".into()));
        }
        if self.knn.k_values.is_empty() || self.knn.feature_counts.is_empty() {
            return Err(Error::Config("sweep ranges must not be empty".into()));
        }
        if self.knn.k_values.contains(&0) || self.knn.feature_counts.contains(&0) {
            return Err(Error::Config("sweep values must be positive".into()));
        }
        if self.stacking.stack_features == 0 {
            return Err(Error::Config("stack_features must be positive".into()));
        }
        if self.stacking.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        Ok(())
    }

    /// Training spec with the configured KNN cell for every task.
    pub fn system_spec(&self) -> Result<SystemSpec> {
        let mut spec = SystemSpec::new(self.experiment.system);
        spec.tasks = self.tasks()?;
        spec.unit = self.unit()?;
        spec.seed = self.experiment.seed;
        spec.knn_cells = Task::ALL
            .iter()
            .map(|&t| (t, self.knn.knn_features, self.knn.k))
            .collect();
        spec.stack_features = self.stacking.stack_features;
        spec.folds = self.stacking.folds;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_select_s2_with_30000_features_and_k1() {
        let c = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(c.experiment.system, System::S2);
        assert_eq!((c.knn.knn_features, c.knn.k), (30_000, 1));
        assert_eq!(c.stacking.folds, 5);
        assert_eq!(c.tasks().unwrap(), Task::ALL.to_vec());
    }

    #[test]
    fn parses_sections_and_rejects_unknown_keys() {
        let c = ExperimentConfig::from_toml(
            "[experiment]\nseed = 9\nsystem = \"s1\"\ntasks = [\"gender\"]\n[knn]\nk = 3\n",
        )
        .unwrap();
        assert_eq!(c.experiment.seed, 9);
        assert_eq!(c.experiment.system, System::S1);
        assert_eq!(c.tasks().unwrap(), vec![Task::Gender]);
        assert_eq!(c.knn.k, 3);
        let err = ExperimentConfig::from_toml("[knn]\nneighbours = 3\n").unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn overrides_win_and_round_trip() {
        let mut c = ExperimentConfig::from_toml("[knn]\nk = 3\n").unwrap();
        c.apply(&Overrides {
            k: Some(5),
            folds: Some(3),
            ..Default::default()
        });
        assert_eq!(c.knn.k, 5);
        assert_eq!(c.stacking.folds, 3);
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn missing_inputs_are_config_errors() {
        let mut c = ExperimentConfig::default();
        assert!(c.validate(true).unwrap_err().is_usage());
        c.data.train = Some(PathBuf::from("/definitely/not/here.tsv"));
        assert!(c.validate(true).unwrap_err().is_usage());
    }
}
