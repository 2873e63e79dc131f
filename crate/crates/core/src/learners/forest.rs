use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::tree::{grow, ColumnIndex, GrowParams, Target, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    /// `floor(sqrt(d))`, at least one.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    pub(crate) fn resolve(self, d: usize) -> Option<usize> {
        match self {
            MaxFeatures::Sqrt => Some(((d as f64).sqrt().floor() as usize).max(1)),
            MaxFeatures::All => None,
            MaxFeatures::Count(k) => Some(k.max(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 16,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub(crate) trees: Vec<Tree>,
}

/// Random stream for tree `t` of a forest seeded with `seed`.
fn tree_rng(seed: u64, t: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    rng
}

pub(crate) fn bootstrap_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for _ in 0..n {
        w[rng.gen_range(0..n)] += 1.0;
    }
    w
}

impl ForestModel {
    pub fn fit(params: &ForestParams, x: &FeatureMatrix, y: &[usize], n_classes: usize, seed: u64) -> Self {
        let index = ColumnIndex::new(x);
        let grow_params = GrowParams {
            max_depth: params.max_depth,
            max_features: params.max_features.resolve(x.n_cols()),
        };
        let target = Target::Classes { y, n_classes };
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = tree_rng(seed, t);
                let weights = if params.bootstrap {
                    bootstrap_weights(y.len(), &mut rng)
                } else {
                    vec![1.0; y.len()]
                };
                grow(x, &index, &target, &weights, &grow_params, &mut rng)
            })
            .collect();
        ForestModel { trees }
    }

    /// Mean of the trees' leaf class distributions.
    pub fn predict_proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let mut acc: Vec<f64> = Vec::new();
        for t in &self.trees {
            let leaf = t.predict_row(x, i);
            if acc.is_empty() {
                acc = vec![0.0; leaf.len()];
            }
            for (a, p) in acc.iter_mut().zip(leaf) {
                *a += p;
            }
        }
        let n = self.trees.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }
}
