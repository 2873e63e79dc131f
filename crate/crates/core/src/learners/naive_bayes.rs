//! Multinomial naive Bayes with additive smoothing, evaluated in log space.
//!
//! Features are treated as event counts. Negative inputs (standardized
//! surface counts below their training mean) contribute nothing.

use serde::{Deserialize, Serialize};

use super::matrix::{canonical_order, FeatureMatrix};
use super::softmax_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    pub alpha: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        NaiveBayesParams { alpha: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub(crate) log_prior: Vec<f64>,
    /// `[class][feature]` log P(feature | class).
    pub(crate) feature_log_prob: Vec<Vec<f64>>,
}

impl NaiveBayesModel {
    pub fn fit(params: &NaiveBayesParams, x: &FeatureMatrix, y: &[usize], n_classes: usize) -> Self {
        let d = x.n_cols();
        let mut counts = vec![vec![0.0f64; d]; n_classes];
        let mut class_rows = vec![0usize; n_classes];
        for i in canonical_order(x, y) {
            let c = y[i];
            class_rows[c] += 1;
            let (idx, val) = x.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                if v > 0.0 {
                    counts[c][j as usize] += v;
                }
            }
        }
        let n = y.len() as f64;
        let log_prior = class_rows.iter().map(|&k| (k as f64 / n).ln()).collect();
        let feature_log_prob = counts
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum::<f64>() + params.alpha * d as f64;
                row.iter().map(|&c| ((c + params.alpha) / total).ln()).collect()
            })
            .collect();
        NaiveBayesModel {
            log_prior,
            feature_log_prob,
        }
    }

    pub fn predict_proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let (idx, val) = x.row(i);
        let mut scores: Vec<f64> = self
            .log_prior
            .iter()
            .zip(&self.feature_log_prob)
            .map(|(&prior, logp)| {
                prior
                    + idx
                        .iter()
                        .zip(val)
                        .filter(|(_, &v)| v > 0.0)
                        .map(|(&j, &v)| v * logp[j as usize])
                        .sum::<f64>()
            })
            .collect();
        softmax_in_place(&mut scores);
        scores
    }
}
