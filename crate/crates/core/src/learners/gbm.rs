//! Multiclass gradient boosting: each round fits one depth-limited
//! regression tree per class to the negative log-loss gradient `y - p`, with
//! one Newton step per leaf.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::softmax_in_place;
use super::tree::{grow, ColumnIndex, GrowParams, Target, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            n_rounds: 100,
            max_depth: 3,
            learning_rate: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    init: Vec<f64>,
    learning_rate: f64,
    /// `rounds[m][k]`: the tree for class `k` in round `m`.
    rounds: Vec<Vec<Tree>>,
}

impl GbmModel {
    pub fn fit(params: &GbmParams, x: &FeatureMatrix, y: &[usize], n_classes: usize) -> Self {
        Self::fit_staged(params, x, y, n_classes, |_, _| {})
    }

    /// Like [`Self::fit`], calling `on_round(m, raw_scores)` after each round
    /// with the training-set raw scores.
    pub(crate) fn fit_staged(
        params: &GbmParams,
        x: &FeatureMatrix,
        y: &[usize],
        n_classes: usize,
        mut on_round: impl FnMut(usize, &[Vec<f64>]),
    ) -> Self {
        let n = y.len();
        let k_f = n_classes as f64;
        let mut counts = vec![0.0f64; n_classes];
        for &c in y {
            counts[c] += 1.0;
        }
        let init: Vec<f64> = counts.iter().map(|c| (c / n as f64).ln()).collect();
        let mut raw: Vec<Vec<f64>> = vec![init.clone(); n];

        let index = ColumnIndex::new(x);
        let grow_params = GrowParams {
            max_depth: params.max_depth,
            max_features: None,
        };
        let ones = vec![1.0; n];
        // no feature sampling, so the stream is never drawn from
        let mut rng = ChaCha8Rng::seed_from_u64(0);

        let mut rounds = Vec::with_capacity(params.n_rounds);
        for m in 0..params.n_rounds {
            let probs: Vec<Vec<f64>> = raw
                .iter()
                .map(|r| {
                    let mut p = r.clone();
                    softmax_in_place(&mut p);
                    p
                })
                .collect();
            let mut trees = Vec::with_capacity(n_classes);
            for k in 0..n_classes {
                let resid: Vec<f64> = (0..n)
                    .map(|i| f64::from(u8::from(y[i] == k)) - probs[i][k])
                    .collect();
                let mut tree = grow(x, &index, &Target::Values(&resid), &ones, &grow_params, &mut rng);
                let leaves: Vec<usize> = (0..n).map(|i| tree.leaf_of(x, i)).collect();
                let mut num = vec![0.0; tree.nodes().len()];
                let mut den = vec![0.0; tree.nodes().len()];
                for (i, &leaf) in leaves.iter().enumerate() {
                    let r = resid[i];
                    num[leaf] += r;
                    den[leaf] += r.abs() * (1.0 - r.abs());
                }
                for leaf in 0..num.len() {
                    if matches!(tree.nodes()[leaf], super::tree::Node::Leaf { .. }) {
                        let gamma = if den[leaf].abs() < 1e-150 {
                            0.0
                        } else {
                            (k_f - 1.0) / k_f * num[leaf] / den[leaf]
                        };
                        tree.set_leaf(leaf, vec![gamma]);
                    }
                }
                for (i, &leaf) in leaves.iter().enumerate() {
                    if let super::tree::Node::Leaf { value } = &tree.nodes()[leaf] {
                        raw[i][k] += params.learning_rate * value[0];
                    }
                }
                trees.push(tree);
            }
            rounds.push(trees);
            on_round(m, &raw);
        }
        GbmModel {
            init,
            learning_rate: params.learning_rate,
            rounds,
        }
    }

    pub fn raw_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let mut raw = self.init.clone();
        for trees in &self.rounds {
            for (k, t) in trees.iter().enumerate() {
                raw[k] += self.learning_rate * t.predict_row(x, i)[0];
            }
        }
        raw
    }

    pub fn predict_proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let mut raw = self.raw_row(x, i);
        softmax_in_place(&mut raw);
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_loss(raw: &[Vec<f64>], y: &[usize]) -> f64 {
        raw.iter()
            .zip(y)
            .map(|(r, &c)| {
                let mut p = r.clone();
                softmax_in_place(&mut p);
                -p[c].ln()
            })
            .sum::<f64>()
            / y.len() as f64
    }

    #[test]
    fn training_loss_never_increases() {
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                vec![
                    (i % 5) as f64,
                    ((i * 7) % 11) as f64 / 3.0,
                    if i % 3 == 0 { 1.0 } else { 0.0 },
                ]
            })
            .collect();
        let y: Vec<usize> = (0..60).map(|i| (i % 5 + i % 3) % 3).collect();
        let x = FeatureMatrix::from_dense(&rows).unwrap();
        let mut losses = Vec::new();
        let model = GbmModel::fit_staged(&GbmParams::default(), &x, &y, 3, |_, raw| {
            losses.push(log_loss(raw, &y))
        });
        for w in losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
        // staged raw scores agree with inference
        let raw: Vec<Vec<f64>> = (0..60).map(|i| model.raw_row(&x, i)).collect();
        assert!((log_loss(&raw, &y) - losses.last().unwrap()).abs() < 1e-9);
    }
}
