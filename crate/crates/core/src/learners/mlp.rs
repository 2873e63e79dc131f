//! One-hidden-layer perceptron: ReLU hidden units, softmax output,
//! cross-entropy loss, mini-batch SGD with momentum.

use rand::distributions::{Distribution, Uniform};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::softmax_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: 100,
            batch_size: 32,
            learning_rate: 0.01,
            momentum: 0.9,
            epochs: 30,
        }
    }
}

/// Parameters live in one flat vector:
/// `w1[feature * hidden + unit]`, then `b1`, then `w2[class * hidden + unit]`,
/// then `b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    n_features: usize,
    hidden: usize,
    n_classes: usize,
    params: Vec<f64>,
}

impl MlpModel {
    /// Glorot-uniform weights, zero biases.
    pub fn init(n_features: usize, hidden: usize, n_classes: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut m = MlpModel {
            n_features,
            hidden,
            n_classes,
            params: vec![0.0; n_features * hidden + hidden + n_classes * hidden + n_classes],
        };
        let l1 = (6.0 / (n_features + hidden) as f64).sqrt();
        let l2 = (6.0 / (hidden + n_classes) as f64).sqrt();
        let u1 = Uniform::new_inclusive(-l1, l1);
        let u2 = Uniform::new_inclusive(-l2, l2);
        let (w1_end, w2_start, w2_end) = m.offsets();
        for p in &mut m.params[..w1_end] {
            *p = u1.sample(rng);
        }
        for p in &mut m.params[w2_start..w2_end] {
            *p = u2.sample(rng);
        }
        m
    }

    /// (end of w1, start of w2, end of w2)
    fn offsets(&self) -> (usize, usize, usize) {
        let w1_end = self.n_features * self.hidden;
        let w2_start = w1_end + self.hidden;
        (w1_end, w2_start, w2_start + self.n_classes * self.hidden)
    }

    pub(crate) fn flat(&self) -> &[f64] {
        &self.params
    }

    pub(crate) fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Hidden activations (post-ReLU) and output probabilities.
    fn forward(&self, x: &FeatureMatrix, i: usize) -> (Vec<f64>, Vec<f64>) {
        let h = self.hidden;
        let (w1_end, w2_start, w2_end) = self.offsets();
        let mut hid = self.params[w1_end..w2_start].to_vec();
        let (idx, val) = x.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            let col = &self.params[j as usize * h..(j as usize + 1) * h];
            for (a, &w) in hid.iter_mut().zip(col) {
                *a += w * v;
            }
        }
        hid.iter_mut().for_each(|a| *a = a.max(0.0));
        let w2 = &self.params[w2_start..w2_end];
        let b2 = &self.params[w2_end..];
        let mut out: Vec<f64> = (0..self.n_classes)
            .map(|k| {
                b2[k]
                    + w2[k * h..(k + 1) * h]
                        .iter()
                        .zip(&hid)
                        .map(|(w, a)| w * a)
                        .sum::<f64>()
            })
            .collect();
        softmax_in_place(&mut out);
        (hid, out)
    }

    pub fn predict_proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        self.forward(x, i).1
    }

    /// Adds the cross-entropy gradient of row `i`, scaled by `scale`, into
    /// `grad`; returns the row's loss.
    fn accumulate(&self, x: &FeatureMatrix, i: usize, yi: usize, scale: f64, grad: &mut [f64]) -> f64 {
        let h = self.hidden;
        let (w1_end, w2_start, w2_end) = self.offsets();
        let (hid, p) = self.forward(x, i);
        let w2 = &self.params[w2_start..w2_end];
        let mut dhid = vec![0.0; h];
        for (k, &pk) in p.iter().enumerate() {
            let delta = (pk - f64::from(u8::from(k == yi))) * scale;
            grad[w2_end + k] += delta;
            let g = &mut grad[w2_start + k * h..w2_start + (k + 1) * h];
            for u in 0..h {
                g[u] += delta * hid[u];
                dhid[u] += delta * w2[k * h + u];
            }
        }
        for u in 0..h {
            if hid[u] <= 0.0 {
                dhid[u] = 0.0;
            }
        }
        for (g, &d) in grad[w1_end..w2_start].iter_mut().zip(&dhid) {
            *g += d;
        }
        let (idx, val) = x.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            let g = &mut grad[j as usize * h..(j as usize + 1) * h];
            for (gu, &d) in g.iter_mut().zip(&dhid) {
                *gu += d * v;
            }
        }
        -p[yi].max(f64::MIN_POSITIVE).ln()
    }

    /// Mean cross-entropy over all rows and its gradient.
    pub(crate) fn objective_and_gradient(&self, x: &FeatureMatrix, y: &[usize]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; self.params.len()];
        let scale = 1.0 / y.len() as f64;
        let loss: f64 = y
            .iter()
            .enumerate()
            .map(|(i, &yi)| self.accumulate(x, i, yi, scale, &mut grad))
            .sum();
        (loss * scale, grad)
    }

    pub fn fit(params: &MlpParams, x: &FeatureMatrix, y: &[usize], n_classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = MlpModel::init(x.n_cols(), params.hidden, n_classes, &mut rng);
        let mut velocity = vec![0.0; model.params.len()];
        let mut grad = vec![0.0; model.params.len()];
        let mut order: Vec<usize> = (0..y.len()).collect();
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(params.batch_size.max(1)) {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let scale = 1.0 / batch.len() as f64;
                for &i in batch {
                    model.accumulate(x, i, y[i], scale, &mut grad);
                }
                for ((p, v), g) in model.params.iter_mut().zip(&mut velocity).zip(&grad) {
                    *v = params.momentum * *v - params.learning_rate * g;
                    *p += *v;
                }
            }
        }
        model
    }
}
