//! Multinomial logistic regression trained by full-batch gradient descent.

use serde::{Deserialize, Serialize};

use super::matrix::{canonical_order, FeatureMatrix};
use super::softmax_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// L2 penalty on the weights (not the intercepts).
    pub l2: f64,
    /// Stop once the gradient norm falls to this value.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1e-4,
            tol: 1e-6,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    n_classes: usize,
    n_features: usize,
    /// `[class * n_features + feature]`
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LogisticModel {
    pub fn zeros(n_classes: usize, n_features: usize) -> Self {
        LogisticModel {
            n_classes,
            n_features,
            weights: vec![0.0; n_classes * n_features],
            bias: vec![0.0; n_classes],
        }
    }

    pub(crate) fn n_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.weights.iter().chain(&self.bias).copied().collect()
    }

    pub(crate) fn set_flat(&mut self, flat: &[f64]) {
        let w = self.weights.len();
        self.weights.copy_from_slice(&flat[..w]);
        self.bias.copy_from_slice(&flat[w..]);
    }

    fn scores_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        (0..self.n_classes)
            .map(|k| {
                let w = &self.weights[k * self.n_features..(k + 1) * self.n_features];
                self.bias[k] + x.row_dot(i, w)
            })
            .collect()
    }

    pub fn predict_proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let mut s = self.scores_row(x, i);
        softmax_in_place(&mut s);
        s
    }

    /// Mean cross-entropy plus `l2 / 2 * |W|^2`, and its gradient in the
    /// layout of [`Self::to_flat`].
    pub(crate) fn objective_and_gradient(&self, x: &FeatureMatrix, y: &[usize], l2: f64) -> (f64, Vec<f64>) {
        let n = y.len() as f64;
        let d = self.n_features;
        let mut grad = vec![0.0; self.n_params()];
        let mut loss = 0.0;
        for (i, &yi) in y.iter().enumerate() {
            let p = self.predict_proba_row(x, i);
            loss -= p[yi].max(f64::MIN_POSITIVE).ln();
            let (idx, val) = x.row(i);
            for (k, &pk) in p.iter().enumerate() {
                let delta = pk - if k == yi { 1.0 } else { 0.0 };
                for (&j, &v) in idx.iter().zip(val) {
                    grad[k * d + j as usize] += delta * v;
                }
                grad[self.weights.len() + k] += delta;
            }
        }
        loss /= n;
        for g in &mut grad {
            *g /= n;
        }
        let mut reg = 0.0;
        for (g, &w) in grad.iter_mut().zip(&self.weights) {
            *g += l2 * w;
            reg += w * w;
        }
        (loss + 0.5 * l2 * reg, grad)
    }

    #[cfg(test)]
    pub(crate) fn objective(&self, x: &FeatureMatrix, y: &[usize], l2: f64) -> f64 {
        let n = y.len() as f64;
        let ce: f64 = y
            .iter()
            .enumerate()
            .map(|(i, &yi)| -self.predict_proba_row(x, i)[yi].max(f64::MIN_POSITIVE).ln())
            .sum();
        ce / n + 0.5 * l2 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Gradient descent with step `1 / L`, where `L` bounds the curvature of
    /// the objective: half the mean squared row norm (intercept included)
    /// plus the penalty.
    pub fn fit(params: &LogisticParams, x: &FeatureMatrix, y: &[usize], n_classes: usize) -> Self {
        let order = canonical_order(x, y);
        let x = x.select_rows(&order);
        let y: Vec<usize> = order.iter().map(|&i| y[i]).collect();

        let mut model = LogisticModel::zeros(n_classes, x.n_cols());
        let mean_sq = (0..x.n_rows()).map(|i| x.row_norm_sq(i) + 1.0).sum::<f64>() / y.len() as f64;
        let step = 1.0 / (0.5 * mean_sq + params.l2);
        let mut flat = model.to_flat();
        for _ in 0..params.max_iter {
            let (_, grad) = model.objective_and_gradient(&x, &y, params.l2);
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm <= params.tol {
                break;
            }
            for (p, g) in flat.iter_mut().zip(&grad) {
                *p -= step * g;
            }
            model.set_flat(&flat);
        }
        model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_uniform() {
        let m = LogisticModel::zeros(3, 2);
        let x = FeatureMatrix::from_dense(&[vec![1.0, -2.0]]).unwrap();
        for p in m.predict_proba_row(&x, 0) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn bias_gradient_vanishes_on_balanced_data_at_zero() {
        let x = FeatureMatrix::from_dense(&[vec![1.0], vec![2.0], vec![1.0], vec![2.0]]).unwrap();
        let y = [0, 0, 1, 1];
        let (_, g) = LogisticModel::zeros(2, 1).objective_and_gradient(&x, &y, 1e-4);
        assert_eq!(g[2], 0.0);
        assert_eq!(g[3], 0.0);
    }

    #[test]
    fn objective_decreases_and_separates() {
        let x = FeatureMatrix::from_dense(&[vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]]).unwrap();
        let y = [0, 0, 1, 1];
        let p = LogisticParams::default();
        let start = LogisticModel::zeros(2, 1).objective(&x, &y, p.l2);
        let m = LogisticModel::fit(&p, &x, &y, 2);
        assert!(m.objective(&x, &y, p.l2) < start);
        assert!(m.predict_proba_row(&x, 0)[0] > 0.9);
        assert!(m.predict_proba_row(&x, 3)[1] > 0.9);
    }
}
