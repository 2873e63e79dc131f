//! One-vs-rest linear SVM: hinge loss with an L2 penalty, trained by
//! Pegasos-style SGD with step `1 / (lambda t)`. The intercept is an extra
//! always-one input and is penalized with the weights.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::softmax_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub l2: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { l2: 1e-4, epochs: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    n_classes: usize,
    n_features: usize,
    /// `[class * (n_features + 1) + feature]`; the last slot of each class
    /// row is the intercept.
    weights: Vec<f64>,
}

impl SvmModel {
    fn stride(&self) -> usize {
        self.n_features + 1
    }

    pub(crate) fn with_flat(n_classes: usize, n_features: usize, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), n_classes * (n_features + 1));
        SvmModel {
            n_classes,
            n_features,
            weights,
        }
    }

    pub fn margins_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let s = self.stride();
        (0..self.n_classes)
            .map(|k| {
                let w = &self.weights[k * s..(k + 1) * s];
                x.row_dot(i, &w[..self.n_features]) + w[self.n_features]
            })
            .collect()
    }

    /// Softmax over the one-vs-rest margins.
    pub fn predict_proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let mut m = self.margins_row(x, i);
        softmax_in_place(&mut m);
        m
    }

    pub fn fit(params: &SvmParams, x: &FeatureMatrix, y: &[usize], n_classes: usize, seed: u64) -> Self {
        let n = x.n_rows();
        let d = x.n_cols();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let schedule: Vec<usize> = (0..params.epochs)
            .flat_map(|_| {
                order.shuffle(&mut rng);
                order.clone()
            })
            .collect();

        let rows: Vec<Vec<f64>> = (0..n_classes)
            .into_par_iter()
            .map(|k| {
                // w = scale * v
                let mut v = vec![0.0; d + 1];
                let mut scale = 1.0;
                for (t, &i) in schedule.iter().enumerate() {
                    let t = (t + 1) as f64;
                    let eta = 1.0 / (params.l2 * t);
                    let target = if y[i] == k { 1.0 } else { -1.0 };
                    let margin = scale * (x.row_dot(i, &v[..d]) + v[d]);
                    let shrink = 1.0 - eta * params.l2;
                    if shrink <= 0.0 {
                        v.iter_mut().for_each(|w| *w = 0.0);
                        scale = 1.0;
                    } else {
                        scale *= shrink;
                    }
                    if target * margin < 1.0 {
                        let coef = eta * target / scale;
                        let (idx, val) = x.row(i);
                        for (&j, &xv) in idx.iter().zip(val) {
                            v[j as usize] += coef * xv;
                        }
                        v[d] += coef;
                    }
                    if scale < 1e-9 {
                        v.iter_mut().for_each(|w| *w *= scale);
                        scale = 1.0;
                    }
                }
                v.iter().map(|w| w * scale).collect()
            })
            .collect();
        SvmModel {
            n_classes,
            n_features: d,
            weights: rows.concat(),
        }
    }

    /// `sum_k [ l2/2 |w_k|^2 + mean_i hinge(y_ik * m_ik) ]` over the rows in
    /// `keep`, and its gradient. Rows sitting on a hinge kink should be left
    /// out of `keep` by the caller.
    pub(crate) fn objective_and_gradient(
        &self,
        x: &FeatureMatrix,
        y: &[usize],
        l2: f64,
        keep: &[bool],
    ) -> (f64, Vec<f64>) {
        let s = self.stride();
        let n = y.len() as f64;
        let mut grad: Vec<f64> = self.weights.iter().map(|w| l2 * w).collect();
        let mut loss = 0.5 * l2 * self.weights.iter().map(|w| w * w).sum::<f64>();
        for (i, &yi) in y.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            let m = self.margins_row(x, i);
            for (k, &mk) in m.iter().enumerate() {
                let target = if yi == k { 1.0 } else { -1.0 };
                let slack = 1.0 - target * mk;
                if slack > 0.0 {
                    loss += slack / n;
                    let (idx, val) = x.row(i);
                    for (&j, &v) in idx.iter().zip(val) {
                        grad[k * s + j as usize] -= target * v / n;
                    }
                    grad[k * s + self.n_features] -= target / n;
                }
            }
        }
        (loss, grad)
    }
}
