//! Multiclass AdaBoost (SAMME) over depth-1 decision stumps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;
use super::tree::{grow, ColumnIndex, GrowParams, Target, Tree};
use super::{argmax, softmax_in_place};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostParams {
    pub n_rounds: usize,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        AdaBoostParams { n_rounds: 50 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    n_classes: usize,
    stumps: Vec<Tree>,
    alphas: Vec<f64>,
}

impl AdaBoostModel {
    pub fn fit(params: &AdaBoostParams, x: &FeatureMatrix, y: &[usize], n_classes: usize) -> Self {
        let n = y.len();
        let k_f = n_classes as f64;
        let index = ColumnIndex::new(x);
        let target = Target::Classes { y, n_classes };
        let grow_params = GrowParams {
            max_depth: 1,
            max_features: None,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut w = vec![1.0 / n as f64; n];
        let mut stumps = Vec::new();
        let mut alphas = Vec::new();

        for _ in 0..params.n_rounds.max(1) {
            let stump = grow(x, &index, &target, &w, &grow_params, &mut rng);
            let miss: Vec<bool> = (0..n).map(|i| argmax(stump.predict_row(x, i)) != y[i]).collect();
            let total: f64 = w.iter().sum();
            let err = miss
                .iter()
                .zip(&w)
                .filter(|(m, _)| **m)
                .map(|(_, w)| w)
                .sum::<f64>()
                / total;

            if err <= 0.0 {
                stumps.push(stump);
                alphas.push(1.0);
                break;
            }
            if err >= 1.0 - 1.0 / k_f {
                if stumps.is_empty() {
                    stumps.push(stump);
                    alphas.push(1.0);
                }
                break;
            }
            let alpha = ((1.0 - err) / err).ln() + (k_f - 1.0).ln();
            for (wi, &m) in w.iter_mut().zip(&miss) {
                if m {
                    *wi *= alpha.exp();
                }
            }
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|wi| *wi /= s);
            stumps.push(stump);
            alphas.push(alpha);
        }
        AdaBoostModel {
            n_classes,
            stumps,
            alphas,
        }
    }

    /// `softmax(f / (K - 1))`, where `f` is the alpha-weighted vote share of
    /// each class.
    pub fn predict_proba_row(&self, x: &FeatureMatrix, i: usize) -> Vec<f64> {
        let mut f = vec![0.0; self.n_classes];
        for (stump, &a) in self.stumps.iter().zip(&self.alphas) {
            f[argmax(stump.predict_row(x, i))] += a;
        }
        let total: f64 = self.alphas.iter().sum();
        let denom = total * (self.n_classes as f64 - 1.0).max(1.0);
        f.iter_mut().for_each(|v| *v /= denom);
        softmax_in_place(&mut f);
        f
    }

    pub fn n_stumps(&self) -> usize {
        self.stumps.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_round_reproduces_the_stump() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![(i % 6) as f64, (i % 4) as f64]).collect();
        let y: Vec<usize> = (0..30)
            .map(|i| {
                if i % 6 < 2 {
                    0
                } else if i % 4 == 0 {
                    1
                } else {
                    2
                }
            })
            .collect();
        let x = FeatureMatrix::from_dense(&rows).unwrap();
        let model = AdaBoostModel::fit(&AdaBoostParams { n_rounds: 1 }, &x, &y, 3);
        let stump = grow(
            &x,
            &ColumnIndex::new(&x),
            &Target::Classes { y: &y, n_classes: 3 },
            &[1.0 / 30.0; 30],
            &GrowParams {
                max_depth: 1,
                max_features: None,
            },
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        for i in 0..30 {
            assert_eq!(
                argmax(&model.predict_proba_row(&x, i)),
                argmax(stump.predict_row(&x, i))
            );
        }
    }

    #[test]
    fn boosting_fits_an_interval() {
        // no single stump separates the middle band
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![i as f64]).collect();
        let y: Vec<usize> = (0..30).map(|i| usize::from((10..20).contains(&i))).collect();
        let x = FeatureMatrix::from_dense(&rows).unwrap();
        let model = AdaBoostModel::fit(&AdaBoostParams::default(), &x, &y, 2);
        let correct = (0..30)
            .filter(|&i| argmax(&model.predict_proba_row(&x, i)) == y[i])
            .count();
        assert_eq!(correct, 30);
    }
}
