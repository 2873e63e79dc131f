use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::logistic::LogisticModel;
use super::matrix::FeatureMatrix;
use super::mlp::MlpModel;
use super::svm::SvmModel;
use super::{Hyperparameters, LearnerSpec};
use crate::error::{Error, Result};

const STEP: f64 = 1e-5;
const MAX_ROWS: usize = 20;
const MAX_DIMS: usize = 10;
/// Rows whose hinge slack is this close to zero are skipped for the SVM.
const KINK_MARGIN: f64 = 1e-3;

/// Loss and, where defined, its gradient at a flat parameter vector.
type Objective<'a> = dyn Fn(&[f64]) -> (f64, Option<Vec<f64>>) + 'a;

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Compares the analytic loss gradient with central differences at random
/// parameters drawn from `spec.seed`, returning the largest relative
/// deviation over all parameters.
pub fn gradient_check(spec: &LearnerSpec, x: &FeatureMatrix, y: &[usize]) -> Result<f64> {
    if x.n_rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            actual: y.len(),
        });
    }
    if y.is_empty() || y.len() > MAX_ROWS || x.n_cols() > MAX_DIMS {
        return Err(Error::InvalidArgument(format!(
            "gradient check needs 1..={MAX_ROWS} rows and at most {MAX_DIMS} columns"
        )));
    }
    let k = (y.iter().copied().max().unwrap() + 1).max(2);
    let d = x.n_cols();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dist = Uniform::new(-0.5, 0.5);
    let random = |n: usize, rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| dist.sample(rng)).collect() };

    let (theta, objective): (Vec<f64>, Box<Objective<'_>>) = match spec.hyper {
        Hyperparameters::LogisticRegression(p) => {
            let base = LogisticModel::zeros(k, d);
            let theta = random(base.n_params(), &mut rng);
            let f = move |t: &[f64]| {
                let mut m = base.clone();
                m.set_flat(t);
                let (l, g) = m.objective_and_gradient(x, y, p.l2);
                (l, Some(g))
            };
            (theta, Box::new(f))
        }
        Hyperparameters::LinearSvm(p) => {
            let theta = random(k * (d + 1), &mut rng);
            let model = SvmModel::with_flat(k, d, theta.clone());
            let keep: Vec<bool> = (0..y.len())
                .map(|i| {
                    model.margins_row(x, i).iter().enumerate().all(|(c, &m)| {
                        let t = if y[i] == c { 1.0 } else { -1.0 };
                        (1.0 - t * m).abs() > KINK_MARGIN
                    })
                })
                .collect();
            let f = move |t: &[f64]| {
                let m = SvmModel::with_flat(k, d, t.to_vec());
                let (l, g) = m.objective_and_gradient(x, y, p.l2, &keep);
                (l, Some(g))
            };
            (theta, Box::new(f))
        }
        Hyperparameters::Mlp(p) => {
            let base = MlpModel::init(d, p.hidden, k, &mut rng);
            let theta = random(base.flat().len(), &mut rng);
            let f = move |t: &[f64]| {
                let mut m = base.clone();
                m.flat_mut().copy_from_slice(t);
                let (l, g) = m.objective_and_gradient(x, y);
                (l, Some(g))
            };
            (theta, Box::new(f))
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "{} has no differentiable training objective",
                other.kind()
            )))
        }
    };

    let analytic = objective(&theta).1.expect("gradient");
    let mut worst = 0.0f64;
    let mut t = theta.clone();
    for j in 0..theta.len() {
        t[j] = theta[j] + STEP;
        let up = objective(&t).0;
        t[j] = theta[j] - STEP;
        let down = objective(&t).0;
        t[j] = theta[j];
        worst = worst.max(relative(analytic[j], (up - down) / (2.0 * STEP)));
    }
    Ok(worst)
}
