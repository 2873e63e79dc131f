//! Trains each of the seven learners on the same dense features and reports
//! train and held-out accuracy, plus an analytic gradient check for the
//! differentiable ones.

use std::time::Instant;

use tritask::corpus::Task;
use tritask::features::DenseFeatureSpace;
use tritask::learners::{gradient_check, predict, train_learner, FeatureMatrix, LearnerKind, LearnerSpec};
use tritask::synth::{generate_synthetic, split_corpus, SyntheticSpec};
use tritask::text::FeatureUnit;
use tritask::vsm::tokenize_corpus;

fn accuracy(p: &[usize], y: &[usize]) -> f64 {
    p.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
}

fn main() -> tritask::Result<()> {
    let spec = SyntheticSpec {
        instances: 1600,
        separation: 0.4,
        noise: 0.05,
        ..Default::default()
    };
    let all = generate_synthetic(&spec, "synthetic")?;
    let parts = split_corpus(&all, &[("train", 1200), ("dev", 400)])?;
    let task = Task::Aggression;
    let (train_docs, dev_docs) = (
        tokenize_corpus(&parts[0], FeatureUnit::Token),
        tokenize_corpus(&parts[1], FeatureUnit::Token),
    );
    let (y, gold) = (parts[0].task_labels(task)?, parts[1].task_labels(task)?);
    let space = DenseFeatureSpace::fit(&train_docs, &y, task, 500, FeatureUnit::Token)?;
    let (x, dx) = (space.transform(&train_docs)?, space.transform(&dev_docs)?);
    println!(
        "{} rows x {} columns (chi2 terms + surface counts)",
        x.n_rows(),
        x.n_cols()
    );

    for kind in LearnerKind::ALL {
        let start = Instant::now();
        let model = train_learner(&LearnerSpec::for_experiment(kind, 1), &x, &y)?;
        println!(
            "{kind:<20} train {:.3}  dev {:.3}  ({:.2?})",
            accuracy(&predict(&model, &x)?, &y),
            accuracy(&predict(&model, &dx)?, &gold),
            start.elapsed()
        );
    }

    let small = FeatureMatrix::from_dense(&[
        [0.5, -1.0, 2.0],
        [1.5, 0.0, -0.5],
        [-1.0, 1.0, 0.25],
        [0.0, 2.0, 1.0],
    ])?;
    let labels = [0, 1, 2, 1];
    for kind in [
        LearnerKind::LogisticRegression,
        LearnerKind::LinearSvm,
        LearnerKind::Mlp,
    ] {
        let dev = gradient_check(&LearnerSpec::new(kind, 7), &small, &labels)?;
        println!("gradient check {kind:<20} max relative deviation {dev:.2e}");
    }
    Ok(())
}
