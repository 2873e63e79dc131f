//! Builds out-of-fold meta-features, fits the stacked ensemble for one task
//! and compares it with its base learners on held-out data. Also shows how
//! much in-fold meta-features overstate training accuracy.

use tritask::corpus::Task;
use tritask::features::DenseFeatureSpace;
use tritask::learners::{predict, train_learner, LearnerSpec};
use tritask::stacking::{
    fit_stacked, make_in_fold_meta_features, make_oof_meta_features, meta_width, predict_stacked,
};
use tritask::synth::{generate_synthetic, split_corpus, SyntheticSpec};
use tritask::text::FeatureUnit;
use tritask::vsm::tokenize_corpus;

fn accuracy(p: &[usize], y: &[usize]) -> f64 {
    p.iter().zip(y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
}

fn main() -> tritask::Result<()> {
    let spec = SyntheticSpec {
        instances: 1200,
        separation: 0.3,
        noise: 0.1,
        ..Default::default()
    };
    let all = generate_synthetic(&spec, "synthetic")?;
    let parts = split_corpus(&all, &[("train", 900), ("dev", 300)])?;
    let task = Task::Gender;
    let train_docs = tokenize_corpus(&parts[0], FeatureUnit::Token);
    let dev_docs = tokenize_corpus(&parts[1], FeatureUnit::Token);
    let (y, gold) = (parts[0].task_labels(task)?, parts[1].task_labels(task)?);
    let space = DenseFeatureSpace::fit(&train_docs, &y, task, 400, FeatureUnit::Token)?;
    let (x, dx) = (space.transform(&train_docs)?, space.transform(&dev_docs)?);

    let bases = LearnerSpec::base_learners(1);
    let final_spec = LearnerSpec::final_estimator(1);
    let n_classes = task.n_classes();

    let oof = make_oof_meta_features(&bases, &x, &y, n_classes, 5, 1)?;
    println!(
        "meta-features: {} x {} (expected width {})",
        oof.n_rows(),
        oof.n_cols(),
        meta_width(bases.len(), n_classes)
    );
    let leaky = make_in_fold_meta_features(&bases, &x, &y, n_classes)?;
    for (name, meta) in [("out-of-fold", &oof), ("in-fold", &leaky)] {
        let m = train_learner(&final_spec, meta, &y)?;
        println!(
            "final estimator on {name:<12} meta-features: training accuracy {:.3}",
            accuracy(&predict(&m, meta)?, &y)
        );
    }

    for base in &bases {
        let m = train_learner(base, &x, &y)?;
        println!(
            "{:<14} dev {:.3}",
            base.kind(),
            accuracy(&predict(&m, &dx)?, &gold)
        );
    }
    let model = fit_stacked(&bases, &final_spec, &x, &y, task, 5, 1)?;
    let out = predict_stacked(&model, &dx)?;
    println!("{:<14} dev {:.3}", "stacked", accuracy(&out.labels, &gold));
    println!("first distribution: {:?}", out.probabilities[0]);
    Ok(())
}
