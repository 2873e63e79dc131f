//! Sweeps feature counts and K for the cosine KNN on a synthetic split,
//! then classifies a couple of hand-written messages with the best cell.

use tritask::corpus::Task;
use tritask::knn::{knn_fit, knn_predict, knn_sweep_with, SweepConfig};
use tritask::synth::{generate_synthetic, split_corpus, SyntheticSpec};
use tritask::text::{FeatureUnit, TokenizedDoc};
use tritask::vsm::select_features;

fn main() -> tritask::Result<()> {
    let spec = SyntheticSpec {
        instances: 2000,
        separation: 0.5,
        ..Default::default()
    };
    let all = generate_synthetic(&spec, "synthetic")?;
    let parts = split_corpus(&all, &[("train", 1500), ("dev", 500)])?;
    let (train, dev) = (&parts[0], &parts[1]);
    let config = SweepConfig {
        k_values: vec![1, 3, 5, 10, 25],
        feature_counts: vec![50, 200, 1000, 3000],
        unit: FeatureUnit::Token,
    };

    let task = Task::Aggression;
    let grid = knn_sweep_with(train, dev, task, &config)?;
    print!("{:>6}", "n \\ K");
    for k in &grid.k_values {
        print!("{k:>8}");
    }
    println!();
    for &n in &grid.feature_counts {
        print!("{n:>6}");
        for &k in &grid.k_values {
            print!("{:>8.3}", grid.accuracy(n, k).unwrap_or(f64::NAN));
        }
        println!();
    }
    println!(
        "best: {} features, K = {}, accuracy {:.3}",
        grid.best.n, grid.best.k, grid.best.accuracy
    );

    let fs = select_features(train, task, grid.best.n)?;
    let model = knn_fit(train, task, &fs, grid.best.k)?;
    for class in 0..task.n_classes() {
        let text = spec.markers(task, class).join(" ");
        let got = knn_predict(&model, &TokenizedDoc::new("q", &text));
        println!("{text:?} -> {}", task.class_name(got));
    }
    Ok(())
}
