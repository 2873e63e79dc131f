//! Scores a predictions file against gold labels.
//!
//! cargo run --example evaluate_predictions -- predictions.tsv gold.tsv
//!
//! With no arguments, scores a majority-class baseline and a noisy copy of
//! the gold labels on a synthetic corpus and prints both reports side by side.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tritask::corpus::{load_dataset, LabelTriple, Task};
use tritask::eval::{make_report, render_comparison, PredictionSet};
use tritask::synth::{generate_synthetic, SyntheticSpec};

fn main() -> tritask::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let [preds, gold] = args.as_slice() {
        let report = make_report(
            &PredictionSet::read_tsv(preds)?,
            &load_dataset(gold, true)?.corpus,
        )?;
        print!("{report}");
        return Ok(());
    }

    let gold = generate_synthetic(
        &SyntheticSpec {
            instances: 500,
            ..Default::default()
        },
        "gold",
    )?;
    let exact = PredictionSet::from_gold(&gold)?;
    let majority = PredictionSet::new(
        exact.ids.clone(),
        vec![LabelTriple::from_indices(2, 1, 1); exact.len()],
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noisy_labels = exact
        .labels
        .iter()
        .map(|t| {
            let mut t = *t;
            for task in Task::ALL {
                if rng.gen_bool(0.3) {
                    t.set(task, rng.gen_range(0..task.n_classes()));
                }
            }
            t
        })
        .collect();
    let noisy = PredictionSet::new(exact.ids.clone(), noisy_labels)?;

    let reports = vec![
        ("majority".to_string(), make_report(&majority, &gold)?),
        ("noisy".to_string(), make_report(&noisy, &gold)?),
    ];
    print!("{}", render_comparison(&reports));
    println!();
    print!("{}", reports[1].1);
    Ok(())
}
