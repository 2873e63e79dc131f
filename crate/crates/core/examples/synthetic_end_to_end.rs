//! Generates a synthetic corpus, trains both systems on 3000 instances and
//! scores them on 1000 held-out ones.
//!
//! cargo run --example synthetic_end_to_end [-- s1|s2]

use std::time::Instant;

use tritask::eval::make_report;
use tritask::synth::{generate_synthetic, split_corpus, SyntheticSpec};
use tritask::system::{System, SystemModel, SystemSpec};

fn main() -> tritask::Result<()> {
    let only = std::env::args().nth(1);
    let spec = SyntheticSpec {
        instances: 4000,
        ..Default::default()
    };
    let all = generate_synthetic(&spec, "synthetic")?;
    let parts = split_corpus(&all, &[("train", 3000), ("dev", 1000)])?;
    let (train, dev) = (&parts[0], &parts[1]);

    for system in [System::S2, System::S1] {
        if only.as_deref().is_some_and(|o| o != system.to_string()) {
            continue;
        }
        let start = Instant::now();
        let model = SystemModel::train(&SystemSpec::new(system), train)?;
        let report = make_report(&model.predict(dev)?, dev)?;
        println!(
            "{system}: overall micro-F1 {:.4}, instance F1 {:.4} ({:.1?})",
            report.overall_micro_f1,
            report.instance_f1,
            start.elapsed()
        );
        for t in &report.tasks {
            println!("  {:<10} {:.4}", t.task.to_string(), t.micro_f1);
        }
    }
    Ok(())
}
