//! Ranks the vocabulary of a synthetic corpus by chi-square for each task and
//! shows the top features next to the words the generator planted.

use tritask::corpus::Task;
use tritask::synth::{generate_synthetic, SyntheticSpec};
use tritask::vsm::{build_vocabulary, select_features};

fn main() -> tritask::Result<()> {
    let spec = SyntheticSpec {
        instances: 1500,
        ..Default::default()
    };
    let corpus = generate_synthetic(&spec, "train")?;
    let vocab = build_vocabulary(&corpus, usize::MAX)?;
    println!("{} distinct tokens", vocab.len());

    for task in Task::ALL {
        let fs = select_features(&corpus, task, 10)?;
        println!("\n{task}");
        for f in fs.features() {
            let planted = (0..task.n_classes()).find(|&c| spec.markers(task, c).contains(&f.term));
            let tag = planted.map_or("-".to_string(), |c| task.class_name(c).to_string());
            println!(
                "  {:<10} chi2 {:>9.2}  freq {:>5}  marker of {tag}",
                f.term, f.chi2, f.frequency
            );
        }
    }
    Ok(())
}
