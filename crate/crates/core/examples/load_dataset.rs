//! Loads a ComMA-style TSV or CSV file, prints what was kept and dropped and
//! the corpus statistics.
//!
//! cargo run --example load_dataset -- data/train.tsv
//!
//! Without an argument a small file with a few broken rows is written to a
//! temporary directory and loaded instead.

use std::path::PathBuf;

use tritask::corpus::{corpus_stats, load_dataset_with, LoadOptions, Task};

const DEMO: &str = "id\ttext\taggression\tgender\tcommunal
m1\tyou people never learn\tOAG\tNGEN\tCOM
m2\tnice try 😂😂\tCAG\tNGEN\tNCOM
m3\tNaN\tNAG\tNGEN\tNCOM
m4\tkeep quiet girl, this is not for you\tOAG\tGEN\tNCOM
m2\tduplicate id\tNAG\tNGEN\tNCOM
m5\tgood morning everyone\tNAG\tNGEN\tNCOM
m6\tunknown label here\tMAYBE\tNGEN\tNCOM
";

fn main() -> tritask::Result<()> {
    let tmp = tempfile::tempdir().expect("temp dir");
    let path = match std::env::args().nth(1) {
        Some(p) => PathBuf::from(p),
        None => {
            let p = tmp.path().join("demo.tsv");
            std::fs::write(&p, DEMO).expect("write demo file");
            p
        }
    };

    let loaded = load_dataset_with(
        &path,
        LoadOptions {
            labeled: true,
            strict: false,
        },
    )?;
    println!(
        "{} data rows, {} kept, {} dropped",
        loaded.rows,
        loaded.corpus.len(),
        loaded.report.dropped
    );
    for (reason, n) in &loaded.report.reasons {
        println!("  dropped {n}: {reason}");
    }
    let sidecar = loaded.report.write_sidecar(&path)?;
    println!("drop report written to {}", sidecar.display());

    let stats = corpus_stats(&loaded.corpus);
    println!(
        "instances {}  tokens {}  chars {}",
        stats.instances, stats.tokens, stats.chars
    );
    for task in Task::ALL {
        let labels = loaded.corpus.task_labels(task)?;
        let counts: Vec<String> = task
            .classes()
            .iter()
            .enumerate()
            .map(|(c, name)| format!("{name}={}", labels.iter().filter(|&&y| y == c).count()))
            .collect();
        println!("{task:<10} {}", counts.join(" "));
    }
    Ok(())
}
