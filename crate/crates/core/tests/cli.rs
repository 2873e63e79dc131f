use std::path::Path;
use std::process::{Command, Output};

fn tritask(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tritask"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn synth(dir: &Path) {
    let d = dir.to_str().unwrap();
    ok(&tritask(&[
        "synth", "--output", d, "--train", "400", "--dev", "150", "--test", "50",
    ]));
}

#[test]
fn missing_training_file_is_a_usage_error() {
    let out = tritask(&[
        "run",
        "--train",
        "/no/such/file.tsv",
        "--output",
        "/tmp/unused-tritask",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(tritask(&["run", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn run_twice_gives_identical_predictions() {
    let data = tempfile::tempdir().unwrap();
    synth(data.path());
    let train = data.path().join("train.tsv");
    let dev = data.path().join("dev.tsv");
    let test = data.path().join("test.tsv");
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = data.path().join(run);
        ok(&tritask(&[
            "run",
            "--train",
            train.to_str().unwrap(),
            "--dev",
            dev.to_str().unwrap(),
            "--test",
            test.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
            "--feature-counts",
            "500,1000",
            "--k-values",
            "1,3",
        ]));
        for f in [
            "model.json",
            "predictions_dev.tsv",
            "predictions_test.tsv",
            "report_dev.json",
            "manifest.json",
            "sweep_gender.tsv",
        ] {
            assert!(out.join(f).is_file(), "{f} missing");
        }
        outputs.push((
            std::fs::read(out.join("predictions_dev.tsv")).unwrap(),
            std::fs::read(out.join("predictions_test.tsv")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn train_predict_score_pipeline() {
    let data = tempfile::tempdir().unwrap();
    synth(data.path());
    let p = |f: &str| data.path().join(f).to_str().unwrap().to_string();
    let config = data.path().join("exp.toml");
    std::fs::write(
        &config,
        format!(
            "[experiment]\nsystem = \"s2\"\n[data]\ntrain = \"{}\"\noutput = \"{}\"\n[knn]\nsweep = false\nk = 3\n",
            p("train.tsv"),
            p("model")
        ),
    )
    .unwrap();
    ok(&tritask(&["train", "--config", config.to_str().unwrap()]));
    ok(&tritask(&[
        "predict",
        "--model",
        &p("model/model.json"),
        "--input",
        &p("dev.tsv"),
        "--output",
        &p("preds.tsv"),
    ]));
    assert!(data.path().join("preds.tsv.manifest.json").is_file());
    let out = tritask(&[
        "score",
        "--predictions",
        &p("preds.tsv"),
        "--gold",
        &p("dev.tsv"),
        "--json",
        &p("report.json"),
    ]);
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("aggression"), "{text}");
    ok(&tritask(&["report", &p("report.json"), &p("report.json")]));
    ok(&tritask(&["ingest", "--input", &p("dev.tsv"), "--labeled"]));
}
