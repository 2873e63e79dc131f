//! Command-line front end: `ingest`, `sweep`, `train`, `predict`, `score`,
//! `synth`, `report` and `run`.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
//! configuration error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Overrides};
use crate::corpus::{corpus_stats, load_dataset_with, save_dataset, Corpus, LoadOptions, Task};
use crate::error::{Error, Result};
use crate::eval::{make_report, render_comparison, EvalReport, PredictionSet};
use crate::knn::{self, SweepConfig, SweepGrid};
use crate::synth::{generate_synthetic, split_corpus, SyntheticSpec};
use crate::system::{System, SystemModel, SystemSpec};

#[derive(Debug, Parser)]
#[command(
    name = "tritask",
    version,
    about = "Three-task text classification experiments"
)]
pub struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a dataset, report drops and statistics, optionally re-save it.
    Ingest(IngestArgs),
    /// Grid-search KNN feature counts and K on the dev split.
    Sweep(ExperimentArgs),
    /// Train a system and save it.
    Train(ExperimentArgs),
    /// Predict label triples with a saved system.
    Predict(PredictArgs),
    /// Score a predictions file against gold labels.
    Score(ScoreArgs),
    /// Write synthetic labeled splits.
    Synth(SynthArgs),
    /// Show saved evaluation reports side by side.
    Report(ReportArgs),
    /// Sweep (S2), train, predict and score in one go.
    Run(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Require the three label columns.
    #[arg(long)]
    pub labeled: bool,
    /// Fail on unknown label values instead of dropping the row.
    #[arg(long)]
    pub strict: bool,
    /// Write the cleaned dataset here (format chosen by extension).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Every config key, as a flag of the same name.
#[derive(Debug, Args, Default)]
pub struct OverrideArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub system: Option<System>,
    /// Comma-separated task names.
    #[arg(long, value_delimiter = ',')]
    pub tasks: Option<Vec<String>>,
    /// `token` or `char-ngram`.
    #[arg(long)]
    pub unit: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub strict: Option<bool>,
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub dev: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, alias = "knn_features")]
    pub knn_features: Option<usize>,
    #[arg(short = 'k', long = "k")]
    pub k: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub sweep: Option<bool>,
    #[arg(long, alias = "k_values", value_delimiter = ',')]
    pub k_values: Option<Vec<usize>>,
    #[arg(long, alias = "feature_counts", value_delimiter = ',')]
    pub feature_counts: Option<Vec<usize>>,
    #[arg(long, alias = "stack_features")]
    pub stack_features: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
}

impl From<&OverrideArgs> for Overrides {
    fn from(a: &OverrideArgs) -> Self {
        Overrides {
            seed: a.seed,
            system: a.system,
            tasks: a.tasks.clone(),
            unit: a.unit.clone(),
            strict: a.strict,
            train: a.train.clone(),
            dev: a.dev.clone(),
            test: a.test.clone(),
            output: a.output.clone(),
            knn_features: a.knn_features,
            k: a.k,
            sweep: a.sweep,
            k_values: a.k_values.clone(),
            feature_counts: a.feature_counts.clone(),
            stack_features: a.stack_features,
            folds: a.folds,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// TOML config file; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: OverrideArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
    /// Predictions TSV to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 3000)]
    pub train: usize,
    #[arg(long, default_value_t = 1000)]
    pub dev: usize,
    #[arg(long, default_value_t = 0)]
    pub test: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub background_words: Option<usize>,
    #[arg(long)]
    pub markers_per_class: Option<usize>,
    #[arg(long)]
    pub min_tokens: Option<usize>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Evaluation report JSON files.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
}

/// Parses `std::env::args`, runs the command and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Sweep(a) => sweep(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Score(a) => score(a),
        Command::Synth(a) => synth(a),
        Command::Report(a) => report(a),
        Command::Run(a) => run(a),
    }
}

/// Resolved configuration: defaults, then the config file, then flags.
pub fn resolve_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    config.apply(&Overrides::from(&args.overrides));
    Ok(config)
}

fn sha256_file(path: &Path) -> Result<String> {
    let mut f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[derive(Debug, Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
}

/// Written beside every set of artifacts: what produced them and from what.
#[derive(Debug, Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    config_sha256: Option<String>,
    config: Option<ExperimentConfig>,
    parameters: BTreeMap<String, String>,
    inputs: Vec<FileEntry>,
    outputs: Vec<FileEntry>,
}

impl Manifest {
    fn new(command: &str, config: Option<&ExperimentConfig>) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_sha256: config.map(|c| hex::encode(Sha256::digest(c.to_toml().as_bytes()))),
            config: config.cloned(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn entry(path: &Path) -> Result<FileEntry> {
        Ok(FileEntry {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        })
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(Self::entry(path)?);
        Ok(())
    }

    fn output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(Self::entry(path)?);
        Ok(())
    }

    fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn has_label_columns(path: &Path) -> Result<bool> {
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    let first = text.split(|&b| b == b'\n').next().unwrap_or(&[]);
    let header = String::from_utf8_lossy(first).to_ascii_lowercase();
    let sep = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        ','
    } else {
        '\t'
    };
    let cols: Vec<&str> = header.split(sep).map(|c| c.trim().trim_matches('"')).collect();
    Ok(["aggression", "gender", "communal"]
        .iter()
        .all(|c| cols.contains(c)))
}

/// Loads a split, writing its drop report into `report_dir` (or beside the
/// file). Labels are read when all label columns are present.
fn load_split(path: &Path, strict: bool, require_labels: bool, report_dir: Option<&Path>) -> Result<Corpus> {
    let labeled = has_label_columns(path)?;
    if require_labels && !labeled {
        return Err(Error::Dataset {
            path: path.to_path_buf(),
            message: "labels required but label columns are absent".into(),
        });
    }
    let loaded = load_dataset_with(path, LoadOptions { labeled, strict })?;
    if loaded.report.dropped > 0 {
        eprintln!("{}: {}", path.display(), loaded.report);
    }
    let anchor = match report_dir {
        Some(dir) => dir.join(path.file_name().unwrap_or_default()),
        None => path.to_path_buf(),
    };
    loaded.report.write_sidecar(&anchor)?;
    Ok(loaded.corpus)
}

fn ingest(a: &IngestArgs) -> Result<()> {
    let loaded = load_dataset_with(
        &a.input,
        LoadOptions {
            labeled: a.labeled,
            strict: a.strict,
        },
    )?;
    eprintln!("{}: {}", a.input.display(), loaded.report);
    let stats = corpus_stats(&loaded.corpus);
    println!("rows\t{}", loaded.rows);
    println!("instances\t{}", stats.instances);
    println!("dropped\t{}", loaded.report.dropped);
    println!("tokens\t{}", stats.tokens);
    println!("chars\t{}", stats.chars);
    if loaded.corpus.is_labeled() {
        for task in Task::ALL {
            let labels = loaded.corpus.task_labels(task)?;
            let counts: Vec<String> = task
                .classes()
                .iter()
                .enumerate()
                .map(|(c, name)| format!("{name}={}", labels.iter().filter(|&&y| y == c).count()))
                .collect();
            println!("{task}\t{}", counts.join(" "));
        }
    }
    let mut manifest = Manifest::new("ingest", None);
    manifest.input(&a.input)?;
    manifest
        .parameters
        .insert("labeled".into(), a.labeled.to_string());
    manifest.parameters.insert("strict".into(), a.strict.to_string());
    let (sidecar, manifest_path) = match &a.output {
        Some(out) => {
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                create_dir(dir)?;
            }
            save_dataset(&loaded.corpus, out)?;
            manifest.output(out)?;
            (loaded.report.write_sidecar(out)?, manifest_sidecar(out))
        }
        None => (loaded.report.write_sidecar(&a.input)?, manifest_sidecar(&a.input)),
    };
    manifest.output(&sidecar)?;
    manifest.write(&manifest_path)
}

fn manifest_sidecar(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

fn sweep_config(config: &ExperimentConfig) -> Result<SweepConfig> {
    Ok(SweepConfig {
        k_values: config.knn.k_values.clone(),
        feature_counts: config.knn.feature_counts.clone(),
        unit: config.unit()?,
    })
}

/// Runs the sweep for every selected task and writes the grids into `out`.
fn sweep_tasks(
    config: &ExperimentConfig,
    train: &Corpus,
    dev: &Corpus,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<Vec<SweepGrid>> {
    let sc = sweep_config(config)?;
    let mut grids = Vec::new();
    for task in config.tasks()? {
        let grid = knn::knn_sweep_with(train, dev, task, &sc)?;
        let tsv = out.join(format!("sweep_{task}.tsv"));
        let json = out.join(format!("sweep_{task}.json"));
        grid.write_tsv(&tsv)?;
        grid.write_summary_json(&json)?;
        manifest.output(&tsv)?;
        manifest.output(&json)?;
        println!(
            "{task}: best n={} K={} accuracy={:.4}",
            grid.best.n, grid.best.k, grid.best.accuracy
        );
        grids.push(grid);
    }
    Ok(grids)
}

fn require_dev(config: &ExperimentConfig) -> Result<&Path> {
    config
        .data
        .dev
        .as_deref()
        .ok_or_else(|| Error::Config("the sweep needs a dev file (data.dev / --dev)".into()))
}

fn sweep(a: &ExperimentArgs) -> Result<()> {
    let config = resolve_config(a)?;
    config.validate(true)?;
    let dev_path = require_dev(&config)?;
    let out = config.data.output.clone();
    create_dir(&out)?;
    let mut manifest = Manifest::new("sweep", Some(&config));
    let train_path = config.data.train.as_deref().expect("validated");
    let train = load_split(train_path, config.experiment.strict, true, Some(&out))?;
    let dev = load_split(dev_path, config.experiment.strict, true, Some(&out))?;
    manifest.input(train_path)?;
    manifest.input(dev_path)?;
    sweep_tasks(&config, &train, &dev, &out, &mut manifest)?;
    manifest.write(&out.join("manifest.json"))
}

/// Trains the configured system, sweeping first when S2 has a labeled dev
/// split and sweeping is enabled.
fn train_system(
    config: &ExperimentConfig,
    train: &Corpus,
    dev: Option<&Corpus>,
    out: &Path,
    manifest: &mut Manifest,
) -> Result<SystemModel> {
    let mut spec: SystemSpec = config.system_spec()?;
    if config.experiment.system == System::S2 && config.knn.sweep {
        if let Some(dev) = dev.filter(|d| d.is_labeled()) {
            for grid in sweep_tasks(config, train, dev, out, manifest)? {
                for cell in spec.knn_cells.iter_mut().filter(|c| c.0 == grid.task) {
                    cell.1 = grid.best.n;
                    cell.2 = grid.best.k;
                }
            }
        }
    }
    SystemModel::train(&spec, train)
}

fn train(a: &ExperimentArgs) -> Result<()> {
    let config = resolve_config(a)?;
    config.validate(true)?;
    let out = config.data.output.clone();
    create_dir(&out)?;
    let mut manifest = Manifest::new("train", Some(&config));
    let train_path = config.data.train.as_deref().expect("validated");
    let train = load_split(train_path, config.experiment.strict, true, Some(&out))?;
    manifest.input(train_path)?;
    let dev = match config.data.dev.as_deref() {
        Some(p) => {
            manifest.input(p)?;
            Some(load_split(p, config.experiment.strict, false, Some(&out))?)
        }
        None => None,
    };
    let model = train_system(&config, &train, dev.as_ref(), &out, &mut manifest)?;
    let model_path = out.join("model.json");
    model.save(&model_path)?;
    manifest.output(&model_path)?;
    manifest.write(&out.join("manifest.json"))
}

fn predict(a: &PredictArgs) -> Result<()> {
    let model = SystemModel::load(&a.model)?;
    let corpus = load_split(&a.input, a.strict, false, a.output.parent())?;
    let preds = model.predict(&corpus)?;
    if let Some(dir) = a.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    preds.write_tsv(&a.output)?;
    let mut manifest = Manifest::new("predict", None);
    manifest.input(&a.model)?;
    manifest.input(&a.input)?;
    manifest.output(&a.output)?;
    manifest.write(&manifest_sidecar(&a.output))
}

fn score(a: &ScoreArgs) -> Result<()> {
    let preds = PredictionSet::read_tsv(&a.predictions)?;
    let gold = load_split(&a.gold, false, true, None)?;
    let report = make_report(&preds, &gold)?;
    print!("{report}");
    if let Some(json) = &a.json {
        report.write_json(json)?;
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<()> {
    let defaults = SyntheticSpec::default();
    let spec = SyntheticSpec {
        instances: a.train + a.dev + a.test,
        background_words: a.background_words.unwrap_or(defaults.background_words),
        markers_per_class: a.markers_per_class.unwrap_or(defaults.markers_per_class),
        min_tokens: a.min_tokens.unwrap_or(defaults.min_tokens),
        max_tokens: a.max_tokens.unwrap_or(defaults.max_tokens),
        separation: a.separation.unwrap_or(defaults.separation),
        noise: a.noise,
        seed: a.seed,
    };
    let all = generate_synthetic(&spec, "synthetic")?;
    let parts: Vec<(&str, usize)> = [("train", a.train), ("dev", a.dev), ("test", a.test)]
        .into_iter()
        .filter(|p| p.1 > 0)
        .collect();
    create_dir(&a.output)?;
    let mut manifest = Manifest::new("synth", None);
    manifest
        .parameters
        .insert("spec".into(), serde_json::to_string(&spec)?);
    for (corpus, (name, _)) in split_corpus(&all, &parts)?.iter().zip(&parts) {
        let path = a.output.join(format!("{name}.tsv"));
        save_dataset(corpus, &path)?;
        manifest.output(&path)?;
        println!("{}\t{}", path.display(), corpus.len());
    }
    manifest.write(&a.output.join("manifest.json"))
}

fn report(a: &ReportArgs) -> Result<()> {
    let reports = a
        .reports
        .iter()
        .map(|p| Ok((p.display().to_string(), EvalReport::read_json(p)?)))
        .collect::<Result<Vec<_>>>()?;
    print!("{}", render_comparison(&reports));
    Ok(())
}

fn run(a: &ExperimentArgs) -> Result<()> {
    let config = resolve_config(a)?;
    config.validate(true)?;
    run_config(&config)
}

/// The whole experiment for a resolved configuration. Artifacts land in
/// `config.data.output`.
pub fn run_config(config: &ExperimentConfig) -> Result<()> {
    config.validate(true)?;
    let out = config.data.output.clone();
    create_dir(&out)?;
    let mut manifest = Manifest::new("run", Some(config));
    let strict = config.experiment.strict;
    let train_path = config.data.train.as_deref().expect("validated");
    let train = load_split(train_path, strict, true, Some(&out))?;
    manifest.input(train_path)?;
    let mut splits = Vec::new();
    for (name, path) in [("dev", &config.data.dev), ("test", &config.data.test)] {
        if let Some(p) = path {
            splits.push((name, load_split(p, strict, false, Some(&out))?));
            manifest.input(p)?;
        }
    }
    let dev = splits.iter().find(|s| s.0 == "dev").map(|s| &s.1);
    let model = train_system(config, &train, dev, &out, &mut manifest)?;
    let model_path = out.join("model.json");
    model.save(&model_path)?;
    manifest.output(&model_path)?;

    for (name, corpus) in &splits {
        let preds = model.predict(corpus)?;
        let pred_path = out.join(format!("predictions_{name}.tsv"));
        preds.write_tsv(&pred_path)?;
        manifest.output(&pred_path)?;
        if corpus.is_labeled() {
            let report = make_report(&preds, corpus)?;
            println!(
                "{name}: overall micro-F1 {:.4}, instance F1 {:.4}",
                report.overall_micro_f1, report.instance_f1
            );
            let json = out.join(format!("report_{name}.json"));
            let text = out.join(format!("report_{name}.txt"));
            report.write_json(&json)?;
            fs::write(&text, report.to_string()).map_err(|e| Error::io(&text, e))?;
            manifest.output(&json)?;
            manifest.output(&text)?;
        }
    }
    let config_path = out.join("config.toml");
    fs::write(&config_path, config.to_toml()).map_err(|e| Error::io(&config_path, e))?;
    manifest.output(&config_path)?;
    manifest.write(&out.join("manifest.json"))
}
