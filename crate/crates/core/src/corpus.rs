//! ComMA-format datasets: one message per row with an id, the raw text and,
//! for labeled splits, the aggression / gender / communal labels.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::tokenize;

/// One of the three labeling tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Aggression,
    Gender,
    Communal,
}

impl Task {
    pub const ALL: [Task; 3] = [Task::Aggression, Task::Gender, Task::Communal];

    pub fn name(self) -> &'static str {
        match self {
            Task::Aggression => "aggression",
            Task::Gender => "gender",
            Task::Communal => "communal",
        }
    }

    /// Class names in canonical order. Class indices used throughout the
    /// crate index into this slice.
    pub fn classes(self) -> &'static [&'static str] {
        match self {
            Task::Aggression => &["OAG", "CAG", "NAG"],
            Task::Gender => &["GEN", "NGEN"],
            Task::Communal => &["COM", "NCOM"],
        }
    }

    pub fn n_classes(self) -> usize {
        self.classes().len()
    }

    pub fn class_name(self, class: usize) -> &'static str {
        self.classes()[class]
    }

    /// Case-insensitive lookup, surrounding whitespace ignored.
    pub fn parse_class(self, value: &str) -> Option<usize> {
        let v = value.trim();
        self.classes().iter().position(|c| c.eq_ignore_ascii_case(v))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aggression" | "a" => Ok(Task::Aggression),
            "gender" | "g" => Ok(Task::Gender),
            "communal" | "c" => Ok(Task::Communal),
            _ => Err(Error::UnknownTask(s.to_string())),
        }
    }
}

/// Gold or predicted labels for all three tasks, stored as class indices
/// into [`Task::classes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabelTriple {
    aggression: u8,
    gender: u8,
    communal: u8,
}

impl LabelTriple {
    /// Builds a triple from class indices; panics if an index is out of range.
    pub fn from_indices(aggression: usize, gender: usize, communal: usize) -> Self {
        assert!(
            aggression < 3 && gender < 2 && communal < 2,
            "label index out of range"
        );
        LabelTriple {
            aggression: aggression as u8,
            gender: gender as u8,
            communal: communal as u8,
        }
    }

    pub fn parse(aggression: &str, gender: &str, communal: &str) -> Option<Self> {
        Some(Self::from_indices(
            Task::Aggression.parse_class(aggression)?,
            Task::Gender.parse_class(gender)?,
            Task::Communal.parse_class(communal)?,
        ))
    }

    pub fn get(&self, task: Task) -> usize {
        match task {
            Task::Aggression => self.aggression as usize,
            Task::Gender => self.gender as usize,
            Task::Communal => self.communal as usize,
        }
    }

    pub fn set(&mut self, task: Task, class: usize) {
        assert!(class < task.n_classes(), "class {class} out of range for {task}");
        match task {
            Task::Aggression => self.aggression = class as u8,
            Task::Gender => self.gender = class as u8,
            Task::Communal => self.communal = class as u8,
        }
    }

    pub fn name(&self, task: Task) -> &'static str {
        task.class_name(self.get(task))
    }
}

impl fmt::Display for LabelTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})",
            self.name(Task::Aggression),
            self.name(Task::Gender),
            self.name(Task::Communal)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub text: String,
    pub labels: Option<LabelTriple>,
}

/// Texts that count as missing: empty, whitespace-only, or a literal NaN.
pub fn is_missing_text(text: &str) -> bool {
    let t = text.trim();
    t.is_empty() || t == "NaN" || t == "nan"
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    split: String,
    instances: Vec<Instance>,
    labeled: bool,
}

impl Corpus {
    /// Validates the corpus invariants: non-empty unique ids, no missing
    /// texts, and either every instance labeled or none.
    pub fn new(split: impl Into<String>, instances: Vec<Instance>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(instances.len());
        for inst in &instances {
            if inst.id.is_empty() {
                return Err(Error::InvalidArgument("instance with empty id".into()));
            }
            if is_missing_text(&inst.text) {
                return Err(Error::InvalidArgument(format!(
                    "instance {} has missing text",
                    inst.id
                )));
            }
            if !seen.insert(inst.id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate id {}", inst.id)));
            }
        }
        let n_labeled = instances.iter().filter(|i| i.labels.is_some()).count();
        if n_labeled != 0 && n_labeled != instances.len() {
            return Err(Error::InvalidArgument(
                "corpus mixes labeled and unlabeled instances".into(),
            ));
        }
        let labeled = !instances.is_empty() && n_labeled == instances.len();
        Ok(Corpus {
            split: split.into(),
            instances,
            labeled,
        })
    }

    pub fn split(&self) -> &str {
        &self.split
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.labeled
    }

    /// Class indices of `task` for every instance, or [`Error::Unlabeled`].
    pub fn task_labels(&self, task: Task) -> Result<Vec<usize>> {
        if !self.labeled {
            return Err(Error::Unlabeled);
        }
        Ok(self
            .instances
            .iter()
            .map(|i| i.labels.expect("labeled corpus").get(task))
            .collect())
    }

    /// Drops the labels, keeping ids and texts.
    pub fn unlabeled(&self) -> Corpus {
        Corpus {
            split: self.split.clone(),
            instances: self
                .instances
                .iter()
                .map(|i| Instance {
                    labels: None,
                    ..i.clone()
                })
                .collect(),
            labeled: false,
        }
    }
}

/// Rows removed during ingestion, by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropReport {
    pub dropped: usize,
    pub reasons: BTreeMap<String, usize>,
}

impl DropReport {
    fn record(&mut self, reason: &str) {
        self.dropped += 1;
        *self.reasons.entry(reason.to_string()).or_default() += 1;
    }

    /// Path of the JSON sidecar written next to `dataset`.
    pub fn sidecar_path(dataset: &Path) -> PathBuf {
        let mut name = dataset.file_name().unwrap_or_default().to_os_string();
        name.push(".drops.json");
        dataset.with_file_name(name)
    }

    pub fn write_sidecar(&self, dataset: &Path) -> Result<PathBuf> {
        let path = Self::sidecar_path(dataset);
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

impl fmt::Display for DropReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dropped {} rows", self.dropped)?;
        if !self.reasons.is_empty() {
            let parts: Vec<String> = self.reasons.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " ({})", parts.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    pub labeled: bool,
    /// Unknown label strings become a hard error instead of a dropped row.
    pub strict: bool,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub corpus: Corpus,
    pub report: DropReport,
    /// Data rows read from the file (retained + dropped).
    pub rows: usize,
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

const LABEL_COLUMNS: [(&str, Task); 3] = [
    ("aggression", Task::Aggression),
    ("gender", Task::Gender),
    ("communal", Task::Communal),
];

/// Lenient load; see [`load_dataset_with`].
pub fn load_dataset(path: impl AsRef<Path>, labeled: bool) -> Result<Loaded> {
    load_dataset_with(
        path,
        LoadOptions {
            labeled,
            strict: false,
        },
    )
}

/// Reads a tab-separated file (or RFC-4180 comma-separated when the
/// extension is `.csv`) with a header naming `id`, `text` and, for labeled
/// data, `aggression`, `gender`, `communal`. Header names are matched
/// case-insensitively and column order is free.
///
/// Rows with a missing id or text, malformed fields, unknown labels (lenient
/// mode) or an already-seen id are dropped and counted in the report.
pub fn load_dataset_with(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Loaded> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let csv_mode = is_csv(path);
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(if csv_mode { b',' } else { b'\t' })
        .quoting(csv_mode)
        .flexible(true)
        .has_headers(true)
        .from_reader(file);

    let dataset_err = |message: String| Error::Dataset {
        path: path.to_path_buf(),
        message,
    };

    let header: Vec<String> = reader
        .byte_headers()?
        .iter()
        .map(|h| {
            String::from_utf8_lossy(h)
                .trim()
                .trim_start_matches('\u{feff}')
                .to_ascii_lowercase()
        })
        .collect();
    let column = |name: &str| header.iter().position(|h| h == name);
    let id_col = column("id").ok_or_else(|| dataset_err("missing required column `id`".into()))?;
    let text_col = column("text").ok_or_else(|| dataset_err("missing required column `text`".into()))?;
    let label_cols = if opts.labeled {
        let mut cols = [0usize; 3];
        for (slot, (name, _)) in cols.iter_mut().zip(LABEL_COLUMNS) {
            *slot = column(name)
                .ok_or_else(|| dataset_err(format!("labeled load but column `{name}` is absent")))?;
        }
        Some(cols)
    } else {
        None
    };

    let mut report = DropReport::default();
    let mut instances = Vec::new();
    let mut seen = HashSet::new();
    let mut rows = 0usize;
    let mut record = csv::ByteRecord::new();

    while reader.read_byte_record(&mut record)? {
        rows += 1;
        if record.len() != header.len() {
            report.record("malformed_row");
            continue;
        }
        let fields: Option<Vec<&str>> = record.iter().map(|f| std::str::from_utf8(f).ok()).collect();
        let Some(fields) = fields else {
            report.record("invalid_utf8");
            continue;
        };
        let id = fields[id_col].trim();
        let text = fields[text_col];
        if id.is_empty() {
            report.record("empty_id");
            continue;
        }
        if is_missing_text(text) {
            report.record("empty_text");
            continue;
        }
        let labels = match label_cols {
            None => None,
            Some(cols) => {
                let mut idx = [0usize; 3];
                let mut bad = None;
                for ((slot, &col), (name, task)) in idx.iter_mut().zip(&cols).zip(LABEL_COLUMNS) {
                    match task.parse_class(fields[col]) {
                        Some(c) => *slot = c,
                        None => {
                            bad = Some((name, fields[col]));
                            break;
                        }
                    }
                }
                if let Some((column, value)) = bad {
                    if opts.strict {
                        return Err(Error::InvalidLabel {
                            row: rows,
                            column,
                            value: value.to_string(),
                        });
                    }
                    warn!("{}: row {rows}: unknown {column} label {value:?}", path.display());
                    report.record("bad_label");
                    continue;
                }
                Some(LabelTriple::from_indices(idx[0], idx[1], idx[2]))
            }
        };
        if !seen.insert(id.to_string()) {
            warn!(
                "{}: duplicate id {id:?}, keeping first occurrence",
                path.display()
            );
            report.record("duplicate_id");
            continue;
        }
        instances.push(Instance {
            id: id.to_string(),
            text: text.to_string(),
            labels,
        });
    }

    let split = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let corpus = Corpus::new(split, instances)?;
    Ok(Loaded { corpus, report, rows })
}

/// Writes `corpus` in the format [`load_dataset`] reads, chosen by the
/// extension of `path`. Tab-separated output cannot carry tabs or line breaks
/// inside a field; such corpora must be saved as `.csv`.
pub fn save_dataset(corpus: &Corpus, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv_mode = is_csv(path);
    if !csv_mode {
        if let Some(bad) = corpus
            .instances
            .iter()
            .find(|i| [&i.id, &i.text].iter().any(|f| f.contains(['\t', '\n', '\r'])))
        {
            return Err(Error::InvalidArgument(format!(
                "instance {} contains a tab or line break; save as .csv instead",
                bad.id
            )));
        }
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::WriterBuilder::new()
        .delimiter(if csv_mode { b',' } else { b'\t' })
        .quote_style(if csv_mode {
            csv::QuoteStyle::Necessary
        } else {
            csv::QuoteStyle::Never
        })
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    if corpus.labeled {
        writer.write_record(["id", "text", "aggression", "gender", "communal"])?;
    } else {
        writer.write_record(["id", "text"])?;
    }
    for inst in &corpus.instances {
        match inst.labels {
            Some(l) if corpus.labeled => writer.write_record([
                inst.id.as_str(),
                inst.text.as_str(),
                l.name(Task::Aggression),
                l.name(Task::Gender),
                l.name(Task::Communal),
            ])?,
            _ => writer.write_record([inst.id.as_str(), inst.text.as_str()])?,
        }
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub instances: usize,
    pub tokens: usize,
    pub chars: usize,
}

/// Instance, token and Unicode scalar counts over a corpus.
pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    corpus
        .instances
        .iter()
        .fold(CorpusStats::default(), |mut acc, inst| {
            acc.instances += 1;
            acc.tokens += tokenize(&inst.text).len();
            acc.chars += inst.text.chars().count();
            acc
        })
}
