//! Scoring of predicted label triples against gold labels.
//!
//! * Task micro-F1: `2TP / (2TP + FP + FN)` with counts pooled over the
//!   task's classes. With one label per instance it equals accuracy.
//! * Overall micro-F1: the same computation pooled over every
//!   (instance, task) decision.
//! * Instance F1: the fraction of instances whose whole triple is correct.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, LabelTriple, Task};
use crate::error::{Error, Result};

/// One predicted triple per instance id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionSet {
    pub ids: Vec<String>,
    pub labels: Vec<LabelTriple>,
}

impl PredictionSet {
    pub fn new(ids: Vec<String>, labels: Vec<LabelTriple>) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                actual: labels.len(),
            });
        }
        Ok(PredictionSet { ids, labels })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Gold labels of a labeled corpus as a prediction set.
    pub fn from_gold(corpus: &Corpus) -> Result<Self> {
        let labels = corpus
            .instances()
            .iter()
            .map(|i| i.labels.ok_or(Error::Unlabeled))
            .collect::<Result<Vec<_>>>()?;
        Ok(PredictionSet {
            ids: corpus.instances().iter().map(|i| i.id.clone()).collect(),
            labels,
        })
    }

    /// Writes `id, aggression, gender, communal` as tab-separated text.
    pub fn write_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "id\taggression\tgender\tcommunal").map_err(io)?;
        for (id, t) in self.ids.iter().zip(&self.labels) {
            if id.contains(['\t', '\n', '\r']) {
                return Err(Error::InvalidArgument(format!(
                    "id {id:?} cannot be written as TSV"
                )));
            }
            writeln!(
                w,
                "{id}\t{}\t{}\t{}",
                t.name(Task::Aggression),
                t.name(Task::Gender),
                t.name(Task::Communal)
            )
            .map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn read_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .quoting(false)
            .from_reader(file);
        let bad = |message: String| Error::Dataset {
            path: path.to_path_buf(),
            message,
        };
        let header: Vec<String> = reader
            .headers()?
            .iter()
            .map(|h| h.trim().trim_start_matches('\u{feff}').to_ascii_lowercase())
            .collect();
        let col = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| bad(format!("missing column `{name}`")))
        };
        let cols = [col("id")?, col("aggression")?, col("gender")?, col("communal")?];
        let mut set = PredictionSet::default();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let f = |c: usize| record.get(c).unwrap_or("");
            let triple = LabelTriple::parse(f(cols[1]), f(cols[2]), f(cols[3]))
                .ok_or_else(|| bad(format!("row {}: unknown label", row + 1)))?;
            set.ids.push(f(cols[0]).trim().to_string());
            set.labels.push(triple);
        }
        Ok(set)
    }
}

/// Pairs each gold instance with its prediction. Every gold id must be
/// predicted exactly once, and nothing else.
pub fn align(preds: &PredictionSet, gold: &Corpus) -> Result<Vec<(LabelTriple, LabelTriple)>> {
    let mut by_id: HashMap<&str, LabelTriple> = HashMap::with_capacity(preds.len());
    for (id, &t) in preds.ids.iter().zip(&preds.labels) {
        if by_id.insert(id.as_str(), t).is_some() {
            return Err(Error::IdMismatch(format!("id {id:?} predicted more than once")));
        }
    }
    if preds.len() != gold.len() {
        return Err(Error::IdMismatch(format!(
            "{} predictions for {} gold instances",
            preds.len(),
            gold.len()
        )));
    }
    gold.instances()
        .iter()
        .map(|inst| {
            let g = inst.labels.ok_or(Error::Unlabeled)?;
            let p = by_id
                .get(inst.id.as_str())
                .ok_or_else(|| Error::IdMismatch(format!("no prediction for id {:?}", inst.id)))?;
            Ok((*p, g))
        })
        .collect()
}

/// Pooled true positives, false positives and false negatives of
/// single-label decisions.
fn micro_counts(pairs: impl Iterator<Item = (usize, usize)>) -> (u64, u64, u64) {
    let (mut tp, mut fp, mut fneg) = (0, 0, 0);
    for (p, g) in pairs {
        if p == g {
            tp += 1;
        } else {
            // a false positive for the predicted class, a miss for the gold one
            fp += 1;
            fneg += 1;
        }
    }
    (tp, fp, fneg)
}

fn f1_from_counts(tp: u64, fp: u64, fneg: u64) -> f64 {
    let denom = 2 * tp + fp + fneg;
    if denom == 0 {
        0.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}

/// Micro-F1 of predicted against gold class indices.
pub fn micro_f1(pred: &[usize], gold: &[usize]) -> f64 {
    let (tp, fp, fneg) = micro_counts(pred.iter().copied().zip(gold.iter().copied()));
    f1_from_counts(tp, fp, fneg)
}

fn task_f1_pairs(pairs: &[(LabelTriple, LabelTriple)], task: Task) -> f64 {
    let (tp, fp, fneg) = micro_counts(pairs.iter().map(|(p, g)| (p.get(task), g.get(task))));
    f1_from_counts(tp, fp, fneg)
}

fn overall_pairs(pairs: &[(LabelTriple, LabelTriple)]) -> f64 {
    let (tp, fp, fneg) = micro_counts(
        pairs
            .iter()
            .flat_map(|(p, g)| Task::ALL.map(|t| (p.get(t), g.get(t)))),
    );
    f1_from_counts(tp, fp, fneg)
}

fn instance_pairs(pairs: &[(LabelTriple, LabelTriple)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    pairs.iter().filter(|(p, g)| p == g).count() as f64 / pairs.len() as f64
}

pub fn task_micro_f1(preds: &PredictionSet, gold: &Corpus, task: Task) -> Result<f64> {
    Ok(task_f1_pairs(&align(preds, gold)?, task))
}

pub fn overall_micro_f1(preds: &PredictionSet, gold: &Corpus) -> Result<f64> {
    Ok(overall_pairs(&align(preds, gold)?))
}

pub fn instance_f1(preds: &PredictionSet, gold: &Corpus) -> Result<f64> {
    Ok(instance_pairs(&align(preds, gold)?))
}

/// Mean of equally weighted task scores, which is what the pooled overall
/// micro-F1 reduces to when every instance carries all three tasks.
pub fn pooled_from_task_scores(scores: &[f64]) -> f64 {
    scores.iter().sum::<f64>() / scores.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: Task,
    pub accuracy: f64,
    pub micro_f1: f64,
    pub correct: u64,
    pub total: u64,
    pub classes: Vec<String>,
    /// `confusion[gold][predicted]`
    pub confusion: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub definitions: Vec<String>,
    pub instances: u64,
    pub exact_matches: u64,
    pub instance_f1: f64,
    pub overall_micro_f1: f64,
    pub tasks: Vec<TaskReport>,
}

const DEFINITIONS: [&str; 3] = [
    "task micro-F1 = 2TP/(2TP+FP+FN) pooled over the task's classes (equals accuracy)",
    "overall micro-F1 = the same, pooled over all (instance, task) decisions",
    "instance F1 = fraction of instances whose full label triple is correct",
];

pub fn make_report(preds: &PredictionSet, gold: &Corpus) -> Result<EvalReport> {
    Ok(report_from_pairs(&align(preds, gold)?))
}

fn report_from_pairs(pairs: &[(LabelTriple, LabelTriple)]) -> EvalReport {
    let n = pairs.len() as u64;
    let tasks = Task::ALL
        .iter()
        .map(|&task| {
            let k = task.n_classes();
            let mut confusion = vec![vec![0u64; k]; k];
            for (p, g) in pairs {
                confusion[g.get(task)][p.get(task)] += 1;
            }
            let correct = (0..k).map(|c| confusion[c][c]).sum();
            TaskReport {
                task,
                accuracy: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
                micro_f1: task_f1_pairs(pairs, task),
                correct,
                total: n,
                classes: task.classes().iter().map(|s| s.to_string()).collect(),
                confusion,
            }
        })
        .collect();
    EvalReport {
        definitions: DEFINITIONS.iter().map(|s| s.to_string()).collect(),
        instances: n,
        exact_matches: pairs.iter().filter(|(p, g)| p == g).count() as u64,
        instance_f1: instance_pairs(pairs),
        overall_micro_f1: overall_pairs(pairs),
        tasks,
    }
}

impl EvalReport {
    pub fn task(&self, task: Task) -> &TaskReport {
        self.tasks
            .iter()
            .find(|t| t.task == task)
            .expect("all tasks reported")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.definitions {
            writeln!(f, "# {d}")?;
        }
        writeln!(f, "{:<20} {:>8}", "metric", "value")?;
        writeln!(f, "{:<20} {:>8.4}", "instance F1", self.instance_f1)?;
        writeln!(f, "{:<20} {:>8.4}", "overall micro-F1", self.overall_micro_f1)?;
        for t in &self.tasks {
            writeln!(f, "{:<20} {:>8.4}", format!("{} micro-F1", t.task), t.micro_f1)?;
        }
        writeln!(
            f,
            "instances: {}, exact matches: {}",
            self.instances, self.exact_matches
        )?;
        for t in &self.tasks {
            writeln!(f)?;
            writeln!(f, "{} confusion (rows gold, columns predicted)", t.task)?;
            write!(f, "{:>6}", "")?;
            for c in &t.classes {
                write!(f, " {c:>6}")?;
            }
            writeln!(f)?;
            for (c, row) in t.classes.iter().zip(&t.confusion) {
                write!(f, "{c:>6}")?;
                for v in row {
                    write!(f, " {v:>6}")?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Side-by-side summary of several reports.
pub fn render_comparison(reports: &[(String, EvalReport)]) -> String {
    let mut out = format!("{:<24}", "metric");
    for (name, _) in reports {
        out += &format!(" {name:>12}");
    }
    out.push('\n');
    let mut line = |label: &str, get: &dyn Fn(&EvalReport) -> f64| {
        out += &format!("{label:<24}");
        for (_, r) in reports {
            out += &format!(" {:>12.4}", get(r));
        }
        out.push('\n');
    };
    line("instance F1", &|r| r.instance_f1);
    line("overall micro-F1", &|r| r.overall_micro_f1);
    for task in Task::ALL {
        line(&format!("{task} micro-F1"), &move |r| r.task(task).micro_f1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Instance;

    fn corpus(gold: &[LabelTriple]) -> Corpus {
        Corpus::new(
            "gold",
            gold.iter()
                .enumerate()
                .map(|(i, &t)| Instance {
                    id: format!("d{i}"),
                    text: "x".into(),
                    labels: Some(t),
                })
                .collect(),
        )
        .unwrap()
    }

    fn preds(labels: &[LabelTriple]) -> PredictionSet {
        PredictionSet::new(
            (0..labels.len()).map(|i| format!("d{i}")).collect(),
            labels.to_vec(),
        )
        .unwrap()
    }

    fn t(a: usize, g: usize, c: usize) -> LabelTriple {
        LabelTriple::from_indices(a, g, c)
    }

    #[test]
    fn three_of_four_aggression() {
        let gold = corpus(&[t(0, 0, 0), t(1, 0, 0), t(2, 0, 0), t(0, 0, 0)]);
        let p = preds(&[t(0, 0, 0), t(1, 0, 0), t(2, 0, 0), t(1, 0, 0)]);
        assert_eq!(task_micro_f1(&p, &gold, Task::Aggression).unwrap(), 0.75);
    }

    #[test]
    fn one_task_right_two_wrong_is_a_third() {
        let gold = corpus(&[t(0, 0, 0), t(1, 1, 1)]);
        let p = preds(&[t(0, 1, 1), t(1, 0, 0)]);
        assert!((overall_micro_f1(&p, &gold).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(instance_f1(&p, &gold).unwrap(), 0.0);
    }

    #[test]
    fn one_exact_triple_of_four() {
        let gold = corpus(&[t(0, 0, 0), t(1, 1, 1), t(2, 0, 1), t(0, 1, 0)]);
        let p = preds(&[t(0, 0, 0), t(1, 1, 0), t(2, 1, 1), t(1, 1, 0)]);
        assert_eq!(instance_f1(&p, &gold).unwrap(), 0.25);
    }

    #[test]
    fn worked_example_pools_to_the_mean() {
        let v = pooled_from_task_scores(&[0.446, 0.675, 0.726]);
        assert!((v - 0.6157).abs() < 5e-5, "{v}");
    }

    #[test]
    fn ids_must_align() {
        let gold = corpus(&[t(0, 0, 0), t(1, 1, 1)]);
        let mut p = preds(&[t(0, 0, 0), t(1, 1, 1)]);
        p.ids[1] = "zz".into();
        assert!(matches!(make_report(&p, &gold), Err(Error::IdMismatch(_))));
        let short = preds(&[t(0, 0, 0)]);
        assert!(matches!(make_report(&short, &gold), Err(Error::IdMismatch(_))));
    }

    #[test]
    fn perfect_report_and_json_round_trip() {
        let labels = [t(0, 0, 0), t(1, 1, 1), t(2, 0, 1)];
        let r = make_report(&preds(&labels), &corpus(&labels)).unwrap();
        assert_eq!(r.instance_f1, 1.0);
        assert_eq!(r.overall_micro_f1, 1.0);
        assert!(r.tasks.iter().all(|t| t.micro_f1 == 1.0 && t.accuracy == 1.0));
        assert_eq!(EvalReport::from_json(&r.to_json().unwrap()).unwrap(), r);
        assert!(r.to_string().contains("overall micro-F1"));
    }

    #[test]
    fn predictions_tsv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.tsv");
        let p = preds(&[t(0, 1, 0), t(2, 0, 1)]);
        p.write_tsv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "id\taggression\tgender\tcommunal\nd0\tOAG\tNGEN\tCOM\nd1\tNAG\tGEN\tNCOM\n"
        );
        assert_eq!(PredictionSet::read_tsv(&path).unwrap(), p);
    }
}
