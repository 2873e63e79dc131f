//! Labeled synthetic corpora with controllable class separation and label
//! noise.
//!
//! The vocabulary holds background words shared by all classes plus a
//! block of marker words for every (task, class) pair. Each token of a
//! document is, with probability `separation`, a marker of the document's
//! class for a uniformly chosen task, and otherwise a background word.
//! After the text is drawn, each task label is replaced with probability
//! `noise` by a class drawn uniformly from all of that task's classes.

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Instance, LabelTriple, Task};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub instances: usize,
    pub background_words: usize,
    pub markers_per_class: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
    pub separation: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            instances: 4000,
            background_words: 2000,
            markers_per_class: 4,
            min_tokens: 12,
            max_tokens: 30,
            separation: 0.8,
            noise: 0.0,
            seed: 1,
        }
    }
}

/// Distinct lowercase word for index `i`.
fn word(prefix: &str, mut i: usize) -> String {
    let mut s = String::from(prefix);
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    s
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("synthetic spec: {m}")));
        if self.instances == 0 {
            return bad("instances must be positive");
        }
        if self.background_words == 0 && self.separation < 1.0 {
            return bad("background words needed when separation < 1");
        }
        if self.markers_per_class == 0 {
            return bad("markers_per_class must be positive");
        }
        if self.min_tokens == 0 || self.min_tokens > self.max_tokens {
            return bad("need 1 <= min_tokens <= max_tokens");
        }
        if !(0.0..=1.0).contains(&self.separation) {
            return bad("separation must lie in [0, 1]");
        }
        if !(0.0..1.0).contains(&self.noise) {
            return bad("noise must lie in [0, 1)");
        }
        Ok(())
    }

    /// Vocabulary size: background plus all marker blocks.
    pub fn vocabulary_size(&self) -> usize {
        let marker_blocks: usize = Task::ALL.iter().map(|t| t.n_classes()).sum();
        self.background_words + marker_blocks * self.markers_per_class
    }

    /// Marker words of one class.
    pub fn markers(&self, task: Task, class: usize) -> Vec<String> {
        let prefix = format!(
            "{}{}",
            &task.name()[..1],
            task.class_name(class).to_ascii_lowercase()
        );
        (0..self.markers_per_class).map(|i| word(&prefix, i)).collect()
    }

    /// Accuracy of the best possible classifier on a task with `n_classes`
    /// classes, when the text reveals the clean label.
    pub fn bayes_accuracy(&self, n_classes: usize) -> f64 {
        1.0 - self.noise + self.noise / n_classes as f64
    }
}

/// Draws a labeled corpus named `split`.
pub fn generate_synthetic(spec: &SyntheticSpec, split: &str) -> Result<Corpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let background: Vec<String> = (0..spec.background_words).map(|i| word("", i)).collect();
    let markers: Vec<Vec<Vec<String>>> = Task::ALL
        .iter()
        .map(|&t| (0..t.n_classes()).map(|c| spec.markers(t, c)).collect())
        .collect();
    let len_dist = Uniform::new_inclusive(spec.min_tokens, spec.max_tokens);
    let width = spec.instances.to_string().len().max(6);

    let mut instances = Vec::with_capacity(spec.instances);
    for n in 0..spec.instances {
        let clean: Vec<usize> = Task::ALL
            .iter()
            .map(|t| rng.gen_range(0..t.n_classes()))
            .collect();
        let len = len_dist.sample(&mut rng);
        let mut words = Vec::with_capacity(len + len / 6 + 1);
        for i in 0..len {
            if rng.gen::<f64>() < spec.separation {
                let t = rng.gen_range(0..Task::ALL.len());
                let block = &markers[t][clean[t]];
                words.push(block[rng.gen_range(0..block.len())].clone());
            } else {
                words.push(background[rng.gen_range(0..background.len())].clone());
            }
            if i % 7 == 6 && rng.gen_bool(0.5) {
                words.push(if rng.gen_bool(0.5) { "." } else { "," }.to_string());
            }
        }
        words.push(if rng.gen_bool(0.8) { "." } else { "!" }.to_string());
        let mut text = words.join(" ");
        if rng.gen_bool(0.1) {
            text.push_str(&format!(" {}", rng.gen_range(1..100)));
        }
        let mut labels = LabelTriple::from_indices(clean[0], clean[1], clean[2]);
        for &task in &Task::ALL {
            if rng.gen::<f64>() < spec.noise {
                labels.set(task, rng.gen_range(0..task.n_classes()));
            }
        }
        instances.push(Instance {
            id: format!("syn{n:0width$}"),
            text,
            labels: Some(labels),
        });
    }
    Corpus::new(split, instances)
}

/// Consecutive slices of `corpus` with the given names and sizes.
pub fn split_corpus(corpus: &Corpus, parts: &[(&str, usize)]) -> Result<Vec<Corpus>> {
    let total: usize = parts.iter().map(|p| p.1).sum();
    if total > corpus.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot take {total} instances from {}",
            corpus.len()
        )));
    }
    let mut start = 0;
    parts
        .iter()
        .map(|&(name, size)| {
            let c = Corpus::new(name, corpus.instances()[start..start + size].to_vec());
            start += size;
            c
        })
        .collect()
}
