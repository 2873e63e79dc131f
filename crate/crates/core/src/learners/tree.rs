//! CART trees grown breadth-first over presorted sparse columns.
//!
//! Each level makes two passes over the nonzero entries of every candidate
//! column: one to total the nonzero mass per open node, one to sweep split
//! thresholds in value order. Zeros are handled as a single block whose
//! statistics are the node total minus the nonzero mass, so a level costs
//! O(nnz) rather than O(rows × columns).

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::matrix::FeatureMatrix;

const NONE: u32 = u32::MAX;

/// Column-major copy of the nonzero entries, each column sorted by value.
pub(crate) struct ColumnIndex {
    cols: Vec<Vec<(u32, f64)>>,
}

impl ColumnIndex {
    pub(crate) fn new(x: &FeatureMatrix) -> Self {
        let mut cols = vec![Vec::new(); x.n_cols()];
        for i in 0..x.n_rows() {
            let (idx, val) = x.row(i);
            for (&j, &v) in idx.iter().zip(val) {
                cols[j as usize].push((i as u32, v));
            }
        }
        for c in &mut cols {
            c.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        }
        ColumnIndex { cols }
    }
}

/// What the tree is fit to.
pub(crate) enum Target<'a> {
    /// Gini impurity over weighted class counts.
    Classes { y: &'a [usize], n_classes: usize },
    /// Squared error; statistics are `[w, w*r, w*r^2]`.
    Values(&'a [f64]),
}

impl Target<'_> {
    fn stats_len(&self) -> usize {
        match self {
            Target::Classes { n_classes, .. } => *n_classes,
            Target::Values(_) => 3,
        }
    }

    fn add(&self, stats: &mut [f64], row: usize, w: f64) {
        match self {
            Target::Classes { y, .. } => stats[y[row]] += w,
            Target::Values(r) => {
                let v = r[row];
                stats[0] += w;
                stats[1] += w * v;
                stats[2] += w * v * v;
            }
        }
    }

    fn weight(&self, stats: &[f64]) -> f64 {
        match self {
            Target::Classes { .. } => stats.iter().sum(),
            Target::Values(_) => stats[0],
        }
    }

    /// Weighted impurity: `W * gini` or the sum of squared deviations.
    fn impurity(&self, stats: &[f64]) -> f64 {
        let w = self.weight(stats);
        if w <= 0.0 {
            return 0.0;
        }
        match self {
            Target::Classes { .. } => w - stats.iter().map(|s| s * s).sum::<f64>() / w,
            Target::Values(_) => (stats[2] - stats[1] * stats[1] / w).max(0.0),
        }
    }

    fn leaf_value(&self, stats: &[f64]) -> Vec<f64> {
        let w = self.weight(stats);
        match self {
            Target::Classes { .. } => stats.iter().map(|s| s / w).collect(),
            Target::Values(_) => vec![stats[1] / w],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct GrowParams {
    pub max_depth: usize,
    /// Features drawn per node; `None` considers all of them.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: Vec<f64>,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub(crate) fn leaf_of(&self, x: &FeatureMatrix, i: usize) -> usize {
        let mut at = 0usize;
        loop {
            match &self.nodes[at] {
                Node::Leaf { .. } => return at,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x.get(i, *feature as usize) <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
            }
        }
    }

    pub(crate) fn predict_row(&self, x: &FeatureMatrix, i: usize) -> &[f64] {
        match &self.nodes[self.leaf_of(x, i)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub(crate) fn set_leaf(&mut self, node: usize, value: Vec<f64>) {
        assert!(matches!(self.nodes[node], Node::Leaf { .. }));
        self.nodes[node] = Node::Leaf { value };
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + walk(nodes, *left as usize).max(walk(nodes, *right as usize))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: u32,
    threshold: f64,
}

/// Per-slot scratch for one column sweep.
struct Sweep {
    sl: usize,
    nz: Vec<f64>,
    nz_count: Vec<usize>,
    left: Vec<f64>,
    left_count: Vec<usize>,
    last: Vec<f64>,
    zero_done: Vec<bool>,
    touched: Vec<usize>,
    right: Vec<f64>,
}

impl Sweep {
    fn new(slots: usize, sl: usize) -> Self {
        Sweep {
            sl,
            nz: vec![0.0; slots * sl],
            nz_count: vec![0; slots],
            left: vec![0.0; slots * sl],
            left_count: vec![0; slots],
            last: vec![0.0; slots],
            zero_done: vec![false; slots],
            touched: Vec::new(),
            right: vec![0.0; sl],
        }
    }

    fn reset_touched(&mut self) {
        let sl = self.sl;
        for &s in &self.touched {
            self.nz[s * sl..(s + 1) * sl].fill(0.0);
            self.left[s * sl..(s + 1) * sl].fill(0.0);
            self.nz_count[s] = 0;
            self.left_count[s] = 0;
            self.last[s] = 0.0;
            self.zero_done[s] = false;
        }
        self.touched.clear();
    }
}

/// Grows one tree. Rows with zero weight are ignored while growing.
pub(crate) fn grow(
    x: &FeatureMatrix,
    index: &ColumnIndex,
    target: &Target<'_>,
    weights: &[f64],
    params: &GrowParams,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let n = x.n_rows();
    let d = x.n_cols();
    let sl = target.stats_len();
    let subset = params.max_features.filter(|&k| k < d).map(|k| k.max(1));

    let mut nodes = vec![Node::Leaf { value: Vec::new() }];
    // (node id, depth) of every node still open, indexed by slot
    let mut open: Vec<(usize, usize)> = vec![(0, 0)];
    let mut slot_of_row: Vec<u32> = weights.iter().map(|&w| if w > 0.0 { 0 } else { NONE }).collect();

    while !open.is_empty() {
        let m = open.len();
        let mut totals = vec![0.0; m * sl];
        let mut counts = vec![0usize; m];
        for row in 0..n {
            let s = slot_of_row[row];
            if s != NONE {
                let s = s as usize;
                target.add(&mut totals[s * sl..(s + 1) * sl], row, weights[row]);
                counts[s] += 1;
            }
        }
        let splittable: Vec<bool> = (0..m)
            .map(|s| {
                let stats = &totals[s * sl..(s + 1) * sl];
                open[s].1 < params.max_depth
                    && counts[s] >= 2
                    && target.impurity(stats) > 1e-12 * target.weight(stats)
            })
            .collect();

        let mut feature_slots: Vec<Vec<u32>> = Vec::new();
        if let Some(k) = subset {
            feature_slots = vec![Vec::new(); d];
            for s in (0..m).filter(|&s| splittable[s]) {
                let mut picked = sample(rng, d, k).into_vec();
                picked.sort_unstable();
                for f in picked {
                    feature_slots[f].push(s as u32);
                }
            }
        }

        let mut best: Vec<Option<Candidate>> = vec![None; m];
        let mut considers = if subset.is_some() {
            vec![false; m]
        } else {
            splittable.clone()
        };
        let mut sw = Sweep::new(m, sl);

        if splittable.iter().any(|&s| s) {
            for (f, col) in index.cols.iter().enumerate().take(d) {
                if col.is_empty() {
                    continue;
                }
                if subset.is_some() {
                    if feature_slots[f].is_empty() {
                        continue;
                    }
                    for &s in &feature_slots[f] {
                        considers[s as usize] = true;
                    }
                }

                for &(r, _) in col {
                    let s = slot_of_row[r as usize];
                    if s == NONE || !considers[s as usize] {
                        continue;
                    }
                    let s = s as usize;
                    if sw.nz_count[s] == 0 {
                        sw.touched.push(s);
                    }
                    target.add(&mut sw.nz[s * sl..(s + 1) * sl], r as usize, weights[r as usize]);
                    sw.nz_count[s] += 1;
                }

                let mut eval = |sw: &mut Sweep, s: usize, lo: f64, hi: f64| {
                    let tot = &totals[s * sl..(s + 1) * sl];
                    let left = &sw.left[s * sl..(s + 1) * sl];
                    for c in 0..sl {
                        sw.right[c] = tot[c] - left[c];
                    }
                    let gain = target.impurity(tot) - target.impurity(left) - target.impurity(&sw.right);
                    let min_gain = 1e-12 * target.weight(tot);
                    if gain > min_gain && best[s].is_none_or(|b| gain > b.gain) {
                        let mut threshold = lo + (hi - lo) / 2.0;
                        if threshold >= hi {
                            threshold = lo;
                        }
                        best[s] = Some(Candidate {
                            gain,
                            feature: f as u32,
                            threshold,
                        });
                    }
                };

                for &(r, v) in col {
                    let s = slot_of_row[r as usize];
                    if s == NONE || !considers[s as usize] {
                        continue;
                    }
                    let s = s as usize;
                    if !sw.zero_done[s] && v > 0.0 {
                        sw.zero_done[s] = true;
                        let zeros = counts[s] - sw.nz_count[s];
                        if zeros > 0 {
                            if sw.left_count[s] > 0 {
                                let lo = sw.last[s];
                                eval(&mut sw, s, lo, 0.0);
                            }
                            for c in 0..sl {
                                sw.left[s * sl + c] += totals[s * sl + c] - sw.nz[s * sl + c];
                            }
                            sw.left_count[s] += zeros;
                            sw.last[s] = 0.0;
                        }
                    }
                    if sw.left_count[s] > 0 && v > sw.last[s] {
                        let lo = sw.last[s];
                        eval(&mut sw, s, lo, v);
                    }
                    target.add(
                        &mut sw.left[s * sl..(s + 1) * sl],
                        r as usize,
                        weights[r as usize],
                    );
                    sw.left_count[s] += 1;
                    sw.last[s] = v;
                }
                for t in 0..sw.touched.len() {
                    let s = sw.touched[t];
                    if !sw.zero_done[s] && counts[s] > sw.nz_count[s] && sw.left_count[s] > 0 {
                        let lo = sw.last[s];
                        eval(&mut sw, s, lo, 0.0);
                    }
                }
                sw.reset_touched();
                if subset.is_some() {
                    for &s in &feature_slots[f] {
                        considers[s as usize] = false;
                    }
                }
            }
        }

        let mut children = vec![(NONE, NONE); m];
        let mut next_open = Vec::new();
        for s in 0..m {
            let (node, depth) = open[s];
            match best[s] {
                Some(c) => {
                    let l = nodes.len();
                    nodes.push(Node::Leaf { value: Vec::new() });
                    nodes.push(Node::Leaf { value: Vec::new() });
                    nodes[node] = Node::Split {
                        feature: c.feature,
                        threshold: c.threshold,
                        left: l as u32,
                        right: (l + 1) as u32,
                    };
                    children[s] = (next_open.len() as u32, next_open.len() as u32 + 1);
                    next_open.push((l, depth + 1));
                    next_open.push((l + 1, depth + 1));
                }
                None => {
                    nodes[node] = Node::Leaf {
                        value: target.leaf_value(&totals[s * sl..(s + 1) * sl]),
                    };
                }
            }
        }
        for (row, slot) in slot_of_row.iter_mut().enumerate() {
            if *slot == NONE {
                continue;
            }
            let s = *slot as usize;
            *slot = match best[s] {
                Some(c) => {
                    if x.get(row, c.feature as usize) <= c.threshold {
                        children[s].0
                    } else {
                        children[s].1
                    }
                }
                None => NONE,
            };
        }
        open = next_open;
    }
    Tree { nodes }
}
