//! Dense learner input: selected VSM features followed by the five surface
//! counts, the latter standardized with training statistics.

use serde::{Deserialize, Serialize};

use crate::corpus::Task;
use crate::error::{Error, Result};
use crate::learners::FeatureMatrix;
use crate::text::{FeatureUnit, SurfaceFeatures, TokenizedDoc};
use crate::vsm::{self, FeatureSet};

/// Default number of chi-square features given to the stacked learners.
pub const DEFAULT_LEARNER_FEATURES: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceScaler {
    pub mean: [f64; SurfaceFeatures::WIDTH],
    /// Population standard deviation; a constant column gets 1.
    pub std: [f64; SurfaceFeatures::WIDTH],
}

impl SurfaceScaler {
    pub fn fit(docs: &[TokenizedDoc]) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::Empty("surface scaler training set"));
        }
        let n = docs.len() as f64;
        let mut mean = [0.0; SurfaceFeatures::WIDTH];
        for d in docs {
            for (m, v) in mean.iter_mut().zip(d.surface.as_array()) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = [0.0; SurfaceFeatures::WIDTH];
        for d in docs {
            for ((s, m), v) in var.iter_mut().zip(&mean).zip(d.surface.as_array()) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var.map(|s| {
            let sd = (s / n).sqrt();
            if sd > 0.0 {
                sd
            } else {
                1.0
            }
        });
        Ok(SurfaceScaler { mean, std })
    }

    pub fn transform(&self, s: &SurfaceFeatures) -> [f64; SurfaceFeatures::WIDTH] {
        let mut out = s.as_array();
        for ((v, m), sd) in out.iter_mut().zip(&self.mean).zip(&self.std) {
            *v = (*v - m) / sd;
        }
        out
    }
}

/// The mapping from documents to `DenseFeatureRow`s for one task.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseFeatureSpace {
    unit: FeatureUnit,
    features: FeatureSet,
    scaler: SurfaceScaler,
}

impl DenseFeatureSpace {
    /// Selects the top `n` chi-square features for `task` and fits the
    /// surface scaler, both from training data only.
    pub fn fit(
        docs: &[TokenizedDoc],
        labels: &[usize],
        task: Task,
        n: usize,
        unit: FeatureUnit,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("feature count must be at least 1".into()));
        }
        let ranked = vsm::rank_features(docs, labels, task, vsm::CANDIDATE_POOL.max(n))?;
        Ok(DenseFeatureSpace {
            unit,
            features: ranked.prefix(n),
            scaler: SurfaceScaler::fit(docs)?,
        })
    }

    pub fn from_parts(unit: FeatureUnit, features: FeatureSet, scaler: SurfaceScaler) -> Self {
        DenseFeatureSpace {
            unit,
            features,
            scaler,
        }
    }

    pub fn unit(&self) -> FeatureUnit {
        self.unit
    }

    pub fn features(&self) -> &FeatureSet {
        &self.features
    }

    pub fn scaler(&self) -> &SurfaceScaler {
        &self.scaler
    }

    /// `|features| + 5`
    pub fn width(&self) -> usize {
        self.features.len() + SurfaceFeatures::WIDTH
    }

    pub fn push_row(&self, m: &mut FeatureMatrix, doc: &TokenizedDoc) -> Result<()> {
        let v = vsm::vectorize(doc, &self.features);
        let base = self.features.len();
        let surface = self.scaler.transform(&doc.surface);
        m.push_row(
            v.iter()
                .chain(surface.iter().enumerate().map(|(j, &x)| (base + j, x))),
        )
    }

    pub fn transform(&self, docs: &[TokenizedDoc]) -> Result<FeatureMatrix> {
        let mut m = FeatureMatrix::empty(self.width());
        for d in docs {
            self.push_row(&mut m, d)?;
        }
        Ok(m)
    }
}
