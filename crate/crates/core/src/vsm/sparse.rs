use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A document vector: strictly increasing indices with positive values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> Self {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a vector from `(index, value)` pairs, which must be strictly
    /// increasing in index, inside `dim`, and carry finite positive values.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut v = SparseVector::zeros(dim);
        for (i, x) in pairs {
            if i >= dim {
                return Err(Error::InvalidArgument(format!(
                    "index {i} outside dimensionality {dim}"
                )));
            }
            if v.indices.last().is_some_and(|&last| last as usize >= i) {
                return Err(Error::InvalidArgument(
                    "sparse indices must be strictly increasing".into(),
                ));
            }
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "sparse value {x} at index {i} is not a finite positive number"
                )));
            }
            v.indices.push(i as u32);
            v.values.push(x);
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_zero(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &x)| (i as usize, x))
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Scales to unit Euclidean norm. The zero vector stays zero.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for x in &mut self.values {
                *x /= n;
            }
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SparseVector {
            dim: self.dim,
            indices: self.indices.clone(),
            values: self.values.iter().map(|x| x * alpha).collect(),
        }
    }

    /// Merge-join dot product. Dimensionalities are not checked.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (i, x) in self.iter() {
            out[i] = x;
        }
        out
    }
}

/// Cosine similarity in `[0, 1]`; zero when either vector is zero.
pub fn cosine(a: &SparseVector, b: &SparseVector) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch {
            expected: a.dim,
            actual: b.dim,
        });
    }
    if a.is_zero() || b.is_zero() {
        return Ok(0.0);
    }
    Ok((a.dot(b) / (a.norm() * b.norm())).clamp(0.0, 1.0))
}
