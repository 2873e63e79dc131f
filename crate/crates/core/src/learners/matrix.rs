use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major sparse matrix (CSR). Zeros are not stored.
///
/// Learner inputs are conceptually dense rows; most columns are term
/// frequencies that are zero for any given message, so storage is sparse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn empty(n_cols: usize) -> Self {
        FeatureMatrix {
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = FeatureMatrix::empty(n_cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    actual: r.len(),
                });
            }
            m.push_row(r.iter().copied().enumerate())?;
        }
        Ok(m)
    }

    /// Appends a row from `(column, value)` pairs in increasing column order.
    /// Zero values are skipped.
    pub fn push_row(&mut self, entries: impl IntoIterator<Item = (usize, f64)>) -> Result<()> {
        let start = self.indices.len();
        for (j, v) in entries {
            if j >= self.n_cols {
                return Err(Error::DimensionMismatch {
                    expected: self.n_cols,
                    actual: j + 1,
                });
            }
            if self.indices.len() > start && *self.indices.last().unwrap() as usize >= j {
                self.indices.truncate(start);
                self.values.truncate(start);
                return Err(Error::InvalidArgument(
                    "row entries must be in increasing column order".into(),
                ));
            }
            if v != 0.0 {
                self.indices.push(j as u32);
                self.values.push(v);
            }
        }
        self.indptr.push(self.indices.len());
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (idx, val) = self.row(i);
        match idx.binary_search(&(j as u32)) {
            Ok(p) => val[p],
            Err(_) => 0.0,
        }
    }

    pub fn dense_row(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_cols];
        let (idx, val) = self.row(i);
        for (&j, &v) in idx.iter().zip(val) {
            out[j as usize] = v;
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut m = FeatureMatrix::empty(self.n_cols);
        for &i in rows {
            let (idx, val) = self.row(i);
            m.indices.extend_from_slice(idx);
            m.values.extend_from_slice(val);
            m.indptr.push(m.indices.len());
        }
        m
    }

    /// Row `i` dotted with a dense vector.
    pub fn row_dot(&self, i: usize, w: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&j, &v)| v * w[j as usize]).sum()
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.row(i).1.iter().map(|v| v * v).sum()
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        for i in 0..self.n_rows() {
            let (idx, val) = self.row(i);
            if let Some(p) = val.iter().position(|v| !v.is_finite()) {
                return Err(Error::NanFeature {
                    row: i,
                    col: idx[p] as usize,
                });
            }
        }
        Ok(())
    }

    fn cmp_rows(&self, a: usize, b: usize) -> Ordering {
        let (ia, va) = self.row(a);
        let (ib, vb) = self.row(b);
        for ((ja, xa), (jb, xb)) in ia.iter().zip(va).zip(ib.iter().zip(vb)) {
            let o = ja.cmp(jb).then(xa.total_cmp(xb));
            if o != Ordering::Equal {
                return o;
            }
        }
        ia.len().cmp(&ib.len())
    }
}

/// A row order that depends only on row contents and labels, so that
/// permuting the training rows leaves it unchanged (up to identical rows).
pub(crate) fn canonical_order(x: &FeatureMatrix, y: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    order.sort_by(|&a, &b| y[a].cmp(&y[b]).then_with(|| x.cmp_rows(a, b)));
    order
}
