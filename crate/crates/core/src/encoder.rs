//! One-hot graph encoder embedding.
//!
//! `Z = A W` where `W(i, k) = 1 / n_k` when vertex `i` carries label `k` and
//! zero otherwise. `W` is never materialized: a single pass over the row
//! index counts, for every vertex, its neighbors in each class, and the
//! counts are scaled by `1 / n_k` once per column at the end.

use ndarray::{Array2, ArrayView1, Axis};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labels::LabelVector;

/// Largest graph accepted by [`embed_dense_oracle`].
pub const DENSE_ORACLE_LIMIT: usize = 200;

// Rows per rayon task in the edge pass.
const ROWS_PER_TASK: usize = 4096;

/// Dense `n x d` vertex embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    values: Array2<f64>,
    column_labels: Vec<usize>,
    normalized: bool,
}

impl Embedding {
    pub fn new(values: Array2<f64>, column_labels: Vec<usize>, normalized: bool) -> Result<Self> {
        if values.ncols() != column_labels.len() {
            return Err(Error::DimensionMismatch {
                expected: values.ncols(),
                got: column_labels.len(),
            });
        }
        Ok(Embedding {
            values,
            column_labels,
            normalized,
        })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    /// Community (class id in `1..=K`) behind each column.
    pub fn column_labels(&self) -> &[usize] {
        &self.column_labels
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// L2 norm of every row.
    pub fn row_norms(&self) -> Vec<f64> {
        self.values
            .axis_iter(Axis(0))
            .map(|r| r.dot(&r).sqrt())
            .collect()
    }

    /// Keeps the columns whose labels appear in `labels`, in that order.
    pub fn select_columns(&self, labels: &[usize]) -> Result<Embedding> {
        let mut idx = Vec::with_capacity(labels.len());
        for &l in labels {
            let pos = self
                .column_labels
                .iter()
                .position(|&c| c == l)
                .ok_or_else(|| Error::InvalidArgument(format!("no column for community {l}")))?;
            idx.push(pos);
        }
        Ok(Embedding {
            values: self.values.select(Axis(1), &idx),
            column_labels: labels.to_vec(),
            normalized: false,
        })
    }

    /// Rows in the order given by `rows`.
    pub fn select_rows(&self, rows: &[usize]) -> Embedding {
        Embedding {
            values: self.values.select(Axis(0), rows),
            column_labels: self.column_labels.clone(),
            normalized: self.normalized,
        }
    }
}

/// Per-vertex weight of the one-hot matrix: `Some((k, 1 / n_k))` for a vertex
/// labeled `k`, `None` for an unknown label (a zero row of `W`).
pub fn one_hot_row_weights(y: &LabelVector) -> Vec<Option<(usize, f64)>> {
    (0..y.len())
        .map(|v| match y.get(v) {
            0 => None,
            k => Some((k, 1.0 / y.class_count(k) as f64)),
        })
        .collect()
}

/// Unnormalized encoder embedding in `O(nK + s)`.
pub fn embed(g: &Graph, y: &LabelVector) -> Result<Embedding> {
    let n = g.n();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: n,
        });
    }
    let k = y.num_classes();
    let labels = y.as_slice();
    let offsets = g.row_offsets();
    let neighbors = g.row_neighbors();

    let mut acc = vec![0.0f64; n * k];
    acc.par_chunks_mut(k * ROWS_PER_TASK)
        .enumerate()
        .for_each(|(chunk, block)| {
            let first = chunk * ROWS_PER_TASK;
            for (r, row) in block.chunks_mut(k).enumerate() {
                let v = first + r;
                for &u in &neighbors[offsets[v]..offsets[v + 1]] {
                    let l = labels[u as usize] as usize;
                    if l > 0 {
                        row[l - 1] += 1.0;
                    }
                }
            }
        });

    let scale: Vec<f64> = y
        .class_counts()
        .iter()
        .map(|&c| if c > 0 { 1.0 / c as f64 } else { 0.0 })
        .collect();
    acc.par_chunks_mut(k * ROWS_PER_TASK).for_each(|block| {
        for row in block.chunks_mut(k) {
            for (z, s) in row.iter_mut().zip(&scale) {
                *z *= s;
            }
        }
    });

    let values = Array2::from_shape_vec((n, k), acc).expect("n * k buffer");
    Ok(Embedding {
        values,
        column_labels: (1..=k).collect(),
        normalized: false,
    })
}

/// Scales every nonzero row to unit L2 norm. Zero rows stay zero.
pub fn normalize_rows(z: &Embedding) -> Embedding {
    let mut values = z.values.clone();
    values.axis_iter_mut(Axis(0)).for_each(|mut row| {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|x| x / norm);
        }
    });
    Embedding {
        values,
        column_labels: z.column_labels.clone(),
        normalized: true,
    }
}

/// Materializes dense `A` and `W` and multiplies them. Test oracle for
/// [`embed`]; limited to [`DENSE_ORACLE_LIMIT`] vertices.
pub fn embed_dense_oracle(g: &Graph, y: &LabelVector) -> Result<Embedding> {
    let n = g.n();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            n,
            limit: DENSE_ORACLE_LIMIT,
        });
    }
    if y.len() != n {
        return Err(Error::LengthMismatch {
            labels: y.len(),
            vertices: n,
        });
    }
    let k = y.num_classes();
    let mut a = Array2::<f64>::zeros((n, n));
    for &(i, j) in g.edges() {
        a[[i as usize, j as usize]] = 1.0;
        if !g.is_directed() {
            a[[j as usize, i as usize]] = 1.0;
        }
    }
    let mut w = Array2::<f64>::zeros((n, k));
    for v in 0..n {
        let l = y.get(v);
        if l > 0 {
            w[[v, l - 1]] = 1.0 / y.class_count(l) as f64;
        }
    }
    let mut z = Array2::<f64>::zeros((n, k));
    for i in 0..n {
        for j in 0..n {
            if a[[i, j]] == 0.0 {
                continue;
            }
            for c in 0..k {
                z[[i, c]] += a[[i, j]] * w[[j, c]];
            }
        }
    }
    Ok(Embedding {
        values: z,
        column_labels: (1..=k).collect(),
        normalized: false,
    })
}
