//! Gower distance over mixed numeric/symbolic features.

use rayon::prelude::*;

use crate::dataset::{ColumnData, DatasetView, FeatureKind, NumericMatrix};

/// Symmetric `n x n` matrix of Gower distances, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Distances between all rows of a scaled encoding.
    pub fn from_encoded(x: &NumericMatrix) -> Self {
        let n = x.n_rows();
        let mut entries = vec![0.0; n * n];
        entries
            .par_chunks_mut(n.max(1))
            .enumerate()
            .for_each(|(i, row)| {
                for (j, slot) in row.iter_mut().enumerate() {
                    if i != j {
                        *slot = gower_rows(x.row(i), x.row(j), x.kinds());
                    }
                }
            });
        Self { n, entries }
    }

    pub fn from_view(view: &DatasetView<'_>) -> Self {
        Self::from_encoded(&view.to_numeric())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

/// Gower distance between two encoded rows. Numeric entries are already
/// divided by their range, so their absolute difference is the per-feature
/// dissimilarity; symbolic entries contribute 0 when equal and 1 otherwise.
pub fn gower_rows(a: &[f64], b: &[f64], kinds: &[FeatureKind]) -> f64 {
    if kinds.is_empty() {
        return 0.0;
    }
    let total: f64 = a
        .iter()
        .zip(b)
        .zip(kinds)
        .map(|((&u, &v), kind)| match kind {
            FeatureKind::Numeric => (u - v).abs(),
            FeatureKind::Symbolic => {
                if u == v {
                    0.0
                } else {
                    1.0
                }
            }
        })
        .sum();
    total / kinds.len() as f64
}

/// Gower distance between rows `i` and `j` of a view (positions within the
/// view), computed from the raw column values with ranges taken over the
/// view's rows.
pub fn gower(view: &DatasetView<'_>, i: usize, j: usize) -> f64 {
    let (ri, rj) = (view.rows()[i], view.rows()[j]);
    let columns = view.base().columns();
    let total: f64 = columns
        .iter()
        .map(|col| match col.data() {
            ColumnData::Numeric(values) => {
                let (lo, hi) = view
                    .rows()
                    .iter()
                    .map(|&r| values[r])
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                        (lo.min(v), hi.max(v))
                    });
                let range = hi - lo;
                if range > 0.0 {
                    (values[ri] - values[rj]).abs() / range
                } else {
                    0.0
                }
            }
            ColumnData::Symbolic { codes, .. } => {
                if codes[ri] == codes[rj] {
                    0.0
                } else {
                    1.0
                }
            }
        })
        .sum();
    total / columns.len() as f64
}
