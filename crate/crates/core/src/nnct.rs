//! Nearest-neighbor contingency tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::NnGraph;

/// `q x q` table of (base class, neighbor class) counts.
///
/// Row `i` holds the base points of class `i`; column `j` counts how often
/// class `j` serves as the neighbor. Only base points enter the table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nnct {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

impl Nnct {
    /// Table from explicit counts (e.g. a published table).
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let q = counts.len();
        if q == 0 || counts.iter().any(|row| row.len() != q) {
            return Err(Error::InvalidSpec("table must be square and non-empty".into()));
        }
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..q).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let n = row_sums.iter().sum();
        Ok(Nnct {
            counts,
            row_sums,
            col_sums,
            n,
        })
    }

    pub fn q(&self) -> usize {
        self.counts.len()
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i][j]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    /// `N_ij / n`.
    pub fn cell_proportion(&self, i: usize, j: usize) -> f64 {
        self.counts[i][j] as f64 / self.n as f64
    }

    /// `n_i / n`.
    pub fn row_proportion(&self, i: usize) -> f64 {
        self.row_sums[i] as f64 / self.n as f64
    }

    /// `C_j / n`.
    pub fn col_proportion(&self, j: usize) -> f64 {
        self.col_sums[j] as f64 / self.n as f64
    }

    /// Cell percentage relative to the row's class size (0 for empty rows).
    pub fn row_percent(&self, i: usize, j: usize) -> f64 {
        if self.row_sums[i] == 0 {
            0.0
        } else {
            100.0 * self.counts[i][j] as f64 / self.row_sums[i] as f64
        }
    }

    /// Table with classes reordered: class `perm[i]` of the new table is
    /// class `i` of this one.
    pub fn permuted(&self, perm: &[usize]) -> Result<Nnct> {
        let q = self.q();
        let mut seen = vec![false; q];
        if perm.len() != q || perm.iter().any(|&p| p >= q || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidSpec("not a permutation of the classes".into()));
        }
        let mut counts = vec![vec![0u64; q]; q];
        for i in 0..q {
            for j in 0..q {
                counts[perm[i]][perm[j]] = self.counts[i][j];
            }
        }
        Nnct::from_counts(counts)
    }
}

/// Cross-tabulates the base points of `graph` by their own label and their
/// neighbor's label. Classes without base points stay as zero rows.
pub fn build_nnct(graph: &NnGraph, labels: &[usize], num_classes: usize) -> Result<Nnct> {
    if labels.len() != graph.len() {
        return Err(Error::LengthMismatch {
            coords: graph.len(),
            labels: labels.len(),
        });
    }
    if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
        return Err(Error::LabelOutOfRange {
            index,
            label,
            classes: num_classes,
        });
    }
    let mut counts = vec![vec![0u64; num_classes]; num_classes];
    for (k, l) in graph.pairs() {
        counts[labels[k]][labels[l]] += 1;
    }
    Nnct::from_counts(counts)
}
