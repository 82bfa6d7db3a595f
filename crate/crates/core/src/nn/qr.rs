use serde::{Deserialize, Serialize};

use super::NnGraph;

/// Shared-neighbor and reflexivity counts of a nearest-neighbor graph.
///
/// `q` is the number of ordered pairs of distinct base points sharing the
/// same neighbor, `r` twice the number of reflexive base pairs. Both are
/// real-valued so that the adjusted values `0.63 n` / `0.62 n` flow through
/// the same moment formulas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QrStats {
    pub q: f64,
    pub r: f64,
    /// `qk[k - 1]` = number of points serving as nearest neighbor to
    /// exactly `k` base points. Empty for adjusted values.
    pub qk: Vec<usize>,
    /// `2 * sum_k C(k, 2) * Q_k`, the shared-neighbor count for general
    /// dissimilarity-based neighbor relations.
    pub q_tilde: Option<f64>,
}

impl QrStats {
    /// Counts given directly (no histogram).
    pub fn from_counts(q: f64, r: f64) -> Self {
        QrStats {
            q,
            r,
            qk: Vec::new(),
            q_tilde: None,
        }
    }
}

/// Computes Q, R and the `Q_k` histogram from the base points of `graph`.
///
/// Only base points act as sharers and only reflexive pairs made of two
/// base points count toward R, so pairs living partly or wholly in a
/// buffer or in toroidal copies are excluded.
pub fn compute_qr(graph: &NnGraph) -> QrStats {
    let n = graph.len();
    let mut served = vec![0usize; n];
    for (_, l) in graph.pairs() {
        served[l] += 1;
    }

    let mut qk: Vec<usize> = Vec::new();
    let mut q = 0u64;
    for &c in &served {
        if c == 0 {
            continue;
        }
        if qk.len() < c {
            qk.resize(c, 0);
        }
        qk[c - 1] += 1;
        q += (c * (c - 1)) as u64;
    }

    let r = graph
        .pairs()
        .filter(|&(k, l)| graph.is_base(l) && graph.nn(l) == Some(k))
        .count();

    let q_tilde: u64 = qk
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let k = (i + 1) as u64;
            k * (k - 1) * count as u64
        })
        .sum();

    QrStats {
        q: q as f64,
        r: r as f64,
        qk,
        q_tilde: Some(q_tilde as f64),
    }
}
