//! Dixon's cell-specific and overall segregation tests.
//!
//! Moments are exact under random labeling of fixed locations, conditional
//! on the shared-neighbor count `Q` and reflexive count `R`.

use serde::{Deserialize, Serialize};

use crate::dist::{Direction, TestResult};
use crate::error::{Error, Result};
use crate::nn::QrStats;
use crate::nnct::Nnct;

/// Empirical `E[Q/n]` for a homogeneous planar Poisson pattern.
pub const POISSON_Q_PER_POINT: f64 = 0.632786;
/// Empirical `E[R/n]` for a homogeneous planar Poisson pattern.
pub const POISSON_R_PER_POINT: f64 = 0.621120;
/// Rounded factors used by the QR adjustment.
pub const QR_ADJUST_Q: f64 = 0.63;
pub const QR_ADJUST_R: f64 = 0.62;

/// Probabilities that a randomly chosen pair, triplet or quartet of points
/// carries the indicated labels, as ratios of falling factorials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbKernel {
    pub p_ii: Vec<f64>,
    pub p_iii: Vec<f64>,
    pub p_iiii: Vec<f64>,
    /// Off-diagonal entries only; the diagonal holds zeros.
    pub p_ij: Vec<Vec<f64>>,
    pub p_iij: Vec<Vec<f64>>,
    pub p_iijj: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DixonMoments {
    pub n: u64,
    pub expected: Vec<Vec<f64>>,
    pub var: Vec<Vec<f64>>,
    /// `Cov[N11, N22]`, two-class tables only.
    pub cov_diag: Option<f64>,
    pub probs: ProbKernel,
}

fn falling(a: f64, k: usize) -> f64 {
    (0..k).map(|t| a - t as f64).product()
}

/// Moments of every cell count given class sizes, `n` and `Q`, `R`.
pub fn dixon_moments(row_sums: &[u64], n: u64, qr: &QrStats) -> Result<DixonMoments> {
    if n < 4 {
        return Err(Error::TooFewForMoments(n as usize));
    }
    let sum: u64 = row_sums.iter().sum();
    if sum != n {
        return Err(Error::RowSumMismatch {
            sum: sum as usize,
            n: n as usize,
        });
    }
    let q = row_sums.len();
    let nf = n as f64;
    let sizes: Vec<f64> = row_sums.iter().map(|&s| s as f64).collect();
    let d2 = falling(nf, 2);
    let d3 = falling(nf, 3);
    let d4 = falling(nf, 4);

    let mut probs = ProbKernel {
        p_ii: sizes.iter().map(|&a| falling(a, 2) / d2).collect(),
        p_iii: sizes.iter().map(|&a| falling(a, 3) / d3).collect(),
        p_iiii: sizes.iter().map(|&a| falling(a, 4) / d4).collect(),
        p_ij: vec![vec![0.0; q]; q],
        p_iij: vec![vec![0.0; q]; q],
        p_iijj: vec![vec![0.0; q]; q],
    };
    for i in 0..q {
        for j in 0..q {
            if i != j {
                let (a, b) = (sizes[i], sizes[j]);
                probs.p_ij[i][j] = a * b / d2;
                probs.p_iij[i][j] = falling(a, 2) * b / d3;
                probs.p_iijj[i][j] = falling(a, 2) * falling(b, 2) / d4;
            }
        }
    }

    let (qv, rv) = (qr.q, qr.r);
    // Ordered pairs of bases whose neighbor relations involve four
    // distinct points.
    let disjoint = nf * nf - 3.0 * nf - qv + rv;
    let mut expected = vec![vec![0.0; q]; q];
    let mut var = vec![vec![0.0; q]; q];
    for i in 0..q {
        for j in 0..q {
            if i == j {
                let a = sizes[i];
                expected[i][i] = a * (a - 1.0) / (nf - 1.0);
                let np = nf * probs.p_ii[i];
                var[i][i] = (nf + rv) * probs.p_ii[i]
                    + (2.0 * nf - 2.0 * rv + qv) * probs.p_iii[i]
                    + disjoint * probs.p_iiii[i]
                    - np * np;
            } else {
                expected[i][j] = sizes[i] * sizes[j] / (nf - 1.0);
                let np = nf * probs.p_ij[i][j];
                var[i][j] = nf * probs.p_ij[i][j] + qv * probs.p_iij[i][j] + disjoint * probs.p_iijj[i][j] - np * np;
            }
        }
    }
    let cov_diag = (q == 2).then(|| disjoint * probs.p_iijj[0][1] - nf * nf * probs.p_ii[0] * probs.p_ii[1]);

    Ok(DixonMoments {
        n,
        expected,
        var,
        cov_diag,
        probs,
    })
}

/// Moments for the row sums of `table`.
pub fn dixon_moments_for(table: &Nnct, qr: &QrStats) -> Result<DixonMoments> {
    dixon_moments(table.row_sums(), table.n(), qr)
}

/// `Q = 0.63 n`, `R = 0.62 n`: unconditional stand-ins for CSR
/// independence.
pub fn qr_adjust(n: u64) -> QrStats {
    QrStats::from_counts(QR_ADJUST_Q * n as f64, QR_ADJUST_R * n as f64)
}

fn zero_threshold(n: u64) -> f64 {
    1e-12 * (n as f64).powi(2).max(1.0)
}

/// `Z_ij = (N_ij - E[N_ij]) / sqrt(Var[N_ij])`.
pub fn dixon_cell_test(table: &Nnct, moments: &DixonMoments, i: usize, j: usize) -> Result<TestResult> {
    let q = table.q();
    if i >= q || j >= q || moments.expected.len() != q {
        return Err(Error::CellOutOfRange(i, j));
    }
    let var = moments.var[i][j];
    if var <= zero_threshold(moments.n) {
        return Err(Error::ZeroVariance(i, j));
    }
    let z = (table.get(i, j) as f64 - moments.expected[i][j]) / var.sqrt();
    let positive = if i == j {
        Direction::Segregation
    } else {
        Direction::Association
    };
    Ok(TestResult::normal(z, positive))
}

/// Quadratic form in `(N11 - E11, N22 - E22)` with the inverse of their
/// covariance matrix; chi-square with 2 degrees of freedom.
pub fn dixon_overall_test(table: &Nnct, moments: &DixonMoments) -> Result<TestResult> {
    if table.q() != 2 {
        return Err(Error::RequiresTwoClasses(table.q()));
    }
    let cov = moments.cov_diag.ok_or(Error::RequiresTwoClasses(table.q()))?;
    let (v11, v22) = (moments.var[0][0], moments.var[1][1]);
    let det = v11 * v22 - cov * cov;
    let scale = v11.abs().max(v22.abs());
    if det.is_nan() || det <= 1e-12 * scale * scale || scale <= zero_threshold(moments.n) {
        return Err(Error::SingularCovariance);
    }
    let y1 = table.get(0, 0) as f64 - moments.expected[0][0];
    let y2 = table.get(1, 1) as f64 - moments.expected[1][1];
    let stat = (v22 * y1 * y1 - 2.0 * cov * y1 * y2 + v11 * y2 * y2) / det;
    TestResult::chi_square(stat.max(0.0), 2)
}
