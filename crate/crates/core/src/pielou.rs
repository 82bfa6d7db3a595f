//! Pielou's test of segregation for two-class tables and its one-sided
//! Z versions.
//!
//! These treat the (base, NN) pairs as independent trials, which is only
//! justified when the table comes from a random sample of pairs.

use crate::dist::{Direction, TestResult};
use crate::error::{Error, Result};
use crate::nnct::Nnct;

struct Margins {
    n: f64,
    rows: [f64; 2],
    cols: [f64; 2],
}

fn two_class_margins(table: &Nnct) -> Result<Margins> {
    if table.q() != 2 {
        return Err(Error::RequiresTwoClasses(table.q()));
    }
    let rows = [table.row_sums()[0] as f64, table.row_sums()[1] as f64];
    let cols = [table.col_sums()[0] as f64, table.col_sums()[1] as f64];
    if rows.iter().chain(&cols).any(|&m| m == 0.0) {
        return Err(Error::ZeroMarginal);
    }
    Ok(Margins {
        n: table.n() as f64,
        rows,
        cols,
    })
}

/// Pearson chi-square on the 2x2 table with expected counts
/// `n_i C_j / n`, 1 degree of freedom. With `yates`, each deviation is
/// shrunk by 1/2 (clamped at zero).
pub fn pielou_chisq(table: &Nnct, yates: bool) -> Result<TestResult> {
    let m = two_class_margins(table)?;
    let mut stat = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let expected = m.rows[i] * m.cols[j] / m.n;
            let mut dev = (table.get(i, j) as f64 - expected).abs();
            if yates {
                dev = (dev - 0.5).max(0.0);
            }
            stat += dev * dev / expected;
        }
    }
    TestResult::chi_square(stat, 1)
}

/// Row-wise binomial Z: `(N11/n1 - N21/n2) sqrt(n1 n2 n / (C1 C2))`.
/// Positive values point to segregation; use `p_right` for the
/// segregation alternative and `p_left` for association.
pub fn pielou_z_rowwise(table: &Nnct) -> Result<TestResult> {
    let m = two_class_margins(table)?;
    let diff = table.get(0, 0) as f64 / m.rows[0] - table.get(1, 0) as f64 / m.rows[1];
    let z = diff * (m.rows[0] * m.rows[1] * m.n / (m.cols[0] * m.cols[1])).sqrt();
    Ok(TestResult::normal(z, Direction::Segregation))
}

/// Overall multinomial Z: `(N11 - n1 C1 / n) sqrt(n^3 / (n1 n2 C1 C2))`.
pub fn pielou_z_multinomial(table: &Nnct) -> Result<TestResult> {
    let m = two_class_margins(table)?;
    let dev = table.get(0, 0) as f64 - m.rows[0] * m.cols[0] / m.n;
    let z = dev * (m.n.powi(3) / (m.rows[0] * m.rows[1] * m.cols[0] * m.cols[1])).sqrt();
    Ok(TestResult::normal(z, Direction::Segregation))
}
