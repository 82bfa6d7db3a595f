//! Analysis and study reports: JSON records and their text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use segstat::null::SizeEstimate;
use segstat::{Direction, EdgeCorrection, Nnct, Reference, TestResult};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub row_sums: Vec<u64>,
    pub col_sums: Vec<u64>,
    pub n: u64,
    /// Cell percentages relative to the row's class size.
    pub row_percent: Vec<Vec<f64>>,
    /// Row and column totals as percentages of `n`.
    pub row_total_percent: Vec<f64>,
    pub col_total_percent: Vec<f64>,
}

impl TableReport {
    pub fn new(table: &Nnct, classes: &[String]) -> Self {
        let q = table.q();
        TableReport {
            classes: classes.to_vec(),
            counts: table.counts().to_vec(),
            row_sums: table.row_sums().to_vec(),
            col_sums: table.col_sums().to_vec(),
            n: table.n(),
            row_percent: (0..q)
                .map(|i| (0..q).map(|j| table.row_percent(i, j)).collect())
                .collect(),
            row_total_percent: (0..q).map(|i| 100.0 * table.row_proportion(i)).collect(),
            col_total_percent: (0..q).map(|j| 100.0 * table.col_proportion(j)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QrReport {
    pub q: f64,
    pub r: f64,
    pub qk: Vec<usize>,
    /// Values fed to the Dixon moments (differ from `q`, `r` under the
    /// QR adjustment).
    pub q_used: f64,
    pub r_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestEntry {
    pub name: String,
    pub statistic: f64,
    pub distribution: Reference,
    pub df: Option<u32>,
    pub p_two_sided: f64,
    pub p_left: f64,
    pub p_right: f64,
    pub direction: Direction,
    /// Monte Carlo randomization p-value, when requested.
    pub mc_p_value: Option<f64>,
}

impl TestEntry {
    pub fn new(name: impl Into<String>, r: &TestResult) -> Self {
        TestEntry {
            name: name.into(),
            statistic: r.statistic,
            distribution: r.distribution,
            df: r.df,
            p_two_sided: r.p_two_sided,
            p_left: r.p_left,
            p_right: r.p_right,
            direction: r.direction_hint,
            mc_p_value: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedTest {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub mc_replications: Option<usize>,
}

impl Metadata {
    pub fn new(seed: u64, mc: Option<usize>) -> Self {
        Metadata {
            tool: "segstat".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            mc_replications: mc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub correction: EdgeCorrection,
    pub buffer_width: Option<f64>,
    pub qr_adjust: bool,
    pub num_points: usize,
    pub nnct: TableReport,
    pub qr: QrReport,
    pub tests: Vec<TestEntry>,
    pub skipped: Vec<SkippedTest>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementEntry {
    pub test_a: String,
    pub test_b: String,
    pub proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub schema_version: u32,
    pub null: String,
    pub n1: usize,
    pub n2: usize,
    pub edge: EdgeCorrection,
    pub n_mc: usize,
    pub alpha: f64,
    /// Bounds outside which a size counts as conservative or liberal.
    pub nominal_band: (f64, f64),
    pub sizes: Vec<SizeEstimate>,
    pub agreement: Option<AgreementEntry>,
    pub metadata: Metadata,
}

/// Four decimals without the leading zero, `<.0001` below that.
pub fn format_p(p: f64) -> String {
    if p.is_nan() {
        return "NA".into();
    }
    if p < 0.0001 {
        return "<.0001".into();
    }
    let s = format!("{p:.4}");
    s.strip_prefix('0').map(str::to_string).unwrap_or(s)
}

fn format_prop(p: f64) -> String {
    let s = format!("{p:.4}");
    s.strip_prefix('0').map(str::to_string).unwrap_or(s)
}

pub fn render_analysis(r: &AnalysisReport) -> String {
    let t = &r.nnct;
    let q = t.classes.len();
    let mut s = String::new();
    let _ = writeln!(s, "NNCT (n = {}, correction: {})", t.n, r.correction);
    if let Some(w) = r.buffer_width {
        let _ = writeln!(s, "inner buffer width: {w:.4}");
    }
    let width = t.classes.iter().map(|c| c.len()).max().unwrap_or(1).max(4) + 6;
    let _ = write!(s, "{:width$}", "base \\ NN");
    for c in &t.classes {
        let _ = write!(s, "{:>16}", c);
    }
    let _ = writeln!(s, "{:>16}", "sum");
    for i in 0..q {
        let _ = write!(s, "{:width$}", t.classes[i]);
        for j in 0..q {
            let _ = write!(s, "{:>16}", format!("{} ({:.0}%)", t.counts[i][j], t.row_percent[i][j]));
        }
        let _ = writeln!(
            s,
            "{:>16}",
            format!("{} ({:.0}%)", t.row_sums[i], t.row_total_percent[i])
        );
    }
    let _ = write!(s, "{:width$}", "sum");
    for j in 0..q {
        let _ = write!(
            s,
            "{:>16}",
            format!("{} ({:.0}%)", t.col_sums[j], t.col_total_percent[j])
        );
    }
    let _ = writeln!(s, "{:>16}", t.n);
    let _ = writeln!(s);
    let _ = write!(s, "Q = {}, R = {}", r.qr.q, r.qr.r);
    if r.qr_adjust {
        let _ = write!(s, " (Dixon moments use Q = {:.2}, R = {:.2})", r.qr.q_used, r.qr.r_used);
    }
    let _ = writeln!(s);
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<20}{:>10}{:>10}{:>10}{:>10}{:>10}  direction",
        "test", "statistic", "p", "p-left", "p-right", "mc p"
    );
    for e in &r.tests {
        let direction = match e.direction {
            Direction::Segregation => "segregation",
            Direction::Association => "association",
            Direction::None => "",
        };
        let _ = writeln!(
            s,
            "{:<20}{:>10.2}{:>10}{:>10}{:>10}{:>10}  {}",
            e.name,
            e.statistic,
            format_p(e.p_two_sided),
            format_p(e.p_left),
            format_p(e.p_right),
            e.mc_p_value.map(format_p).unwrap_or_else(|| "-".into()),
            direction
        );
    }
    for k in &r.skipped {
        let _ = writeln!(s, "skipped {}: {}", k.name, k.reason);
    }
    s
}

pub fn render_study(r: &StudyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "null: {} (n1 = {}, n2 = {}), edge: {}, n_mc = {}, alpha = {}, seed = {}",
        r.null, r.n1, r.n2, r.edge, r.n_mc, r.alpha, r.metadata.seed
    );
    let _ = writeln!(
        s,
        "sizes below {} (above {}) are marked c (l)",
        format_prop(r.nominal_band.0),
        format_prop(r.nominal_band.1)
    );
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<20}{:>10}{:>20}{:>12}{:>10}",
        "test", "size", "95% CI", "verdict", "undefined"
    );
    for e in &r.sizes {
        let verdict = match e.verdict {
            segstat::null::Verdict::Conservative => "c",
            segstat::null::Verdict::Nominal => "nominal",
            segstat::null::Verdict::Liberal => "l",
        };
        let _ = writeln!(
            s,
            "{:<20}{:>10}{:>20}{:>12}{:>10}",
            e.test.to_string(),
            format_prop(e.alpha_hat),
            format!("[{}, {}]", format_prop(e.ci_low), format_prop(e.ci_high)),
            verdict,
            e.undefined
        );
    }
    if let Some(a) = &r.agreement {
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "agreement({}, {}) = {}",
            a.test_a,
            a.test_b,
            format_prop(a.proportion)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_formatting() {
        assert_eq!(format_p(0.0139), ".0139");
        assert_eq!(format_p(0.00004), "<.0001");
        assert_eq!(format_p(0.0001), ".0001");
        assert_eq!(format_p(1.0), "1.0000");
        assert_eq!(format_p(0.98614), ".9861");
    }

    #[test]
    fn table_percentages_follow_rows() {
        let t = Nnct::from_counts(vec![vec![149, 33], vec![43, 48]]).unwrap();
        let r = TableReport::new(&t, &["A".into(), "B".into()]);
        for row in &r.row_percent {
            assert!((row.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        }
        assert!((r.row_total_percent.iter().sum::<f64>() - 100.0).abs() < 1e-9);
        assert_eq!(r.row_percent[0][0].round(), 82.0);
        assert_eq!(r.col_total_percent[1].round(), 30.0);
    }
}
