//! The three subcommands as library functions, so tests can call them
//! without spawning the binary.

use std::path::{Path, PathBuf};

use segstat::dixon::{dixon_cell_test, dixon_moments_for, dixon_overall_test, qr_adjust};
use segstat::nn::{compute_qr, graph_for, inner_buffer_width};
use segstat::null::{
    mc_randomization_test_on, run_study as run_null_study, verdict_bounds, NullKind, NullSpec, TestKind,
};
use segstat::pielou::{pielou_chisq, pielou_z_rowwise};
use segstat::ripley::{l_bivariate, l_envelope, l_univariate, EdgeWeight, Grid, LCurve, LStatistic};
use segstat::{build_nnct, EdgeCorrection, Execution, Rect, TestResult};

use crate::csv_io::{write_curve_csv, ParsedPoints};
use crate::error::{CliError, CliResult};
use crate::report::{
    AgreementEntry, AnalysisReport, Metadata, QrReport, SkippedTest, StudyReport, TableReport, TestEntry,
    SCHEMA_VERSION,
};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    pub correction: EdgeCorrection,
    /// Multiplier of the NN-distance standard deviation in the inner
    /// buffer width.
    pub buffer_k: u32,
    pub core_region: Option<Rect>,
    pub qr_adjust: bool,
    pub mc: Option<usize>,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            correction: EdgeCorrection::None,
            buffer_k: 1,
            core_region: None,
            qr_adjust: false,
            mc: None,
            seed: 1,
        }
    }
}

fn cell_name(i: usize, j: usize) -> String {
    format!("dixon-cell{}{}", i + 1, j + 1)
}

/// Builds the NNCT under the chosen correction and runs every applicable
/// test. Tests that cannot be computed for this table are listed as
/// skipped with the reason.
pub fn run_analysis(input: &ParsedPoints, opts: &AnalysisOptions) -> CliResult<AnalysisReport> {
    let points = &input.points;
    let q = points.num_classes();
    if q < 2 {
        return Err(CliError::Validation(
            "need at least two classes for a segregation analysis".into(),
        ));
    }
    let buffer_width = match opts.correction {
        EdgeCorrection::InnerBuffer => {
            let lambda = points.len() as f64 / points.region().area();
            Some(inner_buffer_width(lambda, opts.buffer_k)?)
        }
        _ => None,
    };
    if opts.correction == EdgeCorrection::OuterBuffer && opts.core_region.is_none() {
        return Err(CliError::Validation(
            "outer-buffer correction needs --core-region".into(),
        ));
    }
    let graph = graph_for(points, opts.correction, opts.core_region.as_ref(), buffer_width)?;
    let table = build_nnct(&graph, points.labels(), q)?;
    let observed = compute_qr(&graph);
    let used = if opts.qr_adjust {
        qr_adjust(table.n())
    } else {
        observed.clone()
    };

    let mut tests: Vec<(TestKind, TestEntry)> = Vec::new();
    let mut skipped = Vec::new();
    let mut record = |name: String, kind: Option<TestKind>, r: segstat::Result<TestResult>| match r {
        Ok(res) => tests.push((kind.unwrap_or(TestKind::PielouOverall), TestEntry::new(name, &res))),
        Err(e) => skipped.push(SkippedTest {
            name,
            reason: e.to_string(),
        }),
    };

    let moments = dixon_moments_for(&table, &used);
    for i in 0..q {
        for j in 0..q {
            let kind = if opts.qr_adjust {
                TestKind::DixonCellQr(i, j)
            } else {
                TestKind::DixonCell(i, j)
            };
            let r = moments.clone().and_then(|m| dixon_cell_test(&table, &m, i, j));
            record(cell_name(i, j), Some(kind), r);
        }
    }
    let overall_kind = if opts.qr_adjust {
        TestKind::DixonOverallQr
    } else {
        TestKind::DixonOverall
    };
    let pielou_note = |r: segstat::Result<TestResult>| {
        r.map_err(|e| match e {
            segstat::Error::RequiresTwoClasses(q) => {
                segstat::Error::InvalidSpec(format!("Pielou's tests need exactly two classes, the input has {q}"))
            }
            e => e,
        })
    };
    if q == 2 {
        let r = moments.and_then(|m| dixon_overall_test(&table, &m));
        record("dixon-overall".into(), Some(overall_kind), r);
    } else {
        record("dixon-overall".into(), None, Err(segstat::Error::RequiresTwoClasses(q)));
    }
    record(
        "pielou-overall".into(),
        Some(TestKind::PielouOverall),
        pielou_note(pielou_chisq(&table, false)),
    );
    record(
        "pielou-yates".into(),
        Some(TestKind::PielouYates),
        pielou_note(pielou_chisq(&table, true)),
    );
    record(
        "pielou-z".into(),
        Some(TestKind::PielouRight),
        pielou_note(pielou_z_rowwise(&table)),
    );

    if let Some(n_mc) = opts.mc {
        for (kind, entry) in tests.iter_mut() {
            match mc_randomization_test_on(points, &graph, *kind, n_mc, opts.seed, Execution::default()) {
                Ok(out) => entry.mc_p_value = Some(out.p_value),
                Err(segstat::Error::TooFewReplications { .. }) => {
                    return Err(CliError::Validation(format!("--mc must be at least 99, got {n_mc}")))
                }
                Err(_) => entry.mc_p_value = None,
            }
        }
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        correction: opts.correction,
        buffer_width,
        qr_adjust: opts.qr_adjust,
        num_points: points.len(),
        nnct: TableReport::new(&table, &input.class_names),
        qr: QrReport {
            q: observed.q,
            r: observed.r,
            qk: observed.qk.clone(),
            q_used: used.q,
            r_used: used.r,
        },
        tests: tests.into_iter().map(|(_, e)| e).collect(),
        skipped,
        metadata: Metadata::new(opts.seed, opts.mc),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyOptions {
    /// One of `rl-case2`, `rl-case3`, `rl-case4`, `rl-file`, `csr`,
    /// `rowwise-binomial`, `overall-multinomial`.
    pub null: String,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub n_mc: usize,
    pub alpha: f64,
    pub seed: u64,
    pub tests: Vec<String>,
    pub edge: EdgeCorrection,
    pub agreement: Option<(String, String)>,
}

fn parse_test(name: &str) -> CliResult<TestKind> {
    name.trim()
        .parse::<TestKind>()
        .map_err(|e| CliError::Validation(e.to_string()))
}

/// Empirical sizes (and optionally one agreement proportion) under a null
/// model. `locations` supplies the fixed points for `rl-file`.
pub fn run_study(opts: &StudyOptions, locations: Option<&ParsedPoints>) -> CliResult<StudyReport> {
    let kind = match opts.null.as_str() {
        "rl-case2" => NullKind::RlCase2,
        "rl-case3" => NullKind::RlCase3,
        "rl-case4" => NullKind::RlCase4,
        "rl-file" => NullKind::RlFixedLocations,
        "csr" => NullKind::CsrIndependence,
        "rowwise-binomial" => NullKind::RowwiseBinomial,
        "overall-multinomial" => NullKind::OverallMultinomial,
        other => return Err(CliError::Validation(format!("unknown null model '{other}'"))),
    };
    let mut tests: Vec<TestKind> = opts.tests.iter().map(|t| parse_test(t)).collect::<CliResult<_>>()?;
    let agreement = match &opts.agreement {
        Some((a, b)) => Some((parse_test(a)?, parse_test(b)?)),
        None => None,
    };
    if let Some((a, b)) = agreement {
        for t in [a, b] {
            if !tests.contains(&t) {
                tests.push(t);
            }
        }
    }
    if tests.is_empty() {
        return Err(CliError::Validation("select at least one test with --tests".into()));
    }

    let spec = if kind == NullKind::RlFixedLocations {
        let input =
            locations.ok_or_else(|| CliError::Validation("rl-file needs --input with the fixed locations".into()))?;
        let n = input.points.len();
        let n1 = opts.n1.unwrap_or(input.points.class_sizes()[0]);
        let n2 = opts.n2.unwrap_or(n.saturating_sub(n1));
        let mut spec = NullSpec::rl_fixed(input.points.coords().to_vec(), *input.points.region(), n1);
        spec.n2 = n2;
        spec
    } else {
        let (n1, n2) = opts
            .n1
            .zip(opts.n2)
            .ok_or_else(|| CliError::Validation("--n1 and --n2 are required".into()))?;
        NullSpec::new(kind, n1, n2)
    }
    .with_edge(opts.edge);

    let out = run_null_study(&spec, &tests, opts.n_mc, opts.alpha, opts.seed, Execution::default())?;
    let agreement = match agreement {
        Some((a, b)) => Some(AgreementEntry {
            test_a: a.to_string(),
            test_b: b.to_string(),
            proportion: out.agreement(a, b)?,
        }),
        None => None,
    };
    Ok(StudyReport {
        schema_version: SCHEMA_VERSION,
        null: opts.null.clone(),
        n1: spec.n1,
        n2: spec.n2,
        edge: opts.edge,
        n_mc: opts.n_mc,
        alpha: opts.alpha,
        nominal_band: verdict_bounds(opts.alpha, opts.n_mc),
        sizes: out.sizes(),
        agreement,
        metadata: Metadata::new(opts.seed, Some(opts.n_mc)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RipleyOptions {
    /// Largest distance on the grid; defaults to a quarter of the shorter
    /// side of the region.
    pub t_max: Option<f64>,
    pub steps: usize,
    /// 0 skips the envelope.
    pub envelope_sims: usize,
    pub seed: u64,
    pub weight: EdgeWeight,
}

impl Default for RipleyOptions {
    fn default() -> Self {
        RipleyOptions {
            t_max: None,
            steps: 50,
            envelope_sims: 99,
            seed: 1,
            weight: EdgeWeight::None,
        }
    }
}

/// A computed curve and the file name it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedCurve {
    pub file_name: String,
    pub curve: LCurve,
}

fn file_token(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

/// Univariate curves for every class with at least two points and the
/// bivariate curve for every pair of classes. Pairs are ordered by class
/// name, so the output does not depend on the order classes appear in.
pub fn run_ripley(input: &ParsedPoints, opts: &RipleyOptions) -> CliResult<Vec<NamedCurve>> {
    let points = &input.points;
    let region = *points.region();
    if !region.is_proper() {
        return Err(CliError::Validation(
            "Ripley curves need a region with positive area; pass --region".into(),
        ));
    }
    let t_max = opts.t_max.unwrap_or(0.25 * region.width().min(region.height()));
    let grid = Grid::new(t_max, opts.steps)?;
    if opts.envelope_sims != 0 && opts.envelope_sims < 39 {
        return Err(CliError::Validation(format!(
            "--envelope-sims must be 0 or at least 39, got {}",
            opts.envelope_sims
        )));
    }
    let q = points.num_classes();
    let classes: Vec<Vec<segstat::Point>> = (0..q).map(|c| points.class_points(c)).collect();
    if let Some(c) = classes.iter().position(Vec::is_empty) {
        return Err(CliError::Validation(format!(
            "class '{}' is empty",
            input.class_names[c]
        )));
    }
    let envelope = |n1: usize, n2: usize, stat: LStatistic| -> CliResult<_> {
        if opts.envelope_sims == 0 {
            return Ok(None);
        }
        Ok(Some(l_envelope(
            &region,
            n1,
            n2,
            stat,
            &grid,
            opts.weight,
            opts.envelope_sims,
            opts.seed,
            Execution::default(),
        )?))
    };

    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&a, &b| input.class_names[a].cmp(&input.class_names[b]));
    let mut out = Vec::new();
    for &c in &order {
        if classes[c].len() < 2 {
            eprintln!(
                "skipping univariate curve for '{}': fewer than 2 points",
                input.class_names[c]
            );
            continue;
        }
        let mut curve = l_univariate(&classes[c], &region, &grid, opts.weight)?;
        curve.envelope = envelope(classes[c].len(), 0, LStatistic::Univariate(0))?;
        out.push(NamedCurve {
            file_name: format!("l_{}.csv", file_token(&input.class_names[c])),
            curve,
        });
    }
    for (x, &a) in order.iter().enumerate() {
        for &b in &order[x + 1..] {
            let mut curve = l_bivariate(&classes[a], &classes[b], &region, &grid, opts.weight)?;
            curve.envelope = envelope(classes[a].len(), classes[b].len(), LStatistic::Bivariate)?;
            out.push(NamedCurve {
                file_name: format!(
                    "l_{}_{}.csv",
                    file_token(&input.class_names[a]),
                    file_token(&input.class_names[b])
                ),
                curve,
            });
        }
    }
    Ok(out)
}

/// Writes each curve into `dir`, returning the paths.
pub fn write_curves(dir: &Path, curves: &[NamedCurve]) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    curves
        .iter()
        .map(|c| {
            let path = dir.join(&c.file_name);
            write_curve_csv(std::fs::File::create(&path)?, &c.curve)?;
            Ok(path)
        })
        .collect()
}
