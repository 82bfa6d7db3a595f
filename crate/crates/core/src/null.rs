//! Null-pattern generators and Monte Carlo studies: empirical sizes,
//! agreement between tests, and randomization p-values.
//!
//! Every replication draws from its own stream derived from the study seed
//! and its index (see [`crate::seed`]), so results are bit-identical
//! across sequential and parallel execution.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample as sample_indices;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::dist::TestResult;
use crate::dixon::{dixon_cell_test, dixon_moments_for, dixon_overall_test, qr_adjust};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::nn::{compute_qr, graph_for, EdgeCorrection, NnGraph, QrStats};
use crate::nnct::{build_nnct, Nnct};
use crate::pielou::{pielou_chisq, pielou_z_rowwise};
use crate::points::{Point, PointSet, Rect};
use crate::seed::{stream_rng, Stream, StreamRng};

/// Region sampled for the outer buffer correction; the unit square is the
/// core region inside it.
pub const OUTER_SAMPLING_REGION: Rect = Rect {
    xmin: -0.5,
    ymin: -0.5,
    xmax: 1.5,
    ymax: 1.5,
};

const Z_95: f64 = 1.644_853_626_951_472_2;
const Z_975: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullKind {
    /// Random labeling of user-supplied locations.
    RlFixedLocations,
    /// Random labeling of `n1 + n2` uniform points on the unit square.
    RlCase2,
    /// Random labeling of two overlapping uniform clusters,
    /// `(0, 2/3)^2` and `(1/3, 1)^2`.
    RlCase3,
    /// Random labeling of two disjoint clusters, the unit square and
    /// `(2, 3) x (0, 1)`.
    RlCase4,
    /// Independent uniform samples of each class on the unit square.
    CsrIndependence,
    /// `N11 ~ Bin(n1, n1/n)`, `N21 ~ Bin(n2, n1/n)`.
    RowwiseBinomial,
    /// All four cells from one multinomial with
    /// `pi11 = pi21 = n1 / 2n`, `pi12 = pi22 = n2 / 2n`.
    OverallMultinomial,
}

impl NullKind {
    pub fn is_random_labeling(self) -> bool {
        matches!(
            self,
            NullKind::RlFixedLocations | NullKind::RlCase2 | NullKind::RlCase3 | NullKind::RlCase4
        )
    }

    pub fn is_synthetic_table(self) -> bool {
        matches!(self, NullKind::RowwiseBinomial | NullKind::OverallMultinomial)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullSpec {
    pub kind: NullKind,
    pub n1: usize,
    pub n2: usize,
    pub edge: EdgeCorrection,
    /// Fixed locations and their region for [`NullKind::RlFixedLocations`].
    pub locations: Option<(Vec<Point>, Rect)>,
}

impl NullSpec {
    pub fn new(kind: NullKind, n1: usize, n2: usize) -> Self {
        NullSpec {
            kind,
            n1,
            n2,
            edge: EdgeCorrection::None,
            locations: None,
        }
    }

    pub fn csr(n1: usize, n2: usize) -> Self {
        Self::new(NullKind::CsrIndependence, n1, n2)
    }

    pub fn rl_fixed(coords: Vec<Point>, region: Rect, n1: usize) -> Self {
        let n2 = coords.len().saturating_sub(n1);
        NullSpec {
            locations: Some((coords, region)),
            ..Self::new(NullKind::RlFixedLocations, n1, n2)
        }
    }

    pub fn with_edge(mut self, edge: EdgeCorrection) -> Self {
        self.edge = edge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidSpec("both class sizes must be at least 1".into()));
        }
        match self.kind {
            NullKind::RlFixedLocations => match &self.locations {
                None => return Err(Error::InvalidSpec("fixed-location labeling needs locations".into())),
                Some((coords, _)) if coords.len() != self.n1 + self.n2 => {
                    return Err(Error::InvalidSpec(format!(
                        "{} locations for n1 + n2 = {}",
                        coords.len(),
                        self.n1 + self.n2
                    )))
                }
                _ => {}
            },
            _ if self.locations.is_some() => {
                return Err(Error::InvalidSpec(
                    "locations are only used for fixed-location labeling".into(),
                ))
            }
            _ => {}
        }
        match self.edge {
            EdgeCorrection::None => Ok(()),
            EdgeCorrection::Toroidal if !self.kind.is_synthetic_table() => Ok(()),
            EdgeCorrection::OuterBuffer if self.kind == NullKind::CsrIndependence => Ok(()),
            e => Err(Error::InvalidSpec(format!(
                "{e} correction is not supported for this null model"
            ))),
        }
    }

    /// Study region of generated patterns.
    pub fn region(&self) -> Rect {
        match (self.kind, self.edge) {
            (NullKind::RlFixedLocations, _) => self.locations.as_ref().map_or(Rect::unit(), |l| l.1),
            (NullKind::RlCase4, _) => Rect {
                xmin: 0.0,
                ymin: 0.0,
                xmax: 3.0,
                ymax: 1.0,
            },
            (_, EdgeCorrection::OuterBuffer) => OUTER_SAMPLING_REGION,
            _ => Rect::unit(),
        }
    }
}

/// Output of [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Pattern(PointSet),
    Table(Nnct),
}

fn uniform_in<R: Rng + ?Sized>(rng: &mut R, r: &Rect) -> Point {
    let x = r.xmin + rng.random::<f64>() * r.width();
    let y = r.ymin + rng.random::<f64>() * r.height();
    Point::new(x, y)
}

fn square(lo: f64, hi: f64) -> Rect {
    Rect {
        xmin: lo,
        ymin: lo,
        xmax: hi,
        ymax: hi,
    }
}

/// Locations of the random-labeling cases (before labels are assigned).
fn rl_locations<R: Rng + ?Sized>(spec: &NullSpec, rng: &mut R) -> Vec<Point> {
    let (n1, n2) = (spec.n1, spec.n2);
    match spec.kind {
        NullKind::RlFixedLocations => spec.locations.as_ref().map(|l| l.0.clone()).unwrap_or_default(),
        NullKind::RlCase2 => (0..n1 + n2).map(|_| uniform_in(rng, &Rect::unit())).collect(),
        NullKind::RlCase3 => {
            let a = square(0.0, 2.0 / 3.0);
            let b = square(1.0 / 3.0, 1.0);
            let mut v: Vec<Point> = (0..n1).map(|_| uniform_in(rng, &a)).collect();
            v.extend((0..n2).map(|_| uniform_in(rng, &b)));
            v
        }
        NullKind::RlCase4 => {
            let b = Rect {
                xmin: 2.0,
                ymin: 0.0,
                xmax: 3.0,
                ymax: 1.0,
            };
            let mut v: Vec<Point> = (0..n1).map(|_| uniform_in(rng, &Rect::unit())).collect();
            v.extend((0..n2).map(|_| uniform_in(rng, &b)));
            v
        }
        _ => unreachable!("not a random-labeling case"),
    }
}

fn csr_pattern<R: Rng + ?Sized>(spec: &NullSpec, rng: &mut R) -> Result<PointSet> {
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    if spec.edge == EdgeCorrection::OuterBuffer {
        let core = Rect::unit();
        for (class, target) in [(0usize, spec.n1), (1usize, spec.n2)] {
            let mut inside = 0;
            while inside < target {
                let p = uniform_in(rng, &OUTER_SAMPLING_REGION);
                if core.contains(&p) {
                    inside += 1;
                }
                coords.push(p);
                labels.push(class);
            }
        }
    } else {
        for (class, count) in [(0usize, spec.n1), (1usize, spec.n2)] {
            for _ in 0..count {
                coords.push(uniform_in(rng, &Rect::unit()));
                labels.push(class);
            }
        }
    }
    PointSet::with_classes(coords, labels, 2, spec.region())
}

fn binomial<R: Rng + ?Sized>(rng: &mut R, trials: u64, p: f64) -> Result<u64> {
    if trials == 0 || p <= 0.0 {
        return Ok(0);
    }
    if p >= 1.0 {
        return Ok(trials);
    }
    let d = Binomial::new(trials, p).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    Ok(d.sample(rng))
}

fn synthetic_table<R: Rng + ?Sized>(spec: &NullSpec, rng: &mut R) -> Result<Nnct> {
    let (n1, n2) = (spec.n1 as u64, spec.n2 as u64);
    let n = n1 + n2;
    let p1 = n1 as f64 / n as f64;
    match spec.kind {
        NullKind::RowwiseBinomial => {
            let a = binomial(rng, n1, p1)?;
            let c = binomial(rng, n2, p1)?;
            Nnct::from_counts(vec![vec![a, n1 - a], vec![c, n2 - c]])
        }
        NullKind::OverallMultinomial => {
            let probs = [p1 / 2.0, (1.0 - p1) / 2.0, p1 / 2.0, (1.0 - p1) / 2.0];
            let mut cells = [0u64; 4];
            let mut remaining = n;
            let mut mass = 1.0;
            for (i, &p) in probs.iter().enumerate() {
                if i == probs.len() - 1 {
                    cells[i] = remaining;
                } else {
                    cells[i] = binomial(rng, remaining, (p / mass).min(1.0))?;
                    remaining -= cells[i];
                    mass -= p;
                }
            }
            Nnct::from_counts(vec![vec![cells[0], cells[1]], vec![cells[2], cells[3]]])
        }
        _ => unreachable!("not a synthetic-table kind"),
    }
}

/// Draws one realization of the null model from `rng`.
pub fn generate_with<R: Rng + ?Sized>(spec: &NullSpec, rng: &mut R) -> Result<Generated> {
    spec.validate()?;
    if spec.kind.is_synthetic_table() {
        return synthetic_table(spec, rng).map(Generated::Table);
    }
    if spec.kind == NullKind::CsrIndependence {
        return csr_pattern(spec, rng).map(Generated::Pattern);
    }
    let coords = rl_locations(spec, rng);
    let labels = random_labeling_with(coords.len(), spec.n1, spec.n2, rng)?;
    PointSet::with_classes(coords, labels, 2, spec.region()).map(Generated::Pattern)
}

/// One realization from a seed.
pub fn generate(spec: &NullSpec, seed: u64) -> Result<Generated> {
    generate_with(spec, &mut StreamRng::seed_from_u64(seed))
}

/// Labels `n1` uniformly chosen locations as class 0 and the rest as
/// class 1; every labeling is equally likely.
pub fn random_labeling_with<R: Rng + ?Sized>(
    n_locations: usize,
    n1: usize,
    n2: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if n1 + n2 != n_locations {
        return Err(Error::InvalidSpec(format!(
            "n1 + n2 = {} but there are {n_locations} locations",
            n1 + n2
        )));
    }
    let mut labels = vec![1usize; n_locations];
    for i in sample_indices(rng, n_locations, n1) {
        labels[i] = 0;
    }
    Ok(labels)
}

pub fn random_labeling(n_locations: usize, n1: usize, n2: usize, seed: u64) -> Result<Vec<usize>> {
    random_labeling_with(n_locations, n1, n2, &mut StreamRng::seed_from_u64(seed))
}

/// Tests that can be run inside a Monte Carlo study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestKind {
    /// Dixon's cell-specific test, two-sided.
    DixonCell(usize, usize),
    /// Cell-specific test with `Q`, `R` replaced by `0.63 n`, `0.62 n`.
    DixonCellQr(usize, usize),
    DixonOverall,
    DixonOverallQr,
    PielouOverall,
    PielouYates,
    /// One-sided Z test against segregation.
    PielouRight,
    /// One-sided Z test against association.
    PielouLeft,
}

impl TestKind {
    pub fn needs_geometry(self) -> bool {
        matches!(self, TestKind::DixonCell(..) | TestKind::DixonOverall)
    }

    pub fn is_dixon(self) -> bool {
        matches!(
            self,
            TestKind::DixonCell(..) | TestKind::DixonCellQr(..) | TestKind::DixonOverall | TestKind::DixonOverallQr
        )
    }

    /// Runs the test. Conditional Dixon tests need the `Q`/`R` counts of
    /// the pattern the table came from.
    pub fn evaluate(self, table: &Nnct, qr: Option<&QrStats>) -> Result<TestResult> {
        let conditional = || qr.ok_or(Error::NotApplicable("conditional Dixon test"));
        match self {
            TestKind::DixonCell(i, j) => dixon_cell_test(table, &dixon_moments_for(table, conditional()?)?, i, j),
            TestKind::DixonCellQr(i, j) => {
                dixon_cell_test(table, &dixon_moments_for(table, &qr_adjust(table.n()))?, i, j)
            }
            TestKind::DixonOverall => dixon_overall_test(table, &dixon_moments_for(table, conditional()?)?),
            TestKind::DixonOverallQr => dixon_overall_test(table, &dixon_moments_for(table, &qr_adjust(table.n()))?),
            TestKind::PielouOverall => pielou_chisq(table, false),
            TestKind::PielouYates => pielou_chisq(table, true),
            TestKind::PielouRight | TestKind::PielouLeft => pielou_z_rowwise(table),
        }
    }

    /// p-value the test is decided on.
    pub fn decision_p(self, r: &TestResult) -> f64 {
        match self {
            TestKind::PielouRight => r.p_right,
            TestKind::PielouLeft => r.p_left,
            _ => r.p_two_sided,
        }
    }

    pub fn rejects(self, r: &TestResult, alpha: f64) -> bool {
        self.decision_p(r) <= alpha
    }

    /// Scalar that grows with evidence against the null, for
    /// randomization p-values.
    pub fn extremeness(self, r: &TestResult) -> f64 {
        match self {
            TestKind::DixonCell(..) | TestKind::DixonCellQr(..) => r.statistic.abs(),
            TestKind::PielouLeft => -r.statistic,
            _ => r.statistic,
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestKind::DixonCell(i, j) => write!(f, "dixon-cell{}{}", i + 1, j + 1),
            TestKind::DixonCellQr(i, j) => write!(f, "dixon-cell{}{}-qr", i + 1, j + 1),
            TestKind::DixonOverall => f.write_str("dixon-overall"),
            TestKind::DixonOverallQr => f.write_str("dixon-overall-qr"),
            TestKind::PielouOverall => f.write_str("pielou-overall"),
            TestKind::PielouYates => f.write_str("pielou-yates"),
            TestKind::PielouRight => f.write_str("pielou-right"),
            TestKind::PielouLeft => f.write_str("pielou-left"),
        }
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::InvalidSpec(format!("unknown test '{s}'"));
        Ok(match s {
            "dixon-overall" => TestKind::DixonOverall,
            "dixon-overall-qr" => TestKind::DixonOverallQr,
            "pielou-overall" => TestKind::PielouOverall,
            "pielou-yates" => TestKind::PielouYates,
            "pielou-right" => TestKind::PielouRight,
            "pielou-left" => TestKind::PielouLeft,
            _ => {
                let rest = s.strip_prefix("dixon-cell").ok_or_else(unknown)?;
                let (digits, qr) = match rest.strip_suffix("-qr") {
                    Some(d) => (d, true),
                    None => (rest, false),
                };
                let b = digits.as_bytes();
                if b.len() != 2 || !b.iter().all(|c| (b'1'..=b'9').contains(c)) {
                    return Err(unknown());
                }
                let (i, j) = ((b[0] - b'1') as usize, (b[1] - b'1') as usize);
                if qr {
                    TestKind::DixonCellQr(i, j)
                } else {
                    TestKind::DixonCell(i, j)
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Conservative,
    Nominal,
    Liberal,
}

impl Verdict {
    /// Superscript-style flag: `c`, `l` or empty.
    pub fn flag(self) -> &'static str {
        match self {
            Verdict::Conservative => "c",
            Verdict::Nominal => "",
            Verdict::Liberal => "l",
        }
    }
}

/// Band `alpha -/+ z_.95 sqrt(alpha (1 - alpha) / n_mc)` outside which an
/// empirical size counts as significantly conservative or liberal.
pub fn verdict_bounds(alpha: f64, n_mc: usize) -> (f64, f64) {
    let half = Z_95 * (alpha * (1.0 - alpha) / n_mc as f64).sqrt();
    (alpha - half, alpha + half)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeEstimate {
    pub test: TestKind,
    pub alpha: f64,
    pub alpha_hat: f64,
    pub rejections: usize,
    pub n_mc: usize,
    /// Replications where the test could not be computed (counted as
    /// non-rejections).
    pub undefined: usize,
    pub ci_low: f64,
    pub ci_high: f64,
    pub verdict: Verdict,
}

impl SizeEstimate {
    fn new(test: TestKind, alpha: f64, rejections: usize, undefined: usize, n_mc: usize) -> Self {
        let alpha_hat = rejections as f64 / n_mc as f64;
        let half = Z_975 * (alpha_hat * (1.0 - alpha_hat) / n_mc as f64).sqrt();
        let (lo, hi) = verdict_bounds(alpha, n_mc);
        let verdict = if alpha_hat < lo {
            Verdict::Conservative
        } else if alpha_hat > hi {
            Verdict::Liberal
        } else {
            Verdict::Nominal
        };
        SizeEstimate {
            test,
            alpha,
            alpha_hat,
            rejections,
            n_mc,
            undefined,
            ci_low: (alpha_hat - half).max(0.0),
            ci_high: (alpha_hat + half).min(1.0),
            verdict,
        }
    }
}

/// Per-replication decisions for a set of tests.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOutcome {
    pub tests: Vec<TestKind>,
    pub alpha: f64,
    pub n_mc: usize,
    /// `decisions[r][t]`: `Some(reject)` or `None` when test `t` was not
    /// computable in replication `r`.
    pub decisions: Vec<Vec<Option<bool>>>,
}

impl StudyOutcome {
    fn index_of(&self, test: TestKind) -> Result<usize> {
        self.tests
            .iter()
            .position(|&t| t == test)
            .ok_or(Error::InvalidSpec(format!("{test} was not part of the study")))
    }

    pub fn size(&self, test: TestKind) -> Result<SizeEstimate> {
        let t = self.index_of(test)?;
        let rejections = self.decisions.iter().filter(|d| d[t] == Some(true)).count();
        let undefined = self.decisions.iter().filter(|d| d[t].is_none()).count();
        Ok(SizeEstimate::new(test, self.alpha, rejections, undefined, self.n_mc))
    }

    pub fn sizes(&self) -> Vec<SizeEstimate> {
        self.tests
            .iter()
            .map(|&t| self.size(t).expect("test in study"))
            .collect()
    }

    /// Proportion of replications where both tests reject.
    pub fn agreement(&self, a: TestKind, b: TestKind) -> Result<f64> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        let both = self
            .decisions
            .iter()
            .filter(|d| d[ia] == Some(true) && d[ib] == Some(true))
            .count();
        Ok(both as f64 / self.n_mc as f64)
    }
}

fn decide(tests: &[TestKind], table: &Nnct, qr: Option<&QrStats>, alpha: f64) -> Vec<Option<bool>> {
    tests
        .iter()
        .map(|t| t.evaluate(table, qr).ok().map(|r| t.rejects(&r, alpha)))
        .collect()
}

/// Pattern for one replication of a point-based null model, with its
/// graph (built for the spec's edge correction).
fn replicate_pattern(spec: &NullSpec, rng: &mut StreamRng) -> Result<(PointSet, NnGraph)> {
    let points = match generate_with(spec, rng)? {
        Generated::Pattern(p) => p,
        Generated::Table(_) => unreachable!("point-based model"),
    };
    let core = Rect::unit();
    let graph = graph_for(&points, spec.edge, Some(&core), None)?;
    Ok((points, graph))
}

/// Runs `n_mc` replications of the null model and records the decision of
/// every test in each. Random-labeling models fix the locations once per
/// study and relabel in each replication.
pub fn run_study(
    spec: &NullSpec,
    tests: &[TestKind],
    n_mc: usize,
    alpha: f64,
    seed: u64,
    exec: Execution,
) -> Result<StudyOutcome> {
    spec.validate()?;
    if n_mc < 100 {
        return Err(Error::TooFewReplications {
            what: "an empirical-size study",
            min: 100,
            got: n_mc,
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidSpec(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if tests.is_empty() {
        return Err(Error::InvalidSpec("no tests selected".into()));
    }
    if spec.kind.is_synthetic_table() {
        if let Some(t) = tests.iter().find(|t| t.is_dixon()) {
            let _ = t;
            return Err(Error::NotApplicable("Dixon tests on synthetic tables"));
        }
    }

    let decisions: Vec<Result<Vec<Option<bool>>>> = if spec.kind.is_random_labeling() {
        let mut loc_rng = stream_rng(seed, Stream::Locations, 0);
        let coords = rl_locations(spec, &mut loc_rng);
        let base_labels = random_labeling_with(coords.len(), spec.n1, spec.n2, &mut loc_rng)?;
        let points = PointSet::with_classes(coords, base_labels, 2, spec.region())?;
        let graph = graph_for(&points, spec.edge, None, None)?;
        let qr = compute_qr(&graph);
        map_range(exec, n_mc as u64, |r| {
            let mut rng = stream_rng(seed, Stream::Replication, r);
            let labels = random_labeling_with(points.len(), spec.n1, spec.n2, &mut rng)?;
            let table = build_nnct(&graph, &labels, 2)?;
            Ok(decide(tests, &table, Some(&qr), alpha))
        })
    } else if spec.kind.is_synthetic_table() {
        map_range(exec, n_mc as u64, |r| {
            let mut rng = stream_rng(seed, Stream::Replication, r);
            let table = synthetic_table(spec, &mut rng)?;
            Ok(decide(tests, &table, None, alpha))
        })
    } else {
        map_range(exec, n_mc as u64, |r| {
            let mut rng = stream_rng(seed, Stream::Replication, r);
            let (points, graph) = replicate_pattern(spec, &mut rng)?;
            let qr = compute_qr(&graph);
            let table = build_nnct(&graph, points.labels(), 2)?;
            Ok(decide(tests, &table, Some(&qr), alpha))
        })
    };

    Ok(StudyOutcome {
        tests: tests.to_vec(),
        alpha,
        n_mc,
        decisions: decisions.into_iter().collect::<Result<_>>()?,
    })
}

/// Rejection proportion of one test under the null model.
pub fn empirical_size(
    spec: &NullSpec,
    test: TestKind,
    n_mc: usize,
    alpha: f64,
    seed: u64,
    exec: Execution,
) -> Result<SizeEstimate> {
    run_study(spec, &[test], n_mc, alpha, seed, exec)?.size(test)
}

/// Proportion of replications in which both tests reject, computed on one
/// shared replication stream.
pub fn agreement_proportion(
    spec: &NullSpec,
    a: TestKind,
    b: TestKind,
    n_mc: usize,
    alpha: f64,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    let tests: Vec<TestKind> = if a == b { vec![a] } else { vec![a, b] };
    run_study(spec, &tests, n_mc, alpha, seed, exec)?.agreement(a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizationOutcome {
    pub test: TestKind,
    pub observed: TestResult,
    pub p_value: f64,
    pub n_mc: usize,
}

/// Monte Carlo randomization test against random labeling of the fixed
/// locations: `p = (1 + #{relabelings at least as extreme}) / (n_mc + 1)`.
/// Relabelings permute the observed labels, so class sizes are kept.
pub fn mc_randomization_test_on(
    points: &PointSet,
    graph: &NnGraph,
    test: TestKind,
    n_mc: usize,
    seed: u64,
    exec: Execution,
) -> Result<RandomizationOutcome> {
    if n_mc < 99 {
        return Err(Error::TooFewReplications {
            what: "a randomization test",
            min: 99,
            got: n_mc,
        });
    }
    let q = points.num_classes();
    let qr = compute_qr(graph);
    let observed_table = build_nnct(graph, points.labels(), q)?;
    let observed = test.evaluate(&observed_table, Some(&qr))?;
    let obs = test.extremeness(&observed);
    let tol = 1e-10 * obs.abs().max(1.0);

    let values: Vec<Option<f64>> = map_range(exec, n_mc as u64, |r| {
        let mut rng = stream_rng(seed, Stream::Relabel, r);
        let mut labels = points.labels().to_vec();
        labels.shuffle(&mut rng);
        let table = build_nnct(graph, &labels, q).ok()?;
        test.evaluate(&table, Some(&qr)).ok().map(|res| test.extremeness(&res))
    });

    if values.iter().all(|v| v.is_some_and(|x| (x - obs).abs() <= tol)) {
        return Err(Error::DegenerateStatistic);
    }
    let as_extreme = values.iter().filter(|v| v.is_some_and(|x| x >= obs - tol)).count();
    Ok(RandomizationOutcome {
        test,
        observed,
        p_value: (1 + as_extreme) as f64 / (n_mc + 1) as f64,
        n_mc,
    })
}

/// Randomization test on the uncorrected nearest-neighbor graph.
pub fn mc_randomization_test(
    points: &PointSet,
    test: TestKind,
    n_mc: usize,
    seed: u64,
) -> Result<RandomizationOutcome> {
    let graph = crate::nn::build_nn_graph(points)?;
    mc_randomization_test_on(points, &graph, test, n_mc, seed, Execution::default())
}
