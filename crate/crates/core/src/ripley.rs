//! Ripley's univariate and bivariate L-functions with pointwise Monte Carlo
//! envelopes under CSR independence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::points::{Point, Rect};
use crate::seed::{stream_rng, Stream};

use rand::Rng;

/// Pair weight in the K estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeWeight {
    /// Every pair counts once.
    #[default]
    None,
    /// `A / |W ∩ (W + (x_l - x_k))|`, the translation correction.
    Translation,
}

/// Evaluation grid `t_k = k t_max / steps`, `k = 1..=steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub t_max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(t_max: f64, steps: usize) -> Result<Self> {
        if !(t_max > 0.0 && t_max.is_finite()) || steps == 0 {
            return Err(Error::InvalidSpec(format!(
                "grid needs t_max > 0 and at least one step (got {t_max}, {steps})"
            )));
        }
        Ok(Grid { t_max, steps })
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_max * (k + 1) as f64 / self.steps as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.t(k)).collect()
    }

    /// Index of the first grid point with `d <= t_k`, if any.
    fn bin(&self, d: f64) -> Option<usize> {
        if d > self.t(self.steps - 1) {
            return None;
        }
        let mut k = ((d / self.t_max * self.steps as f64).ceil() as usize).clamp(1, self.steps) - 1;
        while k > 0 && d <= self.t(k - 1) {
            k -= 1;
        }
        while d > self.t(k) {
            k += 1;
        }
        Some(k)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub low: Vec<f64>,
    pub high: Vec<f64>,
    pub n_sim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LCurve {
    pub t: Vec<f64>,
    pub l_minus_t: Vec<f64>,
    pub envelope: Option<Envelope>,
}

impl LCurve {
    /// Share of grid points where the curve lies inside the envelope.
    pub fn fraction_inside(&self) -> Option<f64> {
        let env = self.envelope.as_ref()?;
        let inside = self
            .l_minus_t
            .iter()
            .zip(env.low.iter().zip(&env.high))
            .filter(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
            .count();
        Some(inside as f64 / self.t.len() as f64)
    }
}

fn pair_weight(a: &Point, b: &Point, region: &Rect, weight: EdgeWeight) -> f64 {
    match weight {
        EdgeWeight::None => 1.0,
        EdgeWeight::Translation => {
            let overlap = (region.width() - (a.x - b.x).abs()) * (region.height() - (a.y - b.y).abs());
            if overlap > 0.0 {
                region.area() / overlap
            } else {
                0.0
            }
        }
    }
}

/// Cumulative weighted pair counts on the grid.
fn accumulate<'a>(
    pairs: impl Iterator<Item = (&'a Point, &'a Point)>,
    region: &Rect,
    grid: &Grid,
    weight: EdgeWeight,
) -> Vec<f64> {
    let mut bins = vec![0.0; grid.steps];
    for (a, b) in pairs {
        if let Some(k) = grid.bin(a.dist(b)) {
            bins[k] += pair_weight(a, b, region, weight);
        }
    }
    let mut acc = 0.0;
    bins.iter_mut().for_each(|v| {
        acc += *v;
        *v = acc;
    });
    bins
}

fn l_minus_t(k_hat: &[f64], grid: &Grid) -> Vec<f64> {
    k_hat
        .iter()
        .enumerate()
        .map(|(i, k)| (k / std::f64::consts::PI).sqrt() - grid.t(i))
        .collect()
}

/// `K(t) = A / (n (n - 1)) sum_{k != l} e_kl 1(d_kl <= t)` on the grid.
pub fn k_univariate(points: &[Point], region: &Rect, grid: &Grid, weight: EdgeWeight) -> Result<Vec<f64>> {
    region.require_proper()?;
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { required: 2, got: n });
    }
    let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    let sums = accumulate(pairs.map(|(i, j)| (&points[i], &points[j])), region, grid, weight);
    // Each unordered pair stands for two ordered ones.
    let scale = 2.0 * region.area() / (n as f64 * (n - 1) as f64);
    Ok(sums.into_iter().map(|s| s * scale).collect())
}

/// `K_12(t) = A / (n1 n2) sum_{k in 1, l in 2} e_kl 1(d_kl <= t)`.
pub fn k_bivariate(
    first: &[Point],
    second: &[Point],
    region: &Rect,
    grid: &Grid,
    weight: EdgeWeight,
) -> Result<Vec<f64>> {
    region.require_proper()?;
    if first.is_empty() || second.is_empty() {
        return Err(Error::TooFewPoints { required: 1, got: 0 });
    }
    let pairs = first.iter().flat_map(|a| second.iter().map(move |b| (a, b)));
    let sums = accumulate(pairs, region, grid, weight);
    let scale = region.area() / (first.len() as f64 * second.len() as f64);
    Ok(sums.into_iter().map(|s| s * scale).collect())
}

pub fn l_univariate(points: &[Point], region: &Rect, grid: &Grid, weight: EdgeWeight) -> Result<LCurve> {
    let k = k_univariate(points, region, grid, weight)?;
    Ok(LCurve {
        t: grid.values(),
        l_minus_t: l_minus_t(&k, grid),
        envelope: None,
    })
}

pub fn l_bivariate(
    first: &[Point],
    second: &[Point],
    region: &Rect,
    grid: &Grid,
    weight: EdgeWeight,
) -> Result<LCurve> {
    let k = k_bivariate(first, second, region, grid, weight)?;
    Ok(LCurve {
        t: grid.values(),
        l_minus_t: l_minus_t(&k, grid),
        envelope: None,
    })
}

/// Which curve an envelope is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LStatistic {
    /// `L_ii` for class 0 (`n1` points) or class 1 (`n2` points).
    Univariate(usize),
    Bivariate,
}

/// Ranks of the lower and upper pointwise bounds among `n_sim` sorted
/// values (1-based): `floor(0.025 (n_sim + 1))` and its mirror.
pub fn envelope_ranks(n_sim: usize) -> (usize, usize) {
    let low = ((0.025 * (n_sim + 1) as f64).floor() as usize).max(1);
    (low, n_sim + 1 - low)
}

/// Pointwise 95% envelope of `L - t` from `n_sim` CSR independence
/// patterns with `n1` and `n2` points on `region`.
#[allow(clippy::too_many_arguments)]
pub fn l_envelope(
    region: &Rect,
    n1: usize,
    n2: usize,
    statistic: LStatistic,
    grid: &Grid,
    weight: EdgeWeight,
    n_sim: usize,
    seed: u64,
    exec: Execution,
) -> Result<Envelope> {
    region.require_proper()?;
    if n_sim < 39 {
        return Err(Error::TooFewReplications {
            what: "an envelope",
            min: 39,
            got: n_sim,
        });
    }
    let sims: Vec<Result<Vec<f64>>> = map_range(exec, n_sim as u64, |r| {
        let mut rng = stream_rng(seed, Stream::Envelope, r);
        let mut draw = |count: usize| -> Vec<Point> {
            (0..count)
                .map(|_| {
                    Point::new(
                        region.xmin + rng.random::<f64>() * region.width(),
                        region.ymin + rng.random::<f64>() * region.height(),
                    )
                })
                .collect()
        };
        let a = draw(n1);
        let b = draw(n2);
        let curve = match statistic {
            LStatistic::Univariate(0) => l_univariate(&a, region, grid, weight)?,
            LStatistic::Univariate(_) => l_univariate(&b, region, grid, weight)?,
            LStatistic::Bivariate => l_bivariate(&a, &b, region, grid, weight)?,
        };
        Ok(curve.l_minus_t)
    });
    let sims = sims.into_iter().collect::<Result<Vec<_>>>()?;
    let (lo_rank, hi_rank) = envelope_ranks(n_sim);
    let mut low = Vec::with_capacity(grid.steps);
    let mut high = Vec::with_capacity(grid.steps);
    let mut column = vec![0.0; n_sim];
    for k in 0..grid.steps {
        for (c, s) in column.iter_mut().zip(&sims) {
            *c = s[k];
        }
        column.sort_by(f64::total_cmp);
        low.push(column[lo_rank - 1]);
        high.push(column[hi_rank - 1]);
    }
    Ok(Envelope { low, high, n_sim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn naive_k(points: &[Point], region: &Rect, t: f64, weight: EdgeWeight) -> f64 {
        let n = points.len();
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                if k != l && points[k].dist(&points[l]) <= t {
                    s += pair_weight(&points[k], &points[l], region, weight);
                }
            }
        }
        region.area() * s / (n * (n - 1)) as f64
    }

    fn uniform(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point::new(rng.random(), rng.random())).collect()
    }

    #[test]
    fn two_points() {
        let pts = [Point::new(0.2, 0.5), Point::new(0.7, 0.5)];
        let grid = Grid::new(0.4, 4).unwrap();
        let c = l_univariate(&pts, &Rect::unit(), &grid, EdgeWeight::None).unwrap();
        for (t, v) in c.t.iter().zip(&c.l_minus_t) {
            assert_eq!(*v, -t);
        }
    }

    #[test]
    fn grid_bins() {
        let g = Grid::new(1.0, 10).unwrap();
        assert_eq!(g.bin(0.1), Some(0));
        assert_eq!(g.bin(0.10000001), Some(1));
        assert_eq!(g.bin(0.3), Some(2));
        assert_eq!(g.bin(1.0), Some(9));
        assert_eq!(g.bin(1.01), None);
        assert_eq!(g.values().len(), 10);
        assert!(Grid::new(0.0, 5).is_err());
    }

    #[test]
    fn matches_naive_accumulation() {
        let pts = uniform(150, 2);
        let region = Rect::unit();
        let grid = Grid::new(0.25, 25).unwrap();
        for w in [EdgeWeight::None, EdgeWeight::Translation] {
            let k = k_univariate(&pts, &region, &grid, w).unwrap();
            for (i, t) in grid.values().iter().enumerate() {
                let oracle = naive_k(&pts, &region, *t, w);
                assert!((k[i] - oracle).abs() < 1e-9 * oracle.max(1.0), "t={t}");
            }
            assert!(k.windows(2).all(|p| p[0] <= p[1]));
        }
    }

    #[test]
    fn bivariate_is_symmetric() {
        let a = uniform(40, 3);
        let b = uniform(60, 4);
        let grid = Grid::new(0.3, 30).unwrap();
        for w in [EdgeWeight::None, EdgeWeight::Translation] {
            let ab = l_bivariate(&a, &b, &Rect::unit(), &grid, w).unwrap();
            let ba = l_bivariate(&b, &a, &Rect::unit(), &grid, w).unwrap();
            for (x, y) in ab.l_minus_t.iter().zip(&ba.l_minus_t) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn far_classes_have_no_cross_pairs() {
        let a = vec![Point::new(0.0, 0.0), Point::new(0.05, 0.0)];
        let b = vec![Point::new(1.0, 1.0)];
        let grid = Grid::new(0.5, 5).unwrap();
        let c = l_bivariate(&a, &b, &Rect::unit(), &grid, EdgeWeight::None).unwrap();
        assert!(c.l_minus_t.iter().zip(&c.t).all(|(v, t)| *v == -t));
        assert!(l_bivariate(&a, &[], &Rect::unit(), &grid, EdgeWeight::None).is_err());
    }

    #[test]
    fn envelope_ranks_rule() {
        assert_eq!(envelope_ranks(39), (1, 39));
        assert_eq!(envelope_ranks(99), (2, 98));
        assert_eq!(envelope_ranks(199), (5, 195));
    }

    #[test]
    fn envelope_is_min_max_at_39_and_reproducible() {
        let grid = Grid::new(0.2, 10).unwrap();
        let env = |exec| {
            l_envelope(
                &Rect::unit(),
                30,
                30,
                LStatistic::Univariate(0),
                &grid,
                EdgeWeight::None,
                39,
                11,
                exec,
            )
            .unwrap()
        };
        let e = env(Execution::Sequential);
        assert_eq!(e, env(Execution::Parallel));
        assert!(e.low.iter().zip(&e.high).all(|(l, h)| l <= h));
        // Recompute the simulated curves to check the min/max rule.
        let mut lo = vec![f64::INFINITY; 10];
        let mut hi = vec![f64::NEG_INFINITY; 10];
        for r in 0..39 {
            let mut rng = stream_rng(11, Stream::Envelope, r);
            let pts: Vec<Point> = (0..30)
                .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
                .collect();
            let c = l_univariate(&pts, &Rect::unit(), &grid, EdgeWeight::None).unwrap();
            for k in 0..10 {
                lo[k] = lo[k].min(c.l_minus_t[k]);
                hi[k] = hi[k].max(c.l_minus_t[k]);
            }
        }
        assert_eq!(e.low, lo);
        assert_eq!(e.high, hi);
        assert!(l_envelope(
            &Rect::unit(),
            30,
            30,
            LStatistic::Bivariate,
            &grid,
            EdgeWeight::None,
            38,
            1,
            Execution::Sequential
        )
        .is_err());
    }

    #[test]
    fn cluster_exceeds_envelope() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let normal = rand_distr::Normal::new(0.0, 0.02).unwrap();
        use rand_distr::Distribution;
        let pts: Vec<Point> = (0..50)
            .map(|_| Point::new(0.5 + normal.sample(&mut rng), 0.5 + normal.sample(&mut rng)))
            .collect();
        let grid = Grid::new(0.1, 10).unwrap();
        let mut c = l_univariate(&pts, &Rect::unit(), &grid, EdgeWeight::None).unwrap();
        c.envelope = Some(
            l_envelope(
                &Rect::unit(),
                50,
                0,
                LStatistic::Univariate(0),
                &grid,
                EdgeWeight::None,
                99,
                2,
                Execution::default(),
            )
            .unwrap(),
        );
        let env = c.envelope.as_ref().unwrap();
        assert!(c.l_minus_t[0] > env.high[0]);
        assert!(c.l_minus_t[2] > env.high[2]);
    }

    #[test]
    fn csr_stays_inside_on_average() {
        // A single pattern can leave a pointwise envelope over a stretch of
        // correlated grid points, so average the coverage over patterns.
        let grid = Grid::new(0.25, 25).unwrap();
        let env = l_envelope(
            &Rect::unit(),
            100,
            0,
            LStatistic::Univariate(0),
            &grid,
            EdgeWeight::None,
            99,
            3,
            Execution::default(),
        )
        .unwrap();
        let mut total = 0.0;
        for seed in 0..20 {
            let mut c = l_univariate(&uniform(100, 100 + seed), &Rect::unit(), &grid, EdgeWeight::None).unwrap();
            c.envelope = Some(env.clone());
            total += c.fraction_inside().unwrap();
        }
        assert!(total / 20.0 >= 0.9, "{}", total / 20.0);
    }
}
