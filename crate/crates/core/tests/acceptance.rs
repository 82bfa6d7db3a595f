//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p segstat --test acceptance`. The process exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use segstat::dixon::{dixon_cell_test, dixon_moments_for, dixon_overall_test};
use segstat::nn::{apply_toroidal, build_nn_graph, compute_qr};
use segstat::null::{mc_randomization_test_on, run_study, NullKind, NullSpec, TestKind};
use segstat::pielou::{pielou_chisq, pielou_z_rowwise};
use segstat::{build_nnct, EdgeCorrection, Execution, Nnct, Point, PointSet, QrStats, Rect};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn uniform_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    (0..n).map(|_| Point::new(rng.random(), rng.random())).collect()
}

fn within(name: &str, v: f64, lo: f64, hi: f64) -> Result<String, String> {
    let s = format!("{name}={v:.4} in [{lo}, {hi}]");
    if (lo..=hi).contains(&v) {
        Ok(s)
    } else {
        Err(format!("{name}={v:.4} outside [{lo}, {hi}]"))
    }
}

fn gather(parts: Vec<Result<String, String>>) -> Outcome {
    let mut ok = Vec::new();
    let mut bad = Vec::new();
    for p in parts {
        match p {
            Ok(s) => ok.push(s),
            Err(s) => bad.push(s),
        }
    }
    if bad.is_empty() {
        Ok(ok.join("; "))
    } else if ok.is_empty() {
        Err(bad.join("; "))
    } else {
        Err(format!("{} | passed: {}", bad.join("; "), ok.join("; ")))
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<String, String> {
    if (got - want).abs() <= tol {
        Ok(format!("{name}={got:.2}"))
    } else {
        Err(format!("{name}={got:.4}, expected {want} +/- {tol}"))
    }
}

fn golden_statistics() -> Outcome {
    let swamp = Nnct::from_counts(vec![vec![149, 33], vec![43, 48]]).map_err(|e| e.to_string())?;
    let m = dixon_moments_for(&swamp, &QrStats::from_counts(178.0, 156.0)).map_err(|e| e.to_string())?;
    let stat = |r: segstat::Result<segstat::TestResult>| r.map(|r| r.statistic).unwrap_or(f64::NAN);
    let art = Nnct::from_counts(vec![vec![30, 20], vec![19, 31]]).map_err(|e| e.to_string())?;
    gather(vec![
        close("Z11", stat(dixon_cell_test(&swamp, &m, 0, 0)), 4.47, 0.01),
        close("Z22", stat(dixon_cell_test(&swamp, &m, 1, 1)), 3.54, 0.01),
        close("Zn", stat(pielou_z_rowwise(&swamp)), 5.90, 0.01),
        close("XP", stat(pielou_chisq(&swamp, false)), 34.84, 0.01),
        close("XPY", stat(pielou_chisq(&swamp, true)), 33.20, 0.01),
        close("XD", stat(dixon_overall_test(&swamp, &m)), 23.77, 0.01),
        close("art Zn", stat(pielou_z_rowwise(&art)), 2.20, 0.01),
        close("art XP", stat(pielou_chisq(&art, false)), 4.84, 0.01),
        close("art XPY", stat(pielou_chisq(&art, true)), 4.00, 0.01),
    ])
}

/// Every labeling of `n` points with `n1` class-0 points, as bitmasks.
fn labelings(n: usize, n1: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == n1)
        .map(|m| (0..n).map(|i| if m >> i & 1 == 1 { 0 } else { 1 }).collect())
        .collect()
}

fn exhaustive_rl_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_817);
    let mut worst = 0.0f64;
    // Several location sets so that different (Q, R) combinations occur.
    for _ in 0..5 {
        let coords = uniform_points(8, &mut rng);
        let ps = PointSet::new(coords, vec![0; 8], Rect::unit()).map_err(|e| e.to_string())?;
        let graph = build_nn_graph(&ps).map_err(|e| e.to_string())?;
        let qr = compute_qr(&graph);
        let all = labelings(8, 4);
        if all.len() != 70 {
            return Err(format!("{} labelings", all.len()));
        }
        let tables: Vec<Nnct> = all.iter().map(|l| build_nnct(&graph, l, 2).unwrap()).collect();
        let count = tables.len() as f64;
        let m = dixon_moments_for(&tables[0], &qr).map_err(|e| e.to_string())?;
        for i in 0..2 {
            for j in 0..2 {
                let vals: Vec<f64> = tables.iter().map(|t| t.get(i, j) as f64).collect();
                let mean = vals.iter().sum::<f64>() / count;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
                worst = worst
                    .max((mean - m.expected[i][j]).abs())
                    .max((var - m.var[i][j]).abs());
            }
        }
        let a: Vec<f64> = tables.iter().map(|t| t.get(0, 0) as f64).collect();
        let b: Vec<f64> = tables.iter().map(|t| t.get(1, 1) as f64).collect();
        let (ma, mb) = (a.iter().sum::<f64>() / count, b.iter().sum::<f64>() / count);
        let cov = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / count;
        worst = worst.max((cov - m.cov_diag.unwrap()).abs());
    }
    if worst <= 1e-9 {
        Ok(format!("5 location sets x 70 labelings, max abs error {worst:.1e}"))
    } else {
        Err(format!("max abs error {worst:.3e}"))
    }
}

fn qr_constants() -> Outcome {
    let n = 200;
    let reps = 1000u64;
    let sums: Vec<(f64, f64)> = segstat::exec::map_range(Execution::Parallel, reps, |r| {
        let mut rng = segstat::seed::stream_rng(7, segstat::seed::Stream::Replication, r);
        let ps = PointSet::new(uniform_points(n, &mut rng), vec![0; n], Rect::unit()).unwrap();
        let qr = compute_qr(&build_nn_graph(&ps).unwrap());
        (qr.q / n as f64, qr.r / n as f64)
    });
    let q = sums.iter().map(|s| s.0).sum::<f64>() / reps as f64;
    let r = sums.iter().map(|s| s.1).sum::<f64>() / reps as f64;
    gather(vec![
        within("mean Q/n", q, 0.623, 0.643),
        within("mean R/n", r, 0.611, 0.631),
    ])
}

const N_MC: usize = 2000;

fn size_of(spec: &NullSpec, tests: &[TestKind], seed: u64) -> Result<Vec<f64>, String> {
    let out = run_study(spec, tests, N_MC, 0.05, seed, Execution::Parallel).map_err(|e| e.to_string())?;
    Ok(tests.iter().map(|&t| out.size(t).unwrap().alpha_hat).collect())
}

fn desk_scale_sizes() -> Outcome {
    let tests = [TestKind::DixonOverall, TestKind::PielouOverall, TestKind::PielouYates];
    let big = size_of(&NullSpec::csr(100, 100), &tests, 101)?;
    let small = size_of(&NullSpec::csr(10, 50), &[TestKind::DixonCell(0, 0)], 102)?;
    gather(vec![
        within("CSR(100,100) dixon-overall", big[0], 0.035, 0.065),
        within("pielou-overall", big[1], 0.10000001, 1.0),
        within("pielou-yates", big[2], 0.08000001, 1.0),
        within("CSR(10,50) dixon-cell11", small[0], 0.0, 0.03999999),
    ])
}

fn independent_cells() -> Outcome {
    let spec = NullSpec::new(NullKind::RowwiseBinomial, 100, 100);
    let s = size_of(&spec, &[TestKind::PielouOverall, TestKind::PielouYates], 103)?;
    gather(vec![
        within("pielou-overall", s[0], 0.035, 0.070),
        within("pielou-yates", s[1], 0.0, 0.04999999),
    ])
}

fn agreement() -> Outcome {
    let spec = NullSpec::csr(10, 10);
    let (a, b) = (TestKind::PielouOverall, TestKind::DixonOverall);
    let mut parts = Vec::new();
    for seed in [104, 204, 304] {
        let out = run_study(&spec, &[a, b], N_MC, 0.05, seed, Execution::Parallel).map_err(|e| e.to_string())?;
        let agree = out.agreement(a, b).unwrap();
        let bound = out.size(a).unwrap().alpha_hat.min(out.size(b).unwrap().alpha_hat);
        if agree > bound {
            parts.push(Err(format!("seed {seed}: agreement {agree} > min size {bound}")));
        }
        if seed == 104 {
            parts.push(within("agreement", agree, 0.015, 0.045));
        }
    }
    gather(parts)
}

fn edge_corrections() -> Outcome {
    let torus = size_of(
        &NullSpec::csr(100, 100).with_edge(EdgeCorrection::Toroidal),
        &[TestKind::DixonOverall],
        105,
    )?;
    let outer = size_of(
        &NullSpec::csr(10, 10).with_edge(EdgeCorrection::OuterBuffer),
        &[TestKind::DixonOverall],
        106,
    )?;
    gather(vec![
        within("toroidal (100,100)", torus[0], 0.035, 0.065),
        within("outer buffer (10,10)", outer[0], 0.05000001, 1.0),
    ])
}

fn brute_nn(coords: &[Point], k: usize, torus: Option<&Rect>) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for (l, p) in coords.iter().enumerate() {
        if l == k {
            continue;
        }
        let d = match torus {
            None => coords[k].dist2(p),
            Some(r) => {
                // Explicit 3x3 replication of the pattern.
                let mut m = f64::INFINITY;
                for sx in [-1.0, 0.0, 1.0] {
                    for sy in [-1.0, 0.0, 1.0] {
                        let q = Point::new(p.x + sx * r.width(), p.y + sy * r.height());
                        m = m.min(coords[k].dist2(&q));
                    }
                }
                m
            }
        };
        if d < best.0 {
            best = (d, l);
        }
    }
    best.1
}

fn ks_uniform(mut p: Vec<f64>) -> f64 {
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

fn property_suites() -> Outcome {
    let mut parts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    // NN oracle.
    let mut mismatches = 0;
    for trial in 0..40 {
        let n = 2 + trial * 5;
        let coords = uniform_points(n, &mut rng);
        let ps = PointSet::new(coords.clone(), vec![0; n], Rect::unit()).unwrap();
        let plain = build_nn_graph(&ps).unwrap();
        let torus = apply_toroidal(&ps).unwrap();
        for k in 0..n {
            mismatches += (plain.nn(k) != Some(brute_nn(&coords, k, None))) as usize;
            mismatches += (torus.nn(k) != Some(brute_nn(&coords, k, Some(&Rect::unit())))) as usize;
        }
    }
    parts.push(if mismatches == 0 {
        Ok("NN oracle exact".to_string())
    } else {
        Err(format!("{mismatches} NN mismatches"))
    });

    // Identities on random tables.
    let mut worst_identity = 0.0f64;
    let mut yates_violations = 0;
    let mut swap_violations = 0;
    for _ in 0..2000 {
        let c: Vec<Vec<u64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.random_range(1..60)).collect())
            .collect();
        let t = Nnct::from_counts(c).unwrap();
        let z = pielou_z_rowwise(&t).unwrap().statistic;
        let x = pielou_chisq(&t, false).unwrap().statistic;
        worst_identity = worst_identity.max((z * z - x).abs() / x.max(1.0));
        yates_violations += (pielou_chisq(&t, true).unwrap().statistic > x + 1e-12) as usize;
        let zs = pielou_z_rowwise(&t.permuted(&[1, 0]).unwrap()).unwrap().statistic;
        swap_violations += ((z - zs).abs() > 1e-9 * z.abs().max(1.0)) as usize;
    }
    parts.push(
        if worst_identity < 1e-10 && yates_violations == 0 && swap_violations == 0 {
            Ok("Zn^2 = XP, Yates <= XP, swap symmetry".to_string())
        } else {
            Err(format!(
                "identity error {worst_identity:.1e}, {yates_violations} Yates and {swap_violations} swap violations"
            ))
        },
    );

    // Q/R invariants.
    let mut qr_bad = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..200);
        let ps = PointSet::new(uniform_points(n, &mut rng), vec![0; n], Rect::unit()).unwrap();
        let qr = compute_qr(&build_nn_graph(&ps).unwrap());
        let served: usize = qr.qk.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
        let ok = (qr.r as usize).is_multiple_of(2)
            && qr.r <= n as f64
            && served == n
            && qr.q_tilde == Some(qr.q)
            && qr.qk.len() <= 6;
        qr_bad += (!ok) as usize;
    }
    parts.push(if qr_bad == 0 {
        Ok("Q/R invariants".to_string())
    } else {
        Err(format!("{qr_bad} Q/R invariant violations"))
    });

    // Randomization-test uniformity.
    let outer = 500u64;
    let pvals: Vec<f64> = segstat::exec::map_range(Execution::Parallel, outer, |r| {
        let mut rng = segstat::seed::stream_rng(9, segstat::seed::Stream::Replication, r);
        let n = 200;
        let labels = segstat::null::random_labeling_with(n, 100, 100, &mut rng).unwrap();
        let ps = PointSet::new(uniform_points(n, &mut rng), labels, Rect::unit()).unwrap();
        let g = build_nn_graph(&ps).unwrap();
        mc_randomization_test_on(&ps, &g, TestKind::DixonOverall, 199, r, Execution::Sequential)
            .unwrap()
            .p_value
    });
    let d = ks_uniform(pvals);
    let crit = 1.628 / (outer as f64).sqrt();
    parts.push(if d <= crit {
        Ok(format!("KS D={d:.4} <= {crit:.4}"))
    } else {
        Err(format!("KS D={d:.4} > {crit:.4}"))
    });

    parts.push(appendix_variance());
    gather(parts)
}

/// Variance of `T_n = N11/n1 - N21/n2` under random labeling of one CSR
/// pattern with n = 500, against `(n + R)/n^2 + nu1/(n nu2)`.
fn appendix_variance() -> Result<String, String> {
    let (n, n1) = (500usize, 250usize);
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let ps = PointSet::new(uniform_points(n, &mut rng), vec![0; n], Rect::unit()).unwrap();
    let g = build_nn_graph(&ps).unwrap();
    let qr = compute_qr(&g);
    let reps = 20_000u64;
    let t: Vec<f64> = segstat::exec::map_range(Execution::Parallel, reps, |r| {
        let mut rng = segstat::seed::stream_rng(11, segstat::seed::Stream::Relabel, r);
        let labels = segstat::null::random_labeling_with(n, n1, n - n1, &mut rng).unwrap();
        let tab = build_nnct(&g, &labels, 2).unwrap();
        tab.get(0, 0) as f64 / n1 as f64 - tab.get(1, 0) as f64 / (n - n1) as f64
    });
    let m = reps as f64;
    let mean = t.iter().sum::<f64>() / m;
    let var = t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let m4 = t.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / m;
    let se = ((m4 - var * var) / m).sqrt();
    let (nf, nu1, nu2) = (n as f64, 0.5, 0.5);
    let formula = (nf + qr.r) / (nf * nf) + nu1 / (nf * nu2);
    let independence = nu1 * (2.0 - nu1) / nf;
    let z = (var - formula) / se;
    // With both class sizes fixed the label total cannot fluctuate, which
    // removes the nu1 / (n nu2) term; report the fit to (n + R) / n^2 too.
    let fixed_sizes = (nf + qr.r) / (nf * nf);
    let z_fixed = (var - fixed_sizes) / se;
    if z.abs() <= 3.0 && var > independence {
        Ok(format!(
            "Var_II {var:.5} vs {formula:.5} ({z:+.2} SE), > {independence:.5}"
        ))
    } else {
        Err(format!(
            "Var_II sim {var:.6} vs formula {formula:.6} ({z:+.2} SE); \
             (n+R)/n^2 = {fixed_sizes:.6} ({z_fixed:+.2} SE); independence {independence:.6}"
        ))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden statistics", golden_statistics),
        ("exhaustive random-labeling oracle", exhaustive_rl_oracle),
        ("Q/R constants", qr_constants),
        ("empirical sizes at desk scale", desk_scale_sizes),
        ("independent-cells regime", independent_cells),
        ("agreement bound and value", agreement),
        ("edge-correction deltas", edge_corrections),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
