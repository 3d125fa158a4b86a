//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//! Every tolerance, seed and size is pinned below.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hi_core::baselines::{impute_stine, stineman_slopes};
use hi_core::sweep::{self, Axis, BenchSpec, Dataset, Method};
use hi_core::{
    complete, degrade, dehankelize, generate_ar, hankelize, impute_baseline, impute_hi, score, ArModel,
    BaselineMethod, HiConfig, Lag, Mask, Mat, MaskedMatrix, SmoothConfig, SolverConfig, TimeSeries,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

// 1: solver oracle
const C1_SIZE: usize = 40;
const C1_RANK: usize = 3;
const C1_SEEDS: u64 = 10;
const C1_REL_TOL: f64 = 1e-2;
const C1_MIN_PASSING: usize = 9;
const C1_EPS_FACTOR: f64 = 1e-4;
const C1_MAX_ITERS: usize = 20_000;
const C1_TIME_LIMIT: Duration = Duration::from_secs(5);
// 2: Hankel round trip
const C2_CASES: usize = 100;
const C2_TOL: f64 = 1e-12;
const C2_TIME_LIMIT: Duration = Duration::from_secs(1);
// 3-5: AR(3) experiments
const AR_N: usize = 300;
const AR_DATA_SEED: u64 = 1;
const AR_MASK_SEED: u64 = 0;
const AR_RADIUS: usize = 3;
const TRIALS: usize = 10;
const C3_LEVELS: [f64; 4] = [10.0, 20.0, 30.0, 40.0];
const C3_FACTOR: f64 = 1.1;
const C45_LEVEL: f64 = 40.0;
const C4_EPS_SMALL: f64 = 0.01;
const C4_EPS_LARGE: f64 = 1.0;
const C5_FIXED_LAG: usize = 10;
// 6: blocking cost
const C6_N: usize = 208;
const C6_BLOCK: usize = 104;
const C6_LEVEL: f64 = 40.0;
const C6_BAND: (f64, f64) = (0.15, 0.60);
// 7: nesting
const C7_SEEDS: u64 = 200;
// 8: scoring oracle
const C8_CASES: usize = 100;
const C8_REL_TOL: f64 = 1e-12;
// 9: baselines
const C9_LINE_TOL: f64 = 1e-12;
const C9_PRESERVE_CASES: u64 = 50;
const C9_STINE_GAPS: usize = 1000;
// 10: determinism
const C10_SEED: &str = "7";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("solver oracle", c1_solver_oracle),
        ("hankel round trip", c2_hankel_round_trip),
        ("ar3 trend score vs baselines", c3_trend_vs_baselines),
        ("tolerance effect", c4_tolerance_effect),
        ("lag effect", c5_lag_effect),
        ("blocking cost", c6_blocking_cost),
        ("nested missingness", c7_nesting),
        ("scoring oracle", c8_scoring_oracle),
        ("baseline sanity", c9_baseline_sanity),
        ("bench determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{}]: {} ({}; {:.1} s)",
            i + 1,
            name,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn c1_solver_oracle() -> Outcome {
    let (n, r) = (C1_SIZE, C1_RANK);
    let mut passing = 0;
    let mut worst_time = Duration::ZERO;
    let mut errors = Vec::new();
    for seed in 0..C1_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Mat::from_fn(n, r, |_, _| normal(&mut rng));
        let v = Mat::from_fn(n, r, |_, _| normal(&mut rng));
        let m = &u * v.transpose();
        let observed = Mat::from_fn(n, n, |_, _| rng.random::<f64>() < 0.5);
        let observed_norm = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .filter(|&(i, j)| observed[(i, j)])
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        let problem = MaskedMatrix::new(m.clone(), &observed).unwrap();
        let config = SolverConfig { max_iters: C1_MAX_ITERS, ..SolverConfig::with_epsilon(C1_EPS_FACTOR * observed_norm) };
        let start = Instant::now();
        let result = complete(&problem, &config).unwrap();
        worst_time = worst_time.max(start.elapsed());
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..n {
            for i in 0..n {
                if !observed[(i, j)] {
                    num += (result.matrix[(i, j)] - m[(i, j)]).powi(2);
                    den += m[(i, j)].powi(2);
                }
            }
        }
        let rel = (num / den).sqrt();
        if rel <= C1_REL_TOL {
            passing += 1;
        }
        errors.push(format!("{rel:.1e}"));
    }
    outcome(
        passing >= C1_MIN_PASSING && worst_time < C1_TIME_LIMIT,
        format!(
            "{passing}/{C1_SEEDS} seeds with relative error <= {C1_REL_TOL:e} (need {C1_MIN_PASSING}), slowest solve {:.2} s (limit {} s), errors [{}]",
            worst_time.as_secs_f64(),
            C1_TIME_LIMIT.as_secs(),
            errors.join(", ")
        ),
    )
}

fn c2_hankel_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cases: Vec<(TimeSeries, usize)> = (0..C2_CASES)
        .map(|_| {
            let n = rng.random_range(1..=50);
            let d = rng.random_range(1..=3);
            let k = rng.random_range(1..=n);
            let cols = (0..d).map(|_| (0..n).map(|_| normal(&mut rng) * 10.0).collect()).collect();
            (TimeSeries::from_columns(cols).unwrap(), k)
        })
        .collect();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (series, k) in &cases {
        let h = hankelize(series, *k).unwrap();
        let back = dehankelize(h.matrix().values(), &h).unwrap();
        let (n, d) = series.shape();
        for v in 0..d {
            for t in 0..n {
                worst = worst.max((back.value(t, v) - series.value(t, v)).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= C2_TOL && elapsed < C2_TIME_LIMIT,
        format!("{C2_CASES} cases, max abs error {worst:e} (tol {C2_TOL:e}), {:.3} s (limit 1 s)", elapsed.as_secs_f64()),
    )
}

fn ar_spec(n: usize, levels: &[f64]) -> BenchSpec {
    let mut spec = BenchSpec::new(Dataset::generated("ar3", n, AR_DATA_SEED).unwrap());
    spec.levels = levels.to_vec();
    spec.trials = TRIALS;
    spec.base_seed = AR_MASK_SEED;
    spec.smooth = SmoothConfig::new(AR_RADIUS);
    spec.timing = false;
    spec
}

fn all_scored(result: &sweep::SweepResult) -> Result<(), String> {
    match result.rows.iter().find(|r| r.scores.is_none()) {
        Some(r) => Err(format!("trial failed: {} level {} trial {}: {}", r.method, r.level, r.trial, r.status)),
        None => Ok(()),
    }
}

fn c3_trend_vs_baselines() -> Outcome {
    let spec = ar_spec(AR_N, &C3_LEVELS);
    let result = sweep::run(&spec, Axis::Methods).unwrap();
    if let Err(e) = all_scored(&result) {
        return outcome(false, e);
    }
    let agg = result.aggregate();
    let mut pass = true;
    let mut parts = Vec::new();
    for level in C3_LEVELS {
        let at: Vec<_> = agg.iter().filter(|g| g.level == level).collect();
        let hi = at.iter().find(|g| g.method == Method::Hi).unwrap().trend_mean.unwrap();
        let (best_name, best) = at
            .iter()
            .filter(|g| g.method != Method::Hi)
            .map(|g| (g.method.name(), g.trend_mean.unwrap()))
            .fold(("", f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        pass &= hi <= C3_FACTOR * best;
        parts.push(format!("{level}%: hi {hi:.3} vs {best_name} {best:.3}"));
    }
    outcome(pass, format!("HI trend <= {C3_FACTOR} x best baseline; {}", parts.join(", ")))
}

fn hi_noise_mean(spec: &BenchSpec, axis: Axis) -> Vec<(Option<usize>, f64)> {
    let result = sweep::run(spec, axis).unwrap();
    all_scored(&result).unwrap();
    result.aggregate().iter().map(|g| (g.variant, g.noise_mean.unwrap())).collect()
}

fn c4_tolerance_effect() -> Outcome {
    let mut spec = ar_spec(AR_N, &[C45_LEVEL]);
    spec.methods = vec![Method::Hi];
    spec.hi.solver = SolverConfig::with_epsilon(C4_EPS_SMALL);
    let small = hi_noise_mean(&spec, Axis::Methods)[0].1;
    spec.hi.solver = SolverConfig::with_epsilon(C4_EPS_LARGE);
    let large = hi_noise_mean(&spec, Axis::Methods)[0].1;
    outcome(
        small < large,
        format!("mean noise score eps {C4_EPS_SMALL}: {small:.5}, eps {C4_EPS_LARGE}: {large:.5}"),
    )
}

fn c5_lag_effect() -> Outcome {
    let spec = ar_spec(AR_N, &[C45_LEVEL]);
    let rows = hi_noise_mean(&spec, Axis::Lags(vec![Lag::Auto, Lag::Fixed(C5_FIXED_LAG)]));
    let (auto_k, auto) = rows[0];
    let (_, fixed) = rows[1];
    outcome(
        auto <= fixed,
        format!("mean noise score lag {} (auto): {auto:.4}, lag {C5_FIXED_LAG}: {fixed:.4}", auto_k.unwrap()),
    )
}

fn c6_blocking_cost() -> Outcome {
    let mut spec = ar_spec(C6_N, &[C6_LEVEL]);
    spec.timing = true;
    let result = sweep::run(&spec, Axis::BlockSizes(vec![C6_N, C6_BLOCK])).unwrap();
    let agg = result.aggregate();
    let single = agg[0].wall_time_mean_s.unwrap();
    let blocked = agg[1].wall_time_mean_s.unwrap();
    let ratio = blocked / single;
    outcome(
        ratio >= C6_BAND.0 && ratio <= C6_BAND.1,
        format!(
            "block {C6_BLOCK} / single block mean time = {blocked:.4} s / {single:.4} s = {ratio:.3} (band {}..{})",
            C6_BAND.0, C6_BAND.1
        ),
    )
}

fn c7_nesting() -> Outcome {
    let levels: Vec<f64> = vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0];
    let shapes = [(300, 1), (300, 7), (208, 1), (37, 3), (1, 1)];
    let mut plans = 0;
    for &(n, d) in &shapes {
        for seed in 0..C7_SEEDS {
            let plan = degrade((n, d), &levels, seed).unwrap();
            for (i, level) in levels.iter().enumerate() {
                let expected = (level * (n * d) as f64 / 100.0 + 0.5).floor() as usize;
                if plan.masks[i].missing_count() != expected {
                    return outcome(false, format!("shape {n}x{d} seed {seed} level {level}: count mismatch"));
                }
                if i > 0 && !plan.masks[i - 1].missing_subset_of(&plan.masks[i]) {
                    return outcome(false, format!("shape {n}x{d} seed {seed} level {level}: not nested"));
                }
            }
            plans += 1;
        }
    }
    outcome(true, format!("{plans} plans x {} levels: counts exact, every level nested in the next", levels.len()))
}

/// Direct evaluation of the trend and noise score formulas.
fn brute_score(truth: &[Vec<f64>], imputed: &[Vec<f64>], missing: &[Vec<bool>], radius: usize) -> (f64, f64) {
    let smooth = |x: &[f64], t: usize| {
        let (mut sum, mut count) = (0.0, 0.0);
        for (s, xs) in x.iter().enumerate() {
            if s + radius >= t && s <= t + radius {
                sum += xs;
                count += 1.0;
            }
        }
        sum / count
    };
    let (mut t_total, mut e_total, mut vars) = (0.0, 0.0, 0.0);
    for v in 0..truth.len() {
        let idx: Vec<usize> = (0..truth[v].len()).filter(|&t| missing[v][t]).collect();
        if idx.is_empty() {
            continue;
        }
        let m = idx.len() as f64;
        let mut trend_sq = 0.0;
        let mut noise_x = 0.0;
        let mut noise_y = 0.0;
        for &t in &idx {
            let xt = smooth(&truth[v], t);
            let yt = smooth(&imputed[v], t);
            trend_sq += (xt - yt) * (xt - yt);
            noise_x += (truth[v][t] - xt) * (truth[v][t] - xt);
            noise_y += (imputed[v][t] - yt) * (imputed[v][t] - yt);
        }
        t_total += (trend_sq / m).sqrt();
        e_total += ((noise_x / m).sqrt() - (noise_y / m).sqrt()).abs();
        vars += 1.0;
    }
    (t_total / vars, e_total / vars)
}

fn c8_scoring_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut exact_zero = true;
    for _ in 0..C8_CASES {
        let n = rng.random_range(1..=10);
        let d = rng.random_range(1..=3);
        let radius = rng.random_range(0..=3);
        let truth: Vec<Vec<f64>> = (0..d).map(|_| (0..n).map(|_| normal(&mut rng)).collect()).collect();
        let mut missing: Vec<Vec<bool>> = (0..d).map(|_| (0..n).map(|_| rng.random::<f64>() < 0.4).collect()).collect();
        let (v0, t0) = (rng.random_range(0..d), rng.random_range(0..n));
        missing[v0][t0] = true;
        let imputed: Vec<Vec<f64>> = (0..d)
            .map(|v| (0..n).map(|t| if missing[v][t] { normal(&mut rng) * 2.0 } else { truth[v][t] }).collect())
            .collect();
        let mut mask = Mask::all_observed(n, d);
        for v in 0..d {
            for t in 0..n {
                if missing[v][t] {
                    mask.set(t, v, false);
                }
            }
        }
        let ts = |c: &Vec<Vec<f64>>| TimeSeries::from_columns(c.clone()).unwrap();
        let got = score(&ts(&truth), &ts(&imputed), &mask, SmoothConfig::new(radius)).unwrap();
        let (bt, be) = brute_score(&truth, &imputed, &missing, radius);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        worst = worst.max(rel(got.trend_score, bt)).max(rel(got.noise_score, be));
        let same = score(&ts(&truth), &ts(&truth), &mask, SmoothConfig::new(radius)).unwrap();
        exact_zero &= same.trend_score == 0.0 && same.noise_score == 0.0;
    }
    outcome(
        worst <= C8_REL_TOL && exact_zero,
        format!(
            "{C8_CASES} cases, max relative deviation {worst:e} (tol {C8_REL_TOL:e}, relative to max(|ref|, 1)), identity gives exact zeros: {exact_zero}"
        ),
    )
}

fn c9_baseline_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    // Straight lines, interior and boundary gaps.
    let mut line_err = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (normal(&mut rng) * 5.0, normal(&mut rng));
        let n = rng.random_range(3..60);
        let mut values: Vec<Option<f64>> = (0..n).map(|t| Some(a + b * t as f64)).collect();
        for t in 1..n - 1 {
            if rng.random::<f64>() < 0.4 {
                values[t] = None;
            }
        }
        let out = impute_baseline(&TimeSeries::univariate(values).unwrap(), BaselineMethod::Linear).unwrap();
        for t in 0..n {
            let exact = a + b * t as f64;
            line_err = line_err.max((out.value(t, 0) - exact).abs() / exact.abs().max(1.0));
        }
    }

    // Observed cells are returned bit for bit.
    let mut preserved = true;
    for seed in 0..C9_PRESERVE_CASES {
        let truth = generate_ar(&ArModel::benchmark_ar3(), 60, seed).unwrap();
        let plan = degrade(truth.shape(), &[30.0], seed).unwrap();
        let gappy = plan.apply(&truth, 0).unwrap();
        let mut outputs: Vec<TimeSeries> =
            BaselineMethod::ALL.iter().map(|m| impute_baseline(&gappy, *m).unwrap()).collect();
        outputs.push(impute_hi(&gappy, &HiConfig::default()).unwrap().series);
        for out in &outputs {
            for t in 0..60 {
                if gappy.is_observed(t, 0) {
                    preserved &= out.value(t, 0).to_bits() == truth.value(t, 0).to_bits();
                }
            }
        }
    }

    // Stineman on random monotone data: every interior gap whose bracketing
    // knot slopes agree in sign with the secant stays within the knot values.
    let (mut gaps, mut eligible, mut overshoots) = (0usize, 0usize, 0usize);
    let mut worst_overshoot = 0.0f64;
    while gaps < C9_STINE_GAPS {
        let n = 30;
        let mut level = 0.0;
        let mut values: Vec<Option<f64>> = Vec::with_capacity(n);
        for _ in 0..n {
            level += rng.random::<f64>();
            values.push(Some(level));
        }
        for v in values.iter_mut() {
            if rng.random::<f64>() < 0.3 {
                *v = None;
            }
        }
        let knots: Vec<usize> = (0..n).filter(|t| values[*t].is_some()).collect();
        if knots.len() < 2 {
            continue;
        }
        let slopes = stineman_slopes(&values).unwrap();
        let out = impute_stine(&values).unwrap();
        for (i, w) in knots.windows(2).enumerate() {
            let (l, r) = (w[0], w[1]);
            if r - l < 2 || gaps >= C9_STINE_GAPS {
                continue;
            }
            gaps += 1;
            let (y1, y2) = (values[l].unwrap(), values[r].unwrap());
            let s = y2 - y1;
            if !(slopes[i] * s > 0.0 && slopes[i + 1] * s > 0.0) {
                continue;
            }
            eligible += 1;
            let (lo, hi) = (y1.min(y2), y1.max(y2));
            let excess = (l + 1..r).map(|t| (lo - out[t]).max(out[t] - hi)).fold(0.0f64, f64::max);
            if excess > 0.0 {
                overshoots += 1;
                worst_overshoot = worst_overshoot.max(excess);
            }
        }
    }

    outcome(
        line_err <= C9_LINE_TOL && preserved && overshoots == 0,
        format!(
            "linear on lines max rel error {line_err:e} (tol {C9_LINE_TOL:e}); observed cells preserved by all methods: {preserved}; stineman {overshoots} overshoots in {eligible} same-sign gaps of {gaps} (worst {worst_overshoot:e})"
        ),
    )
}

fn run_bench(dir: &Path, timing: bool) -> (Vec<u8>, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hi"));
    cmd.args(["bench", "--dataset", "ar3", "--n", "120", "--levels", "10,40", "--trials", "3", "--seed", C10_SEED])
        .arg("--out-dir")
        .arg(dir);
    if !timing {
        cmd.arg("--no-timing");
    }
    let status = cmd.output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    (std::fs::read(dir.join("results.csv")).unwrap(), std::fs::read(dir.join("aggregate.csv")).unwrap())
}

fn without_timing(csv: &[u8]) -> Vec<String> {
    let text = String::from_utf8(csv.to_vec()).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let skip: Vec<usize> = header.iter().enumerate().filter(|(_, h)| h.starts_with("wall_time")).map(|(i, _)| i).collect();
    text.lines()
        .map(|l| l.split(',').enumerate().filter(|(i, _)| !skip.contains(i)).map(|(_, f)| f).collect::<Vec<_>>().join(","))
        .collect()
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<_> = ["a", "b"].iter().map(|d| run_bench(&tmp.path().join(d), false)).collect();
    let identical = runs[0] == runs[1];
    let timed: Vec<_> = ["c", "d"].iter().map(|d| run_bench(&tmp.path().join(d), true)).collect();
    let same_scores = without_timing(&timed[0].0) == without_timing(&timed[1].0)
        && without_timing(&timed[0].0) == without_timing(&runs[0].0);
    let rows = runs[0].0.iter().filter(|b| **b == b'\n').count() - 1;
    outcome(
        identical && same_scores && rows == 2 * 3 * 6,
        format!(
            "{rows} rows; --no-timing reruns byte-identical: {identical}; timed reruns identical apart from wall time: {same_scores}"
        ),
    )
}
