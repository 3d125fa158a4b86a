use hi_core::synthetic::{BENCHMARK_AR3, BENCHMARK_VAR1};
use hi_core::{
    degrade, generate_ar, generate_var1, impute_baseline, impute_hi, score, ArModel, BaselineMethod, HiConfig, Mat,
    SmoothConfig, VarModel,
};

fn var_matrix() -> Mat<f64> {
    Mat::from_fn(7, 7, |i, j| BENCHMARK_VAR1[i][j])
}

fn frobenius(a: &Mat<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            s += a[(i, j)] * a[(i, j)];
        }
    }
    s.sqrt()
}

#[test]
fn var_benchmark_model_is_stable() {
    // Gelfand: ||A^k||^(1/k) -> spectral radius. Reference eigenvalue solve: 0.982171124101969.
    let a = var_matrix();
    let mut p = Mat::<f64>::identity(7, 7);
    let k = 4000;
    let mut log_norm = 0.0;
    for _ in 0..k {
        p = &a * &p;
        let n = frobenius(&p);
        log_norm += n.ln();
        p *= faer::Scale(1.0 / n);
    }
    let rho = (log_norm / k as f64).exp();
    assert!((rho - 0.982_171_124_101_969).abs() < 2e-3, "{rho}");
    assert!(rho < 1.0);
}

#[test]
fn var_sample_means_match_long_run_variance() {
    // Var(mean) ~ (I - A)^-1 (I - A)^-T / N for unit innovations.
    let a = var_matrix();
    let mut inv = Mat::<f64>::identity(7, 7);
    let mut term = Mat::<f64>::identity(7, 7);
    for _ in 0..3000 {
        term = &a * &term;
        inv += &term;
    }
    let lrv = &inv * inv.transpose();
    let n = 20_000;
    let s = generate_var1(&VarModel::benchmark_var1(), n, 11).unwrap();
    for v in 0..7 {
        let mean = s.column(v).iter().sum::<f64>() / n as f64;
        let se = (lrv[(v, v)] / n as f64).sqrt();
        assert!(mean.abs() < 4.0 * se, "variable {v}: mean {mean}, se {se}");
    }
}

#[test]
fn ar3_benchmark_model_is_mildly_explosive() {
    // Companion roots of z^3 - 0.1 z^2 + 0.3 z - 0.9 include a complex pair of
    // modulus 1.003974, so long paths grow geometrically.
    let [a1, a2, a3] = BENCHMARK_AR3;
    assert_eq!((a1, a2, a3), (0.1, -0.3, 0.9));
    let model = ArModel { burn_in: 0, ..ArModel::benchmark_ar3() };
    let x = generate_ar(&model, 6000, 3).unwrap();
    let peak = |r: std::ops::Range<usize>| x.column(0)[r].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(peak(5000..6000) > 1e3 * peak(0..1000));

    // Benchmark lengths stay in a usable range.
    let short = generate_ar(&ArModel::benchmark_ar3(), 300, 3).unwrap();
    assert!(short.column(0).iter().all(|v| v.is_finite() && v.abs() < 1e4));
}

#[test]
fn degrade_impute_score_round_trip() {
    let truth = generate_var1(&VarModel::benchmark_var1(), 120, 5).unwrap();
    let plan = degrade(truth.shape(), &[20.0, 40.0], 9).unwrap();
    for i in 0..2 {
        let gappy = plan.apply(&truth, i).unwrap();
        let mask = &plan.masks[i];
        let hi = impute_hi(&gappy, &HiConfig::default()).unwrap();
        let linear = impute_baseline(&gappy, BaselineMethod::Linear).unwrap();
        for out in [&hi.series, &linear] {
            assert!(out.is_complete());
            for v in 0..7 {
                for t in 0..120 {
                    if mask.is_observed(t, v) {
                        assert_eq!(out.value(t, v).to_bits(), truth.value(t, v).to_bits());
                    }
                }
            }
            let s = score(&truth, out, mask, SmoothConfig::new(7)).unwrap();
            assert!(s.trend_score.is_finite() && s.noise_score.is_finite());
            assert_eq!(s.n_missing, mask.missing_count());
        }
    }
}

#[test]
fn csv_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let truth = generate_ar(&ArModel::benchmark_ar3(), 50, 1).unwrap();
    let plan = degrade(truth.shape(), &[30.0], 2).unwrap();
    let gappy = plan.apply(&truth, 0).unwrap();
    let path = dir.path().join("gappy.csv");
    gappy.write_csv(&path).unwrap();
    let back = hi_core::TimeSeries::read_csv(&path).unwrap();
    assert_eq!(back, gappy);
    assert_eq!(back.mask(), &plan.masks[0]);
}
