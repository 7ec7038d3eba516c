//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use tempfile::TempDir;

use common::csv_bytes;
use scalinglab::config::ExperimentConfig;
use scalinglab::output::read_csv;
use scalinglab::{run_experiment, ExperimentKind};
use scalinglab_core::double_descent::{
    expected_error_closed_form, expected_error_monte_carlo, scan_curve, unified_error, PriorSpec, ScaleCoupling,
    ScanAxis, ScanSettings, SpectrumSource, StudentTeacherInstance, XMode,
};
use scalinglab_core::predictor::{predict_across_scale, MeasuredCurve};
use scalinglab_core::rng::{derive_seed, gaussian_matrix, stream};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// One CSV as a list of rows keyed by column name.
struct Table {
    rows: Vec<BTreeMap<String, String>>,
}

impl Table {
    fn read(dir: &Path, name: &str) -> Self {
        let (header, rows) = read_csv(&dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        let rows = rows.into_iter().map(|r| header.iter().cloned().zip(r).collect()).collect();
        Self { rows }
    }
}

fn num(row: &BTreeMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap_or_else(|_| panic!("column {key}: {:?}", row[key]))
}

/// Empty cells mean the threshold was never reached.
fn num_or_inf(row: &BTreeMap<String, String>, key: &str) -> f64 {
    if row[key].is_empty() {
        f64::INFINITY
    } else {
        num(row, key)
    }
}

/// Runs `kind` with its default parameters (and the given seeds, if any).
fn run_default(kind: ExperimentKind, seeds: Option<&[u64]>) -> (ExperimentConfig, TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ExperimentConfig::defaults(kind);
    if let Some(s) = seeds {
        config.seeds = s.to_vec();
    }
    config.output_dir = dir.path().to_path_buf();
    run_experiment(&config).unwrap_or_else(|e| panic!("{kind}: {e}"));
    (config, dir)
}

fn deviation_bound(dir: &Path) -> Outcome {
    let limit = 0.1 + 3.0 * (0.09f64 / 200.0).sqrt();
    let t = Table::read(dir, "bound.csv");
    let ps: Vec<f64> = t.rows.iter().map(|r| num(r, "p")).collect();
    let worst = t.rows.iter().map(|r| num(r, "violation_rate")).fold(0.0, f64::max);
    let all_trials = t.rows.iter().all(|r| num(r, "trials") == 200.0);
    Outcome::new(
        ps == [10.0, 20.0, 40.0] && all_trials && worst <= limit,
        format!("p {ps:?}, worst violation rate {worst:.4} (limit {limit:.4})"),
    )
}

fn noise_identity(dir: &Path) -> Outcome {
    let t = Table::read(dir, "noise_identity.csv");
    let worst = t.rows.iter().map(|r| num(r, "relative_error")).fold(0.0, f64::max);
    let mut ps: Vec<u64> = t.rows.iter().map(|r| num(r, "p") as u64).collect();
    ps.sort_unstable();
    ps.dedup();
    let ks = t.rows.iter().map(|r| num(r, "k_index") as u64).max().map_or(0, |k| k + 1);
    let small_r = t.rows.iter().all(|r| num(r, "r") <= 5.0);
    Outcome::new(
        t.rows.len() == 15 && ks == 5 && ps == [2, 8, 32] && small_r && worst < 0.05,
        format!("{} cases, worst relative error {worst:.4} (limit 0.05)", t.rows.len()),
    )
}

fn linear_tradeoff(dir: &Path) -> Outcome {
    let t = Table::read(dir, "slopes.csv");
    let slopes: Vec<f64> = t.rows.iter().map(|r| if r["slope"].is_empty() { f64::NAN } else { num(r, "slope") }).collect();
    let pass = slopes.len() == 3 && slopes.iter().all(|s| (-1.15..=-0.85).contains(s));
    Outcome::new(pass, format!("slopes {slopes:.3?} (band [-1.15, -0.85])"))
}

/// Explicit Euler on `θ̇ = −η Xᵀ(Xθ − Y)` from zero with a step far below
/// the fastest mode's time constant.
fn euler_vs_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let n = 2 + (derive_seed(77, 2 * i) % 19) as usize;
        let m = 2 + (derive_seed(77, 2 * i + 1) % 19) as usize;
        let inst = StudentTeacherInstance::sample(n, m, &PriorSpec::isotropic(1.0, 0.5), 1.0, 500 + i).unwrap();
        let s_max = inst.sigma_ext().max();
        let tau = 1.0 / (inst.learning_rate * s_max * s_max);
        let dt = 1e-3 * tau;
        let mut theta = DVector::zeros(m);
        let mut now = 0.0;
        for mult in [0.5, 2.0, 10.0, 50.0, 200.0] {
            let t = mult * tau;
            let steps = ((t - now) / dt).round() as usize;
            for _ in 0..steps {
                theta -= inst.loss_gradient(&theta) * (inst.learning_rate * dt);
            }
            now += steps as f64 * dt;
            let exact = inst.theta_at(now).unwrap();
            worst = worst.max((&theta - &exact).norm() / exact.norm());
        }
    }
    Outcome::new(worst < 1e-3, format!("20 instances x 5 times, worst relative error {worst:.2e} (limit 1e-3)"))
}

fn monte_carlo_agreement() -> Outcome {
    let prior = PriorSpec::isotropic(1.0, 0.5);
    let lr = 0.1;
    let times = [0.1, 1.0, 10.0, 100.0, 1000.0];
    let mut worst: f64 = 0.0;
    for (n, m) in [(10, 5), (5, 10), (8, 8)] {
        let seed = 900 + (n * 100 + m) as u64;
        let inst = StudentTeacherInstance::sample(n, m, &prior, lr, seed).unwrap();
        let xv = inst.xv_sq(&XMode::IsotropicAverage).unwrap();
        let mc = expected_error_monte_carlo(n, m, &prior, lr, &times, 10_000, seed).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let exact = expected_error_closed_form(&inst.sigma_ext(), &xv, &prior, lr, t).unwrap().total;
            worst = worst.max((mc.estimate[k] - exact).abs() / mc.standard_error[k]);
        }
    }
    Outcome::new(worst <= 3.0, format!("3 shapes x 5 times at 1e4 draws, worst |z| {worst:.2} (limit 3)"))
}

fn properties_and_peak() -> Outcome {
    let mut problems = Vec::new();
    let prior = PriorSpec::isotropic(1.0, 0.5);
    let t_grid: Vec<f64> = (0..200).map(|j| 1e-3 * 10f64.powf(j as f64 * 7.0 / 199.0)).collect();
    for seed in 1..=30u64 {
        let (n, m) = (2 + (seed as usize * 7) % 30, 2 + (seed as usize * 11) % 30);
        let settings = ScanSettings {
            n,
            m,
            prior: prior.clone(),
            spectrum: SpectrumSource::Sampled { seeds: vec![seed] },
            ..Default::default()
        };
        let c = scan_curve(ScanAxis::Time, &t_grid, &settings).unwrap();
        if c.signal_sq.windows(2).any(|w| w[1] > w[0]) {
            problems.push(format!("signal rises (seed {seed})"));
        }
        if c.noise_sq.windows(2).any(|w| w[1] < w[0]) {
            problems.push(format!("noise falls (seed {seed})"));
        }
        let inst = StudentTeacherInstance::sample(n, m, &prior, 1.0, seed).unwrap();
        let (sigma, xv) = (inst.sigma_ext(), inst.xv_sq(&XMode::IsotropicAverage).unwrap());
        for &t in t_grid.iter().step_by(10) {
            for p in [0.5, 2.0, 3.0, 17.0] {
                let a = unified_error(&sigma, &xv, &prior, 1.0, p, t).unwrap();
                let b = unified_error(&sigma, &xv, &prior, 1.0, 1.0, p * t).unwrap();
                if a != b {
                    problems.push(format!("unified error depends on more than p·t (seed {seed}, p {p}, t {t})"));
                }
            }
        }
    }

    // Scale axis: only designs whose square block really is near singular
    // qualify.
    let n = 40;
    let grid: Vec<f64> = (10..=120).map(f64::from).collect();
    let (mut qualifying, mut peaked) = (0, 0);
    for seed in 1..=30u64 {
        let full = gaussian_matrix(&mut stream(seed), n, 120);
        let s_min = full.columns(0, n).into_owned().singular_values().min();
        if s_min > 0.05 {
            continue;
        }
        qualifying += 1;
        let settings = ScanSettings {
            n,
            m: n,
            prior: prior.clone(),
            t: 1e4,
            spectrum: SpectrumSource::Sampled { seeds: vec![seed] },
            scale_coupling: ScaleCoupling::TimeAndDimension,
            ..Default::default()
        };
        let c = scan_curve(ScanAxis::Scale, &grid, &settings).unwrap();
        let near = c.interior_local_maxima().iter().any(|&i| (grid[i] - n as f64).abs() <= 0.2 * n as f64);
        if near {
            peaked += 1;
        } else {
            problems.push(format!("no interior maximum near m = n (seed {seed})"));
        }
    }
    if qualifying == 0 {
        problems.push("no design with smallest singular value ≤ 0.05".into());
    }
    let detail = format!(
        "30 time curves, {} unified-error pairs, peak near m = n in {peaked}/{qualifying} near-singular designs{}",
        30 * 20 * 4,
        if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
    );
    Outcome::new(problems.is_empty(), detail)
}

fn predictor_exactness(dir: &Path) -> Outcome {
    let t = Table::read(dir, "predict_summary.csv");
    let worst = t.rows.iter().map(|r| num(r, "max_abs_error")).fold(0.0, f64::max);
    let modes = t.rows.iter().filter(|r| r["mode"] == "cross_scale").count() * t.rows.iter().filter(|r| r["mode"] == "cross_time").count();

    // Identity remap on a 512-point analytic curve.
    let prior = PriorSpec::isotropic(1.0, 0.5);
    let inst = StudentTeacherInstance::sample(20, 30, &prior, 0.01, 3).unwrap();
    let (sigma, xv) = (inst.sigma_ext(), inst.xv_sq(&XMode::IsotropicAverage).unwrap());
    let times: Vec<f64> = (0..512).map(|j| 0.01 * 2f64.powf(j as f64 / 32.0)).collect();
    let errs: Vec<f64> = times.iter().map(|&t| unified_error(&sigma, &xv, &prior, 0.01, 2.0, t).unwrap().total).collect();
    let curve = MeasuredCurve::new(2.0, times.clone(), errs.clone(), errs.clone()).unwrap();
    let targets: Vec<(f64, f64)> = times.iter().map(|&t| (2.0, t)).collect();
    let preds = predict_across_scale(&curve, &targets, false).unwrap();
    let identity = preds.iter().zip(&errs).all(|(p, &e)| p.test == e && p.train == e);

    Outcome::new(
        modes > 0 && worst < 1e-6 && identity,
        format!("max abs error {worst:.2e} over {} summaries (limit 1e-6), identity remap exact: {identity}", t.rows.len()),
    )
}

fn seeds_in(t: &Table) -> Vec<u64> {
    let mut s: Vec<u64> = t.rows.iter().map(|r| num(r, "seed") as u64).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn nn_tradeoff(dir: &Path) -> Outcome {
    let t = Table::read(dir, "min_epochs.csv");
    let seeds = seeds_in(&t);
    let mut passing = 0;
    let mut per_seed = Vec::new();
    for &seed in &seeds {
        let mut pts: Vec<(f64, f64)> = t
            .rows
            .iter()
            .filter(|r| num(r, "seed") as u64 == seed)
            .map(|r| (num(r, "effective_scale"), num_or_inf(r, "min_epochs")))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let decreasing = pts.len() == 3 && pts.windows(2).all(|w| w[1].1 < w[0].1);
        passing += usize::from(decreasing);
        per_seed.push(format!("{seed}:{:?}", pts.iter().map(|p| p.1).collect::<Vec<_>>()));
    }
    Outcome::new(
        seeds.len() == 5 && passing >= 4,
        format!("strictly decreasing in {passing}/{} seeds [{}]", seeds.len(), per_seed.join(" ")),
    )
}

fn nn_data(dir: &Path) -> Outcome {
    let t = Table::read(dir, "data_required.csv");
    let seeds = seeds_in(&t);
    let mut passing = 0;
    let mut per_seed = Vec::new();
    for &seed in &seeds {
        let need = |w: f64| {
            t.rows
                .iter()
                .find(|r| num(r, "seed") as u64 == seed && num(r, "width_scale") == w)
                .map_or(f64::NAN, |r| num_or_inf(r, "required_n"))
        };
        let (small, large) = (need(1.0), need(5.0));
        // Neither width reaching the threshold is no evidence either way.
        if large.is_finite() && large <= small {
            passing += 1;
        }
        per_seed.push(format!("{seed}:{small}/{large}"));
    }
    Outcome::new(
        seeds.len() == 5 && passing >= 4,
        format!("s=5 needs no more data than s=1 in {passing}/{} seeds [{}]", seeds.len(), per_seed.join(" ")),
    )
}

fn nn_noise(dir: &Path) -> Outcome {
    let t = Table::read(dir, "noise_summary.csv");
    let mean = |noise: f64, w: f64| {
        t.rows
            .iter()
            .find(|r| num(r, "noise") == noise && num(r, "width_scale") == w)
            .map_or(f64::NAN, |r| num(r, "mean"))
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for w in [1.0, 2.0, 5.0] {
        let (clean, noisy) = (mean(0.0, w), mean(0.2, w));
        pass &= noisy > clean;
        parts.push(format!("s={w}: {clean:.4} -> {noisy:.4}"));
    }
    Outcome::new(pass, format!("final test MSE clean -> noisy: {}", parts.join(", ")))
}

fn main() {
    let mut lines: Vec<(u32, &str, Outcome, Duration)> = Vec::new();
    let mut runs: Vec<(ExperimentConfig, TempDir)> = Vec::new();

    let mut timed = |id: u32, name: &'static str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let mut o = f();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > limit {
                o.pass = false;
                o.detail.push_str(&format!("; took {took:.1?}, limit {limit:?}"));
            }
        }
        lines.push((id, name, o, took));
    };

    let secs = Duration::from_secs;
    let start = Instant::now();
    let (cfg, dir) = run_default(ExperimentKind::SubspaceVerify, Some(&[101]));
    let subspace_time = start.elapsed();
    timed(1, "subspace deviation bound", None, &mut || {
        let mut o = deviation_bound(dir.path());
        // One run covers this criterion and the next: 2 min + 1 min.
        o.pass &= subspace_time <= secs(180);
        o.detail.push_str(&format!("; bound and noise runs together took {subspace_time:.1?} (limit 180s)"));
        o
    });
    timed(2, "noise-matrix Frobenius identity", None, &mut || noise_identity(dir.path()));
    runs.push((cfg, dir));

    timed(3, "linear scale-time tradeoff slope", Some(secs(300)), &mut || {
        let (cfg, dir) = run_default(ExperimentKind::LinearTradeoff, None);
        let o = linear_tradeoff(dir.path());
        runs.push((cfg, dir));
        o
    });
    timed(4, "closed-form flow vs Euler", Some(secs(30)), &mut euler_vs_closed_form);
    timed(5, "closed-form error vs Monte Carlo", Some(secs(60)), &mut monte_carlo_agreement);
    timed(6, "error curve properties", None, &mut || {
        let (cfg, dir) = run_default(ExperimentKind::DdCurve, None);
        runs.push((cfg, dir));
        properties_and_peak()
    });
    timed(7, "predictor exactness", None, &mut || {
        let (cfg, dir) = run_default(ExperimentKind::Predict, None);
        let o = predictor_exactness(dir.path());
        runs.push((cfg, dir));
        o
    });
    timed(8, "network tradeoff ordering", Some(secs(900)), &mut || {
        let (cfg, dir) = run_default(ExperimentKind::NnTradeoff, None);
        let o = nn_tradeoff(dir.path());
        runs.push((cfg, dir));
        o
    });
    timed(9, "larger networks need less data", Some(secs(900)), &mut || {
        let (cfg, dir) = run_default(ExperimentKind::NnDataScan, None);
        let o = nn_data(dir.path());
        runs.push((cfg, dir));
        o
    });
    timed(10, "label noise degrades every width", Some(secs(900)), &mut || {
        let (cfg, dir) = run_default(ExperimentKind::NnNoiseScan, None);
        let o = nn_noise(dir.path());
        runs.push((cfg, dir));
        o
    });
    timed(11, "byte-identical reruns", None, &mut || {
        let mut differing = Vec::new();
        for (cfg, dir) in &runs {
            let again = tempfile::tempdir().unwrap();
            let mut c = cfg.clone();
            c.output_dir = again.path().to_path_buf();
            run_experiment(&c).unwrap();
            let (a, b) = (csv_bytes(dir.path()), csv_bytes(again.path()));
            if a.is_empty() || a != b {
                differing.push(cfg.experiment.kind().name());
            }
        }
        Outcome::new(
            runs.len() == ExperimentKind::ALL.len() && differing.is_empty(),
            format!("{} experiments rerun, differing: {differing:?}", runs.len()),
        )
    });

    let mut failed = 0;
    for (id, name, o, took) in &lines {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("{tag} [{id:>2}] {name}: {} ({took:.1?})", o.detail);
    }
    println!("acceptance: {}/{} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
