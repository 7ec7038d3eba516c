use rayon::prelude::*;

use scalinglab_core::predictor::{
    effective_params, first_crossing, loglog_slope, mean_and_std_err, tradeoff_from_runs, Channel, MeasuredCurve,
};
use scalinglab_core::rng::derive_seed;
use scalinglab_nn::{
    build_mlp, corrupt_labels_with, generate_synthetic, load_idx, subsample, train_sgd, Dataset, LabelNoise, TrainConfig,
    TrainingTrace,
};

use super::Outputs;
use crate::config::{DataParams, NnDataScanParams, NnNoiseScanParams, NnTradeoffParams};
use crate::error::{invalid, Result};
use crate::output::{aggregate_seeds, tradeoff_table, AggregateSeries, Cell, CsvTable, SeedSeries};
use crate::plot::AxesSpec;

/// Stream tag for label corruption, kept apart from the data stream.
const LABEL_NOISE_TAG: u64 = 1;

/// Train and test sets for one seed. Synthetic data is drawn with `seed`;
/// IDX data is subsampled to `n_train`/`n_test` when larger.
pub fn load_data(d: &DataParams, seed: u64) -> Result<(Dataset, Dataset)> {
    let files = [&d.train_images, &d.train_labels, &d.test_images, &d.test_labels];
    let set = files.iter().filter(|f| f.is_some()).count();
    if set == 0 {
        let all = generate_synthetic(d.classes, d.dim, d.n_train + d.n_test, d.cluster_spread, seed)?;
        return Ok(all.split_at(d.n_train));
    }
    if set != 4 {
        return Err(invalid("data.train_images", "set all four IDX paths or none"));
    }
    let train = load_idx(d.train_images.as_ref().unwrap(), d.train_labels.as_ref().unwrap())?;
    let test = load_idx(d.test_images.as_ref().unwrap(), d.test_labels.as_ref().unwrap())?;
    let shrink = |ds: Dataset, n: usize, tag: u64| -> Result<Dataset> {
        if ds.len() > n {
            Ok(subsample(&ds, n, derive_seed(seed, tag))?)
        } else {
            Ok(ds)
        }
    };
    Ok((shrink(train, d.n_train, 2)?, shrink(test, d.n_test, 3)?))
}

/// Builds the width-`s` network for this data and trains it; returns the
/// parameter count with the trace.
pub fn train_width(train: &Dataset, test: &Dataset, width_scale: usize, cfg: &TrainConfig) -> Result<(u64, TrainingTrace)> {
    let mut model = build_mlp(train.dim, width_scale, train.classes, cfg.seed)?;
    let trace = train_sgd(&mut model, train, test, cfg)?;
    Ok((model.param_count(), trace))
}

fn check_widths(key: &str, widths: &[usize]) -> Result<()> {
    if widths.is_empty() || widths.contains(&0) {
        return Err(invalid(key, "need at least one positive width scale"));
    }
    Ok(())
}

fn epochs_f64(trace: &TrainingTrace) -> Vec<f64> {
    trace.epochs_logged.iter().map(|&e| e as f64).collect()
}

struct Run {
    seed: u64,
    width: usize,
    params: u64,
    trace: TrainingTrace,
}

fn curves_table(runs: &[&Run]) -> Result<CsvTable> {
    let grid = epochs_f64(&runs[0].trace);
    let series = |f: fn(&TrainingTrace) -> &Vec<f64>| -> Result<AggregateSeries> {
        let per: Vec<SeedSeries> =
            runs.iter().map(|r| SeedSeries { seed: r.seed, x: epochs_f64(&r.trace), y: f(&r.trace).clone() }).collect();
        aggregate_seeds(&per, &grid, "mse")
    };
    let (train, test) = (series(|t| &t.train_mse)?, series(|t| &t.test_mse)?);
    let mut t = CsvTable::new(&["epoch", "train_mean", "train_std_err", "test_mean", "test_std_err"]);
    for (i, &x) in grid.iter().enumerate() {
        t.push(vec![x.into(), train.mean[i].into(), train.std_err[i].into(), test.mean[i].into(), test.std_err[i].into()]);
    }
    Ok(t)
}

fn runs_table(runs: &[Run]) -> CsvTable {
    let mut t = CsvTable::new(&["seed", "width_scale", "param_count", "initial_digest", "final_digest", "final_test_mse"]);
    for r in runs {
        t.push(vec![
            r.seed.into(),
            r.width.into(),
            r.params.into(),
            r.trace.initial_model_digest.as_str().into(),
            r.trace.final_model_digest.as_str().into(),
            (*r.trace.test_mse.last().unwrap()).into(),
        ]);
    }
    t
}

fn record_training(out: &mut Outputs, runs: &[Run]) {
    let Some(first) = runs.first() else { return };
    let mut meta = toml::Table::new();
    meta.insert("init_scheme".into(), first.trace.init_scheme.clone().into());
    meta.insert("depth".into(), ((first.trace.layer_widths.len() - 1) as i64).into());
    out.metadata.insert("training".into(), meta.into());
}

pub fn nn_tradeoff(p: &NnTradeoffParams, seeds: &[u64], out: &mut Outputs) -> Result<()> {
    check_widths("nn_tradeoff.width_scales", &p.width_scales)?;
    if p.width_scales.len() < 2 {
        return Err(invalid("nn_tradeoff.width_scales", "need at least two widths"));
    }
    let jobs: Vec<(u64, usize)> = seeds.iter().flat_map(|&s| p.width_scales.iter().map(move |&w| (s, w))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(seed, width)| {
            let (mut train, test) = load_data(&p.data, seed)?;
            if p.label_noise > 0.0 {
                train = corrupt_labels_with(&train, p.label_noise, derive_seed(seed, LABEL_NOISE_TAG), LabelNoise::Uniform)?;
            }
            let cfg = TrainConfig { epochs: p.epochs, batch_size: p.batch_size, learning_rate: p.learning_rate, seed, eval_every: 1 };
            let (params, trace) = train_width(&train, &test, width, &cfg)?;
            log::info!("nn-tradeoff seed {seed} width {width}: final test mse {}", trace.test_mse.last().unwrap());
            Ok(Run { seed, width, params, trace })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut min_epochs = CsvTable::new(&["seed", "width_scale", "effective_scale", "param_count", "min_epochs"]);
    let mut measured = Vec::new();
    for r in &runs {
        let scale = effective_params(r.params)?;
        let t = epochs_f64(&r.trace);
        let hit = first_crossing(&t, &r.trace.test_mse, p.threshold);
        min_epochs.push(vec![r.seed.into(), r.width.into(), scale.into(), r.params.into(), Cell::opt(hit.value())]);
        measured.push(MeasuredCurve::new(scale, t, r.trace.train_mse.clone(), r.trace.test_mse.clone())?);
    }
    out.csv("min_epochs.csv", &min_epochs)?;

    let curve = tradeoff_from_runs(&measured, p.threshold, Channel::Test)?;
    out.csv("tradeoff.csv", &tradeoff_table(&curve))?;
    let mut slope = CsvTable::new(&["threshold", "slope", "intercept", "r_squared", "n_points"]);
    match loglog_slope(&curve) {
        Ok(f) => slope.push(vec![p.threshold.into(), f.slope.into(), f.intercept.into(), f.r_squared.into(), f.n_points.into()]),
        Err(_) => slope.push(vec![p.threshold.into(), Cell::Empty, Cell::Empty, Cell::Empty, curve.reached_points().len().into()]),
    }
    out.csv("tradeoff_slope.csv", &slope)?;

    for &w in &p.width_scales {
        let group: Vec<&Run> = runs.iter().filter(|r| r.width == w).collect();
        out.csv(&format!("curves_s{w}.csv"), &curves_table(&group)?)?;
    }
    out.csv("runs.csv", &runs_table(&runs))?;
    record_training(out, &runs);

    let pts: Vec<(f64, f64, f64)> = curve
        .scales
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| curve.min_times[i].value().filter(|&v| v > 0.0).map(|v| (s, v, curve.std_err[i].unwrap_or(0.0))))
        .collect();
    if !pts.is_empty() {
        let series = AggregateSeries {
            x: pts.iter().map(|x| x.0).collect(),
            mean: pts.iter().map(|x| x.1).collect(),
            std_err: pts.iter().map(|x| x.2).collect(),
            label: format!("test mse ≤ {}", p.threshold),
        };
        out.plot(
            "tradeoff.svg",
            &[series],
            &AxesSpec {
                log_x: true,
                log_y: true,
                x_label: "effective scale (params^(1/3))".into(),
                y_label: "epochs to threshold".into(),
                title: "Width-time tradeoff".into(),
                guide_line: true,
            },
        )?;
    }
    Ok(())
}

pub fn nn_data_scan(p: &NnDataScanParams, seeds: &[u64], out: &mut Outputs) -> Result<()> {
    check_widths("nn_data_scan.width_scales", &p.width_scales)?;
    let mut volumes = p.data_volumes.clone();
    volumes.sort_unstable();
    volumes.dedup();
    if volumes.is_empty() || volumes[0] == 0 || *volumes.last().unwrap() > p.data.n_train {
        return Err(invalid("nn_data_scan.data_volumes", "volumes must lie in 1..=data.n_train"));
    }
    let mut jobs: Vec<(u64, usize, usize)> = Vec::new();
    for &s in seeds {
        for &w in &p.width_scales {
            jobs.extend(volumes.iter().map(|&n| (s, w, n)));
        }
    }
    let finals = jobs
        .par_iter()
        .map(|&(seed, width, n)| {
            let (pool, test) = load_data(&p.data, seed)?;
            let train = subsample(&pool, n, seed)?;
            let cfg =
                TrainConfig { epochs: p.epochs, batch_size: p.batch_size, learning_rate: p.learning_rate, seed, eval_every: p.epochs.max(1) };
            let (_, trace) = train_width(&train, &test, width, &cfg)?;
            Ok(*trace.test_mse.last().unwrap())
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut scan = CsvTable::new(&["seed", "width_scale", "n_train", "final_test_mse"]);
    for (&(seed, w, n), &f) in jobs.iter().zip(&finals) {
        scan.push(vec![seed.into(), w.into(), n.into(), f.into()]);
    }
    out.csv("data_scan.csv", &scan)?;

    // Smallest volume whose final test error is strictly below threshold.
    let mut required = CsvTable::new(&["seed", "width_scale", "required_n"]);
    for &seed in seeds {
        for &w in &p.width_scales {
            let need = jobs
                .iter()
                .zip(&finals)
                .filter(|((s, ww, _), &f)| *s == seed && *ww == w && f < p.threshold)
                .map(|((_, _, n), _)| *n)
                .min();
            required.push(vec![seed.into(), w.into(), need.map_or(Cell::Empty, Cell::from)]);
        }
    }
    out.csv("data_required.csv", &required)?;

    let grid: Vec<f64> = volumes.iter().map(|&n| n as f64).collect();
    let mut plotted = Vec::new();
    for &w in &p.width_scales {
        let per: Vec<SeedSeries> = seeds
            .iter()
            .map(|&seed| SeedSeries {
                seed,
                x: grid.clone(),
                y: jobs.iter().zip(&finals).filter(|((s, ww, _), _)| *s == seed && *ww == w).map(|(_, &f)| f).collect(),
            })
            .collect();
        let agg = aggregate_seeds(&per, &grid, &format!("s = {w}"))?;
        let mut t = CsvTable::new(&["n_train", "mean", "std_err"]);
        for (i, &x) in grid.iter().enumerate() {
            t.push(vec![x.into(), agg.mean[i].into(), agg.std_err[i].into()]);
        }
        out.csv(&format!("data_curve_s{w}.csv"), &t)?;
        plotted.push(agg);
    }
    out.plot(
        "data_scan.svg",
        &plotted,
        &AxesSpec {
            log_x: true,
            log_y: false,
            x_label: "training examples".into(),
            y_label: "final test mse".into(),
            title: "Data scan".into(),
            guide_line: false,
        },
    )
}

pub fn nn_noise_scan(p: &NnNoiseScanParams, seeds: &[u64], out: &mut Outputs) -> Result<()> {
    check_widths("nn_noise_scan.width_scales", &p.width_scales)?;
    if p.noise_levels.is_empty() {
        return Err(invalid("nn_noise_scan.noise_levels", "must not be empty"));
    }
    let mode = if p.exclude_true_class { LabelNoise::ExcludeTrue } else { LabelNoise::Uniform };
    let jobs: Vec<(u64, usize, usize)> = seeds
        .iter()
        .flat_map(|&s| p.width_scales.iter().flat_map(move |&w| (0..p.noise_levels.len()).map(move |k| (s, w, k))))
        .collect();
    let finals = jobs
        .par_iter()
        .map(|&(seed, width, k)| {
            let (train, test) = load_data(&p.data, seed)?;
            let level = p.noise_levels[k];
            let train = if level > 0.0 { corrupt_labels_with(&train, level, derive_seed(seed, LABEL_NOISE_TAG), mode)? } else { train };
            let cfg =
                TrainConfig { epochs: p.epochs, batch_size: p.batch_size, learning_rate: p.learning_rate, seed, eval_every: p.epochs.max(1) };
            let (_, trace) = train_width(&train, &test, width, &cfg)?;
            Ok(*trace.test_mse.last().unwrap())
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut scan = CsvTable::new(&["seed", "width_scale", "noise", "final_test_mse"]);
    for (&(seed, w, k), &f) in jobs.iter().zip(&finals) {
        scan.push(vec![seed.into(), w.into(), p.noise_levels[k].into(), f.into()]);
    }
    out.csv("noise_scan.csv", &scan)?;

    let mut summary = CsvTable::new(&["noise", "width_scale", "mean", "std_err"]);
    let mut plotted = Vec::new();
    for (k, &level) in p.noise_levels.iter().enumerate() {
        let mut means = Vec::new();
        let mut errs = Vec::new();
        for &w in &p.width_scales {
            let mut v: Vec<f64> =
                jobs.iter().zip(&finals).filter(|((_, ww, kk), _)| *ww == w && *kk == k).map(|(_, &f)| f).collect();
            v.sort_by(f64::total_cmp);
            let (m, se) = mean_and_std_err(&v);
            summary.push(vec![level.into(), w.into(), m.into(), se.into()]);
            means.push(m);
            errs.push(se);
        }
        plotted.push(AggregateSeries {
            x: p.width_scales.iter().map(|&w| w as f64).collect(),
            mean: means,
            std_err: errs,
            label: format!("noise {level}"),
        });
    }
    out.csv("noise_summary.csv", &summary)?;
    out.plot(
        "noise_scan.svg",
        &plotted,
        &AxesSpec {
            log_x: false,
            log_y: false,
            x_label: "width scale".into(),
            y_label: "final test mse".into(),
            title: "Label noise".into(),
            guide_line: false,
        },
    )
}
