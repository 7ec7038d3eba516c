use rayon::prelude::*;

use scalinglab_core::predictor::{loglog_slope, MinTime};
use scalinglab_core::rng::{derive_seed, gaussian_matrix, gaussian_vector, stream};
use scalinglab_core::subspace::{
    bound_violation_rate, linear_tradeoff_trial, noise_matrix_stats, stable_step, tradeoff_curves_from_trials,
    EmbeddingScaling, LinearTradeoffConfig, LossSpec, SubspaceSpec, ThetaInit, ThresholdMode,
};

use super::Outputs;
use crate::config::{EmbeddingParam, LinearTradeoffParams, SubspaceVerifyParams, ThetaInitParam, ThresholdModeParam};
use crate::error::{invalid, Result};
use crate::output::{aggregate_seeds, tradeoff_table, AggregateSeries, Cell, CsvTable, SeedSeries};
use crate::plot::AxesSpec;

/// Curvature of the quadratic loss `‖α − α*‖²`.
const QUADRATIC_CURVATURE: f64 = 2.0;

pub fn subspace_verify(p: &SubspaceVerifyParams, seeds: &[u64], out: &mut Outputs) -> Result<()> {
    if p.p_values.is_empty() {
        return Err(invalid("subspace_verify.p_values", "must not be empty"));
    }
    if !(p.stability_factor > 0.0) {
        return Err(invalid("subspace_verify.stability_factor", "must be positive"));
    }
    if let Some(dt) = p.dt {
        if !(dt > 0.0) {
            return Err(invalid("subspace_verify.dt", "must be positive"));
        }
    }

    let mut bound = CsvTable::new(&[
        "seed",
        "p",
        "trials",
        "violations",
        "failed",
        "violation_rate",
        "max_ratio",
        "max_deviation",
        "l",
        "h",
        "dt",
    ]);
    let mut ratio_series = Vec::new();
    for &seed in seeds {
        let mut ratios = Vec::new();
        for &pv in &p.p_values {
            let spec = SubspaceSpec::sample_gaussian(p.ambient_dim, p.projection_dim, pv, p.learning_rate, ThetaInit::Zero, seed)?;
            let target = gaussian_vector(&mut stream(derive_seed(seed, u64::MAX)), p.projection_dim);
            let loss = LossSpec::quadratic(target);
            let dt = p.dt.unwrap_or_else(|| stable_step(&spec, None, QUADRATIC_CURVATURE, p.stability_factor));
            let check = bound_violation_rate(&spec, &loss, p.horizon, dt, p.trials, p.failure_prob, derive_seed(seed, pv as u64))?;
            let ok = check.records.iter().filter_map(|r| r.outcome.as_ref().ok());
            let max_ratio = ok.clone().map(|s| s.max_ratio).fold(0.0, f64::max);
            let max_dev = ok.map(|s| s.max_deviation).fold(0.0, f64::max);
            log::info!("subspace-verify seed {seed} p {pv}: rate {}", check.rate);
            bound.push(vec![
                seed.into(),
                pv.into(),
                p.trials.into(),
                check.violations.into(),
                check.failed.into(),
                check.rate.into(),
                max_ratio.into(),
                max_dev.into(),
                check.constants.l.into(),
                check.constants.h.into(),
                dt.into(),
            ]);
            ratios.push(max_ratio);
        }
        ratio_series.push(SeedSeries { seed, x: p.p_values.iter().map(|&v| v as f64).collect(), y: ratios });
    }
    out.csv("bound.csv", &bound)?;

    if p.noise_draws > 0 {
        let mut noise = CsvTable::new(&[
            "seed",
            "k_index",
            "r",
            "p",
            "empirical_mean",
            "standard_error",
            "analytic",
            "relative_error",
        ]);
        for &seed in seeds {
            for (ki, &r) in p.noise_projection_dims.iter().enumerate() {
                let k = gaussian_matrix(&mut stream(derive_seed(seed, 1000 + ki as u64)), r, p.noise_ambient_dim);
                for &pv in &p.noise_p_values {
                    let stats = noise_matrix_stats(&k, pv, p.noise_draws, derive_seed(seed, 2000 + (ki * 1000 + pv) as u64));
                    noise.push(vec![
                        seed.into(),
                        ki.into(),
                        r.into(),
                        pv.into(),
                        stats.empirical_mean.into(),
                        stats.standard_error.into(),
                        stats.analytic.into(),
                        stats.relative_error().into(),
                    ]);
                }
            }
        }
        out.csv("noise_identity.csv", &noise)?;
    }

    let grid: Vec<f64> = p.p_values.iter().map(|&v| v as f64).collect();
    let ratio = aggregate_seeds(&ratio_series, &grid, "max deviation / bound")?;
    out.plot(
        "bound.svg",
        &[ratio],
        &AxesSpec { x_label: "p".into(), y_label: "max deviation / bound".into(), title: "Deviation bound check".into(), ..Default::default() },
    )
}

pub fn linear_tradeoff(p: &LinearTradeoffParams, seeds: &[u64], out: &mut Outputs) -> Result<()> {
    if p.p_grid.len() < 2 {
        return Err(invalid("linear_tradeoff.p_grid", "needs at least two scales"));
    }
    if p.loss_thresholds.is_empty() {
        return Err(invalid("linear_tradeoff.loss_thresholds", "must not be empty"));
    }
    let config = LinearTradeoffConfig {
        ambient_dim: p.ambient_dim,
        projection_dim: p.projection_dim,
        learning_rate: p.learning_rate,
        p_grid: p.p_grid.clone(),
        loss_thresholds: p.loss_thresholds.clone(),
        threshold_mode: match p.threshold_mode {
            ThresholdModeParam::Absolute => ThresholdMode::Absolute,
            ThresholdModeParam::Relative => ThresholdMode::RelativeToInitial,
        },
        trials: seeds.len(),
        max_iters: p.max_iters,
        master_seed: seeds[0],
        gaussian_theta_init: p.theta_init == ThetaInitParam::Gaussian,
        embedding: match p.embedding {
            EmbeddingParam::Gaussian => EmbeddingScaling::Gaussian,
            EmbeddingParam::RowNormalized => EmbeddingScaling::RowNormalized,
        },
    };
    let per_seed = seeds
        .par_iter()
        .map(|&seed| linear_tradeoff_trial(&config, seed))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut iterations = CsvTable::new(&["seed", "p", "threshold_index", "iterations"]);
    for (seed, trial) in seeds.iter().zip(&per_seed) {
        for (pi, &pv) in p.p_grid.iter().enumerate() {
            for (ti, hit) in trial[pi].iter().enumerate() {
                iterations.push(vec![(*seed).into(), pv.into(), ti.into(), hit.map_or(Cell::Empty, Cell::from)]);
            }
        }
    }
    out.csv("iterations.csv", &iterations)?;

    let curves = tradeoff_curves_from_trials(&config, &per_seed);
    let mut slopes = CsvTable::new(&["threshold_index", "threshold", "slope", "intercept", "r_squared", "n_points"]);
    let mut plotted = Vec::new();
    for (ti, curve) in curves.iter().enumerate() {
        out.csv(&format!("tradeoff_{ti}.csv"), &tradeoff_table(curve))?;
        match loglog_slope(curve) {
            Ok(fit) => slopes.push(vec![
                ti.into(),
                curve.threshold.into(),
                fit.slope.into(),
                fit.intercept.into(),
                fit.r_squared.into(),
                fit.n_points.into(),
            ]),
            Err(_) => slopes.push(vec![ti.into(), curve.threshold.into(), Cell::Empty, Cell::Empty, Cell::Empty, curve.reached_points().len().into()]),
        }
        let pts: Vec<usize> = (0..curve.scales.len()).filter(|&i| matches!(curve.min_times[i], MinTime::Reached(t) if t > 0.0)).collect();
        if !pts.is_empty() {
            plotted.push(AggregateSeries {
                x: pts.iter().map(|&i| curve.scales[i]).collect(),
                mean: pts.iter().map(|&i| curve.min_times[i].value().unwrap()).collect(),
                std_err: pts.iter().map(|&i| curve.std_err[i].unwrap_or(0.0)).collect(),
                label: format!("loss ≤ {}", curve.threshold),
            });
        }
    }
    out.csv("slopes.csv", &slopes)?;
    if !plotted.is_empty() {
        out.plot(
            "tradeoff.svg",
            &plotted,
            &AxesSpec {
                log_x: true,
                log_y: true,
                x_label: "p".into(),
                y_label: "iterations to threshold".into(),
                title: "Scale-time tradeoff".into(),
                guide_line: true,
            },
        )?;
    }
    Ok(())
}
