use nalgebra::DVector;
use rayon::prelude::*;

use scalinglab_core::double_descent::{
    scan_curve, unified_error, PriorSpec, ScaleCoupling, ScanAxis, ScanSettings, SpectrumSource, StudentTeacherInstance,
    XMode,
};
use scalinglab_core::predictor::{predict_across_scale, predict_across_time, MeasuredCurve};

use super::Outputs;
use crate::config::{AxisParam, CouplingParam, DdCurveParams, PredictParams};
use crate::error::{invalid, Result};
use crate::output::{aggregate_seeds, AggregateSeries, CsvTable, SeedSeries};
use crate::plot::AxesSpec;

fn axis(p: &DdCurveParams) -> ScanAxis {
    match p.axis {
        AxisParam::Time => ScanAxis::Time,
        AxisParam::Scale => ScanAxis::Scale,
        AxisParam::Data => ScanAxis::Data,
    }
}

fn integral_axis(p: &DdCurveParams) -> bool {
    p.axis == AxisParam::Data || (p.axis == AxisParam::Scale && p.scale_coupling == CouplingParam::TimeAndDimension)
}

/// The scan grid: the explicit one if given, else evenly spaced (in log
/// space when `log_grid`). Integer axes are rounded and deduplicated.
pub fn build_grid(p: &DdCurveParams) -> Result<Vec<f64>> {
    let mut grid = match &p.grid {
        Some(g) => g.clone(),
        None => {
            if p.grid_points < 2 {
                return Err(invalid("ddcurve.grid_points", "need at least two points"));
            }
            if !(p.grid_min < p.grid_max) || (p.log_grid && !(p.grid_min > 0.0)) {
                return Err(invalid("ddcurve.grid_min", "need 0 < grid_min < grid_max on a log grid"));
            }
            let k = (p.grid_points - 1) as f64;
            (0..p.grid_points)
                .map(|i| {
                    let f = i as f64 / k;
                    if p.log_grid {
                        (p.grid_min.ln() + f * (p.grid_max.ln() - p.grid_min.ln())).exp()
                    } else {
                        p.grid_min + f * (p.grid_max - p.grid_min)
                    }
                })
                .collect()
        }
    };
    if integral_axis(p) {
        for v in &mut grid {
            *v = v.round();
        }
        grid.dedup();
    }
    Ok(grid)
}

pub fn ddcurve(p: &DdCurveParams, seeds: &[u64], out: &mut Outputs) -> Result<()> {
    let grid = build_grid(p)?;
    let x_mode = match &p.test_point {
        Some(x) => {
            if x.len() != p.m {
                return Err(invalid("ddcurve.test_point", "length must equal m"));
            }
            XMode::Fixed(DVector::from_column_slice(x))
        }
        None => XMode::IsotropicAverage,
    };
    let base = ScanSettings {
        n: p.n,
        m: p.m,
        prior: PriorSpec { s_w: p.s_w, s_eps: p.s_eps, x_mode },
        learning_rate: p.learning_rate,
        p: p.p,
        t: p.t,
        spectrum: SpectrumSource::Sampled { seeds: vec![] },
        scale_coupling: match p.scale_coupling {
            CouplingParam::TimeOnly => ScaleCoupling::TimeOnly,
            CouplingParam::TimeAndDimension => ScaleCoupling::TimeAndDimension,
        },
    };
    // A given spectrum is deterministic, so it is evaluated once.
    let sources: Vec<(u64, SpectrumSource)> = match &p.singular_values {
        Some(s) => vec![(seeds[0], SpectrumSource::Given(DVector::from_column_slice(s)))],
        None => seeds.iter().map(|&s| (s, SpectrumSource::Sampled { seeds: vec![s] })).collect(),
    };
    let curves = sources
        .into_par_iter()
        .map(|(seed, spectrum)| {
            let settings = ScanSettings { spectrum, ..base.clone() };
            scan_curve(axis(p), &grid, &settings).map(|c| (seed, c))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let series = |f: fn(&scalinglab_core::ErrorCurve) -> &Vec<f64>, label: &str| -> Result<AggregateSeries> {
        let per: Vec<SeedSeries> = curves.iter().map(|(s, c)| SeedSeries { seed: *s, x: c.grid.clone(), y: f(c).clone() }).collect();
        aggregate_seeds(&per, &grid, label)
    };
    let total = series(|c| &c.total_sq_error, "total")?;
    let signal = series(|c| &c.signal_sq, "signal²")?;
    let noise = series(|c| &c.noise_sq, "noise²")?;

    let mut table = CsvTable::new(&["x", "total_sq_error", "total_std_err", "signal_sq", "noise_sq"]);
    for (i, &x) in grid.iter().enumerate() {
        table.push(vec![
            x.into(),
            total.mean[i].into(),
            total.std_err[i].into(),
            signal.mean[i].into(),
            noise.mean[i].into(),
        ]);
    }
    out.csv("ddcurve.csv", &table)?;

    let mut meta = toml::Table::new();
    meta.insert("axis".into(), axis(p).name().into());
    for (k, v) in &curves[0].1.metadata {
        meta.insert(k.clone(), v.clone().into());
    }
    out.metadata.insert("ddcurve".into(), meta.into());

    let log_x = p.axis == AxisParam::Time && grid.first().is_some_and(|&g| g > 0.0);
    let positive = |s: &AggregateSeries| s.mean.iter().all(|&v| v > 0.0);
    let plotted: Vec<AggregateSeries> = [total, signal, noise].into_iter().filter(|s| positive(s) || !log_x).collect();
    out.plot(
        "ddcurve.svg",
        &plotted,
        &AxesSpec {
            log_x,
            log_y: false,
            x_label: axis(p).name().into(),
            y_label: "expected squared error".into(),
            title: format!("Error along {}", axis(p).name()),
            guide_line: false,
        },
    )
}

/// One predicted point next to the closed-form value it should match.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub seed: u64,
    pub scale: f64,
    pub time: f64,
    /// Source time (cross-scale) or source scale (cross-time).
    pub source: f64,
    pub predicted: f64,
    pub direct: f64,
}

impl PredictionRow {
    pub fn abs_error(&self) -> f64 {
        (self.predicted - self.direct).abs()
    }
}

struct Model {
    sigma: DVector<f64>,
    xv: DVector<f64>,
    prior: PriorSpec,
    eta: f64,
}

impl Model {
    fn new(p: &PredictParams, seed: u64) -> Result<Self> {
        let prior = PriorSpec::isotropic(p.s_w, p.s_eps);
        let inst = StudentTeacherInstance::sample(p.n, p.m, &prior, p.learning_rate, seed)?;
        let xv = inst.xv_sq(&XMode::IsotropicAverage)?;
        Ok(Self { sigma: inst.sigma_ext(), xv, prior, eta: p.learning_rate })
    }

    fn error(&self, scale: f64, t: f64) -> Result<f64> {
        Ok(unified_error(&self.sigma, &self.xv, &self.prior, self.eta, scale, t)?.total)
    }

    /// The expected error is used for both the train and test channels.
    fn curve(&self, scale: f64, times: Vec<f64>) -> Result<MeasuredCurve> {
        let e = times.iter().map(|&t| self.error(scale, t)).collect::<Result<Vec<_>>>()?;
        Ok(MeasuredCurve::new(scale, times, e.clone(), e)?)
    }
}

fn octave_grid(start: f64, p: &PredictParams) -> Result<Vec<f64>> {
    if p.steps_per_octave == 0 || p.grid_points < 2 {
        return Err(invalid("predict.grid_points", "need at least two points and one step per octave"));
    }
    Ok((0..p.grid_points).map(|j| start * (j as f64 / p.steps_per_octave as f64).exp2()).collect())
}

/// Measures one curve at `source_scale` and predicts every larger scale
/// from it; targets that fall off the measured range are skipped.
pub fn cross_scale_predictions(p: &PredictParams, seed: u64) -> Result<Vec<PredictionRow>> {
    if !(p.t_min > 0.0) || !(p.source_scale > 0.0) {
        return Err(invalid("predict.t_min", "t_min and source_scale must be positive"));
    }
    let model = Model::new(p, seed)?;
    let times = octave_grid(p.t_min, p)?;
    let source = model.curve(p.source_scale, times.clone())?;
    let mut rows = Vec::new();
    for &ratio in &p.scale_ratios {
        if !(ratio > 0.0) {
            return Err(invalid("predict.scale_ratios", "ratios must be positive"));
        }
        let targets: Vec<(f64, f64)> = times.iter().map(|&t| (p.source_scale * ratio, t / ratio)).collect();
        for pred in predict_across_scale(&source, &targets, true)? {
            if pred.clamped {
                continue;
            }
            rows.push(PredictionRow {
                seed,
                scale: pred.scale,
                time: pred.time,
                source: pred.source_time,
                predicted: pred.test,
                direct: model.error(pred.scale, pred.time)?,
            });
        }
    }
    Ok(rows)
}

/// Trains (evaluates) a ladder of scales only up to `2·t0` and predicts
/// the curve of `target_scale` beyond it.
pub fn cross_time_predictions(p: &PredictParams, seed: u64) -> Result<Vec<PredictionRow>> {
    if !(p.scale_min > 0.0) || !(p.t0 > 0.0) || !(p.target_scale > 0.0) {
        return Err(invalid("predict.scale_min", "scale_min, t0 and target_scale must be positive"));
    }
    let model = Model::new(p, seed)?;
    let scales = octave_grid(p.scale_min, p)?;
    let curves = scales
        .iter()
        .map(|&s| model.curve(s, vec![p.t0 / 2.0, p.t0, 2.0 * p.t0]))
        .collect::<Result<Vec<_>>>()?;
    let t_grid: Vec<f64> = scales.iter().map(|&s| p.t0 * s / p.target_scale).collect();
    let predicted = predict_across_time(&curves, p.t0, p.target_scale, &t_grid)?;
    t_grid
        .iter()
        .zip(&predicted.test_error)
        .map(|(&t, &pred)| {
            Ok(PredictionRow {
                seed,
                scale: p.target_scale,
                time: t,
                source: p.target_scale * t / p.t0,
                predicted: pred,
                direct: model.error(p.target_scale, t)?,
            })
        })
        .collect()
}

fn rows_table(rows: &[PredictionRow], source_col: &str) -> CsvTable {
    let mut t = CsvTable::new(&["seed", "scale", "time", source_col, "predicted", "direct", "abs_error"]);
    for r in rows {
        t.push(vec![
            r.seed.into(),
            r.scale.into(),
            r.time.into(),
            r.source.into(),
            r.predicted.into(),
            r.direct.into(),
            r.abs_error().into(),
        ]);
    }
    t
}

pub fn predict(p: &PredictParams, seeds: &[u64], out: &mut Outputs) -> Result<()> {
    let per_seed = seeds
        .par_iter()
        .map(|&seed| Ok((cross_scale_predictions(p, seed)?, cross_time_predictions(p, seed)?)))
        .collect::<Result<Vec<_>>>()?;
    let scale_rows: Vec<PredictionRow> = per_seed.iter().flat_map(|x| x.0.clone()).collect();
    let time_rows: Vec<PredictionRow> = per_seed.iter().flat_map(|x| x.1.clone()).collect();
    out.csv("predict_cross_scale.csv", &rows_table(&scale_rows, "source_time"))?;
    out.csv("predict_cross_time.csv", &rows_table(&time_rows, "source_scale"))?;

    let mut summary = CsvTable::new(&["seed", "mode", "n_points", "max_abs_error"]);
    for (seed, (s, t)) in seeds.iter().zip(&per_seed) {
        for (mode, rows) in [("cross_scale", s), ("cross_time", t)] {
            let max = rows.iter().map(PredictionRow::abs_error).fold(0.0, f64::max);
            summary.push(vec![(*seed).into(), mode.into(), rows.len().into(), max.into()]);
        }
    }
    out.csv("predict_summary.csv", &summary)?;

    // Plot the first seed's cross-time prediction against the direct curve.
    let first: Vec<&PredictionRow> = time_rows.iter().filter(|r| r.seed == seeds[0] && r.time > 0.0).collect();
    if first.len() >= 2 {
        let x: Vec<f64> = first.iter().map(|r| r.time).collect();
        let zeros = vec![0.0; x.len()];
        let mk = |label: &str, y: Vec<f64>| AggregateSeries { x: x.clone(), mean: y, std_err: zeros.clone(), label: label.into() };
        out.plot(
            "predict_cross_time.svg",
            &[mk("predicted", first.iter().map(|r| r.predicted).collect()), mk("direct", first.iter().map(|r| r.direct).collect())],
            &AxesSpec {
                log_x: true,
                log_y: false,
                x_label: "time".into(),
                y_label: "expected squared error".into(),
                title: format!("Scale {} beyond the trained horizon", p.target_scale),
                guide_line: false,
            },
        )?;
    }
    Ok(())
}
