//! Cross-scale and cross-time performance prediction.
//!
//! If the learned model depends on scale `p` and time `t` only through
//! `p·t`, the error of a network at `(p₁, t₁)` can be read off a curve
//! measured at a different scale `p₀` at the remapped time `(p₁/p₀)·t₁`,
//! and conversely a family of short runs across scales predicts one long
//! run. Scale here is the effective parameter count, the cube root of the
//! absolute parameter count.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("remapped time {required} lies outside the measured range [{min}, {max}]")]
    TimeOutOfRange { required: f64, min: f64, max: f64 },
    #[error("required scale {required} lies outside the measured range [{min}, {max}]")]
    ScaleOutOfRange { required: f64, min: f64, max: f64 },
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, PredictError>;

/// Cube root of the absolute parameter count.
pub fn effective_params(absolute_count: u64) -> Result<f64> {
    if absolute_count < 1 {
        return Err(PredictError::Domain("parameter count must be at least 1".into()));
    }
    Ok((absolute_count as f64).cbrt())
}

/// Weights plus biases of a fully connected network with `depth` affine
/// layers, every hidden layer `width` wide.
pub fn mlp_param_count(in_dim: u64, width: u64, depth: u64, out_dim: u64) -> u64 {
    assert!(depth >= 2, "an MLP needs at least an input and an output layer");
    (in_dim * width + width) + (depth - 2) * (width * width + width) + (width * out_dim + out_dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Train,
    Test,
}

/// Error curve of one model scale over training time.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredCurve {
    /// Effective parameter count `p₀`.
    pub scale: f64,
    /// Strictly increasing, positive.
    pub times: Vec<f64>,
    pub train_error: Vec<f64>,
    pub test_error: Vec<f64>,
    pub n_seeds: usize,
    /// `(train, test)` standard errors.
    pub std_err: Option<(Vec<f64>, Vec<f64>)>,
}

impl MeasuredCurve {
    pub fn new(scale: f64, times: Vec<f64>, train_error: Vec<f64>, test_error: Vec<f64>) -> Result<Self> {
        let curve = Self { scale, times, train_error, test_error, n_seeds: 1, std_err: None };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(PredictError::InvalidCurve(format!("scale must be positive, got {}", self.scale)));
        }
        let n = self.times.len();
        if n == 0 || self.train_error.len() != n || self.test_error.len() != n {
            return Err(PredictError::InvalidCurve("times and error sequences must be nonempty and aligned".into()));
        }
        if let Some((a, b)) = &self.std_err {
            if a.len() != n || b.len() != n {
                return Err(PredictError::InvalidCurve("standard errors must align with times".into()));
            }
        }
        if self.times[0] < 0.0 || self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(PredictError::InvalidCurve("times must be nonnegative and strictly increasing".into()));
        }
        Ok(())
    }

    pub fn channel(&self, channel: Channel) -> &[f64] {
        match channel {
            Channel::Train => &self.train_error,
            Channel::Test => &self.test_error,
        }
    }

    fn time_range(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    /// Both channels at time `t`, linear in `(ln t, error)`. Grid times
    /// return the stored values exactly.
    pub fn at_log_time(&self, t: f64) -> Result<(f64, f64)> {
        let (min, max) = self.time_range();
        if !(t >= min && t <= max) {
            return Err(PredictError::TimeOutOfRange { required: t, min, max });
        }
        Ok((
            log_interp(&self.times, &self.train_error, t),
            log_interp(&self.times, &self.test_error, t),
        ))
    }
}

/// `xs` strictly increasing and nonnegative, `x` within range.
fn log_interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let j = xs.partition_point(|&v| v < x);
    if j < xs.len() && xs[j] == x {
        return ys[j];
    }
    if j == 0 {
        return ys[0];
    }
    if j == xs.len() {
        return ys[xs.len() - 1];
    }
    let (x0, x1) = (xs[j - 1], xs[j]);
    // A grid starting at 0 has no log position for its first point.
    let w = if x0 > 0.0 { (x.ln() - x0.ln()) / (x1.ln() - x0.ln()) } else { (x - x0) / (x1 - x0) };
    ys[j - 1] + w * (ys[j] - ys[j - 1])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub scale: f64,
    pub time: f64,
    /// Time at which the source curve was read.
    pub source_time: f64,
    pub train: f64,
    pub test: f64,
    /// Set when `source_time` fell outside the measured range and was clamped.
    pub clamped: bool,
}

/// Predicts the error at each `(p₁, t₁)` as the error of `curve` at
/// `(p₁/p₀)·t₁`. Out-of-range times are refused unless `clamp` is set.
pub fn predict_across_scale(curve: &MeasuredCurve, targets: &[(f64, f64)], clamp: bool) -> Result<Vec<Prediction>> {
    curve.validate()?;
    let (min, max) = curve.time_range();
    targets
        .iter()
        .map(|&(p1, t1)| {
            if !(p1 > 0.0) || !(t1 >= 0.0) {
                return Err(PredictError::Domain(format!("target ({p1}, {t1}) must have p > 0 and t ≥ 0")));
            }
            let remapped = (p1 / curve.scale) * t1;
            let (source_time, clamped) = if remapped < min || remapped > max {
                if !clamp {
                    return Err(PredictError::TimeOutOfRange { required: remapped, min, max });
                }
                (remapped.clamp(min, max), true)
            } else {
                (remapped, false)
            };
            let (train, test) = curve.at_log_time(source_time)?;
            Ok(Prediction { scale: p1, time: t1, source_time, train, test, clamped })
        })
        .collect()
}

/// Predicts the error of a model at `target_scale` at each time in
/// `t_grid` from runs at several scales that were only trained to `t0`:
/// the answer at `t` is the error at `t0` of the scale
/// `p₀ = target_scale·t/t0`, interpolated linearly in `ln p₀`.
pub fn predict_across_time(
    curves: &[MeasuredCurve],
    t0: f64,
    target_scale: f64,
    t_grid: &[f64],
) -> Result<MeasuredCurve> {
    if curves.is_empty() {
        return Err(PredictError::Domain("need at least one measured curve".into()));
    }
    if !(t0 > 0.0) || !(target_scale > 0.0) {
        return Err(PredictError::Domain("t0 and target scale must be positive".into()));
    }
    let mut at_t0: Vec<(f64, f64, f64)> = curves
        .iter()
        .map(|c| {
            c.validate()?;
            let (train, test) = c.at_log_time(t0)?;
            Ok((c.scale, train, test))
        })
        .collect::<Result<_>>()?;
    at_t0.sort_by(|a, b| a.0.total_cmp(&b.0));
    if at_t0.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(PredictError::InvalidCurve("scales must be distinct".into()));
    }
    let scales: Vec<f64> = at_t0.iter().map(|x| x.0).collect();
    let train: Vec<f64> = at_t0.iter().map(|x| x.1).collect();
    let test: Vec<f64> = at_t0.iter().map(|x| x.2).collect();
    let (min, max) = (scales[0], *scales.last().unwrap());

    let mut out_train = Vec::with_capacity(t_grid.len());
    let mut out_test = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let required = target_scale * t / t0;
        if !(required >= min && required <= max) {
            return Err(PredictError::ScaleOutOfRange { required, min, max });
        }
        out_train.push(log_interp(&scales, &train, required));
        out_test.push(log_interp(&scales, &test, required));
    }
    MeasuredCurve::new(target_scale, t_grid.to_vec(), out_train, out_test)
}

/// Outcome of a time-to-threshold query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinTime {
    Reached(f64),
    /// The threshold was never reached within the measured horizon.
    Censored,
}

impl MinTime {
    pub fn value(self) -> Option<f64> {
        match self {
            MinTime::Reached(t) => Some(t),
            MinTime::Censored => None,
        }
    }
}

/// First time the channel is at or below `threshold`, interpolating
/// linearly in `(time, error)` between grid points.
pub fn min_time_to_threshold(curve: &MeasuredCurve, threshold: f64, channel: Channel) -> MinTime {
    first_crossing(&curve.times, curve.channel(channel), threshold)
}

pub fn first_crossing(times: &[f64], errors: &[f64], threshold: f64) -> MinTime {
    for (j, &e) in errors.iter().enumerate() {
        if e <= threshold {
            if j == 0 {
                return MinTime::Reached(times[0]);
            }
            let (e0, t0, t1) = (errors[j - 1], times[j - 1], times[j]);
            let w = (e0 - threshold) / (e0 - e);
            return MinTime::Reached(t0 + w * (t1 - t0));
        }
    }
    MinTime::Censored
}

/// Minimum time-to-threshold per scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    /// Strictly increasing.
    pub scales: Vec<f64>,
    /// Mean over the uncensored seeds at each scale; `Censored` when no
    /// seed reached the threshold.
    pub min_times: Vec<MinTime>,
    pub threshold: f64,
    /// Standard error of the mean; `None` with fewer than two uncensored seeds.
    pub std_err: Vec<Option<f64>>,
    /// Censored seeds per scale.
    pub n_censored: Vec<usize>,
}

impl TradeoffCurve {
    /// Groups per-seed results by scale. Scales are sorted and exact
    /// duplicates merged.
    pub fn from_samples(threshold: f64, samples: Vec<(f64, Vec<MinTime>)>) -> Self {
        let mut grouped: Vec<(f64, Vec<MinTime>)> = Vec::new();
        let mut samples = samples;
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (scale, times) in samples {
            match grouped.last_mut() {
                Some((s, ts)) if *s == scale => ts.extend(times),
                _ => grouped.push((scale, times)),
            }
        }
        let mut curve = TradeoffCurve {
            scales: Vec::with_capacity(grouped.len()),
            min_times: Vec::with_capacity(grouped.len()),
            threshold,
            std_err: Vec::with_capacity(grouped.len()),
            n_censored: Vec::with_capacity(grouped.len()),
        };
        for (scale, times) in grouped {
            let reached: Vec<f64> = times.iter().filter_map(|t| t.value()).collect();
            curve.scales.push(scale);
            curve.n_censored.push(times.len() - reached.len());
            if reached.is_empty() {
                curve.min_times.push(MinTime::Censored);
                curve.std_err.push(None);
                continue;
            }
            let (mean, se) = mean_and_std_err(&reached);
            curve.min_times.push(MinTime::Reached(mean));
            curve.std_err.push(if reached.len() > 1 { Some(se) } else { None });
        }
        curve
    }

    /// Uncensored `(scale, time)` pairs.
    pub fn reached_points(&self) -> Vec<(f64, f64)> {
        self.scales
            .iter()
            .zip(&self.min_times)
            .filter_map(|(&s, t)| t.value().map(|v| (s, v)))
            .collect()
    }
}

/// Sample mean and `sd / √n` (0 for a single value).
pub fn mean_and_std_err(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Builds a tradeoff curve from per-seed runs at several scales.
pub fn tradeoff_from_runs(runs: &[MeasuredCurve], threshold: f64, channel: Channel) -> Result<TradeoffCurve> {
    if !(threshold > 0.0) {
        return Err(PredictError::Domain("threshold must be positive".into()));
    }
    let mut distinct: Vec<f64> = runs.iter().map(|r| r.scale).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(PredictError::Domain("need runs at two or more distinct scales".into()));
    }
    let samples = runs
        .iter()
        .map(|r| {
            r.validate()?;
            Ok((r.scale, vec![min_time_to_threshold(r, threshold, channel)]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TradeoffCurve::from_samples(threshold, samples))
}

/// Least-squares line through `(log₁₀ scale, log₁₀ time)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Fits uncensored points with positive time; a slope of −1 means time
/// and scale trade off 1:1.
pub fn loglog_slope(curve: &TradeoffCurve) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> = curve
        .reached_points()
        .into_iter()
        .filter(|&(s, t)| s > 0.0 && t > 0.0)
        .map(|(s, t)| (s.log10(), t.log10()))
        .collect();
    fit_line(&pts)
}

pub fn fit_line(pts: &[(f64, f64)]) -> Result<SlopeFit> {
    if pts.len() < 2 {
        return Err(PredictError::Domain(format!("need at least 2 uncensored points, have {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(PredictError::Domain("all points share one scale".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Ok(SlopeFit { slope, intercept, r_squared, n_points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn curve_from(times: &[f64], errs: &[f64]) -> MeasuredCurve {
        MeasuredCurve::new(1.0, times.to_vec(), errs.to_vec(), errs.to_vec()).unwrap()
    }

    fn tradeoff(points: &[(f64, f64)]) -> TradeoffCurve {
        TradeoffCurve::from_samples(
            0.1,
            points.iter().map(|&(s, t)| (s, vec![MinTime::Reached(t)])).collect(),
        )
    }

    #[test]
    fn interpolation_next_to_time_zero() {
        let c = curve_from(&[0.0, 2.0, 4.0], &[1.0, 0.5, 0.25]);
        assert_eq!(c.at_log_time(1.0).unwrap(), (0.75, 0.75));
        assert_eq!(c.at_log_time(0.0).unwrap().0, 1.0);
    }

    #[test]
    fn effective_params_values() {
        assert_eq!(effective_params(1).unwrap(), 1.0);
        assert_eq!(effective_params(1000).unwrap(), 10.0);
        assert!((effective_params(8400).unwrap() - 8400f64.powf(1.0 / 3.0)).abs() < 1e-9);
        assert_relative_eq!(effective_params(8400).unwrap(), 20.327, max_relative = 1e-4);
        assert!(effective_params(0).is_err());
    }

    #[test]
    fn mlp_param_counts() {
        assert_eq!(mlp_param_count(784, 10, 6, 10), 8400);
        assert_eq!(mlp_param_count(1, 1, 2, 1), 4);
        let middle = |w: u64| mlp_param_count(784, w, 6, 10) - mlp_param_count(784, w, 2, 10);
        let ratio = middle(200) as f64 / middle(100) as f64;
        assert!((ratio - 4.0).abs() < 0.05);
    }

    #[test]
    fn identity_remap_is_exact() {
        let times = [0.5, 1.0, 2.0, 4.0];
        let c = MeasuredCurve::new(3.0, times.to_vec(), vec![0.9, 0.7, 0.4, 0.2], vec![1.0, 0.8, 0.6, 0.5]).unwrap();
        let targets: Vec<(f64, f64)> = times.iter().map(|&t| (3.0, t)).collect();
        let preds = predict_across_scale(&c, &targets, false).unwrap();
        for (i, p) in preds.iter().enumerate() {
            assert_eq!(p.train, c.train_error[i]);
            assert_eq!(p.test, c.test_error[i]);
            assert!(!p.clamped);
        }
    }

    #[test]
    fn remap_on_reciprocal_curve() {
        let times: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let errs: Vec<f64> = times.iter().map(|t| 1.0 / t).collect();
        let c = curve_from(&times, &errs);
        let p = predict_across_scale(&c, &[(10.0, 0.5)], false).unwrap();
        assert_eq!(p[0].source_time, 5.0);
        assert_eq!(p[0].test, 0.2);
    }

    #[test]
    fn remap_out_of_range() {
        let c = curve_from(&[1.0, 2.0, 3.0], &[0.5, 0.3, 0.1]);
        let err = predict_across_scale(&c, &[(10.0, 1.0)], false).unwrap_err();
        assert!(matches!(err, PredictError::TimeOutOfRange { required, .. } if required == 10.0));
        let p = predict_across_scale(&c, &[(10.0, 1.0)], true).unwrap();
        assert!(p[0].clamped);
        assert_eq!(p[0].test, 0.1);
    }

    #[test]
    fn across_time_single_point() {
        let curves: Vec<MeasuredCurve> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&s| MeasuredCurve::new(s, vec![1.0, 2.0], vec![1.0 / s, 0.5 / s], vec![2.0 / s, 1.0 / s]).unwrap())
            .collect();
        let pred = predict_across_time(&curves, 1.0, 2.0, &[1.0]).unwrap();
        assert_eq!(pred.test_error, vec![1.0]);
        assert_eq!(pred.train_error, vec![0.5]);
        // decreasing in scale at t0 ⇒ decreasing in time
        let pred = predict_across_time(&curves, 1.0, 1.0, &[1.0, 1.5, 2.0, 3.0, 4.0]).unwrap();
        assert!(pred.test_error.windows(2).all(|w| w[1] < w[0]));
        assert!(matches!(
            predict_across_time(&curves, 1.0, 1.0, &[5.0]),
            Err(PredictError::ScaleOutOfRange { .. })
        ));
    }

    #[test]
    fn min_time_examples() {
        let c = curve_from(&[1.0, 2.0, 3.0], &[0.5, 0.3, 0.1]);
        assert_eq!(min_time_to_threshold(&c, 0.3, Channel::Test), MinTime::Reached(2.0));
        let MinTime::Reached(t) = min_time_to_threshold(&c, 0.2, Channel::Test) else { panic!() };
        assert_relative_eq!(t, 2.5, max_relative = 1e-12);
        assert_eq!(min_time_to_threshold(&c, 0.05, Channel::Test), MinTime::Censored);
        assert_eq!(min_time_to_threshold(&c, 0.9, Channel::Train), MinTime::Reached(1.0));
    }

    #[test]
    fn first_crossing_of_non_monotone_curve() {
        let c = curve_from(&[1.0, 2.0, 3.0, 4.0], &[0.5, 0.1, 0.6, 0.05]);
        assert_eq!(min_time_to_threshold(&c, 0.1, Channel::Test), MinTime::Reached(2.0));
    }

    #[test]
    fn tradeoff_from_reciprocal_runs() {
        let times: Vec<f64> = (1..=400).map(|k| k as f64 * 0.05).collect();
        let runs: Vec<MeasuredCurve> = [4.0, 1.0, 2.0]
            .iter()
            .map(|&p| {
                let errs: Vec<f64> = times.iter().map(|t| 1.0 / (p * t)).collect();
                MeasuredCurve::new(p, times.clone(), errs.clone(), errs).unwrap()
            })
            .collect();
        let curve = tradeoff_from_runs(&runs, 0.25, Channel::Test).unwrap();
        assert_eq!(curve.scales, vec![1.0, 2.0, 4.0]);
        assert!(curve.std_err.iter().all(Option::is_none));
        for (&p, t) in curve.scales.iter().zip(&curve.min_times) {
            // e = 1/(p t) ≤ 0.25 first at t = 4/p, which lies on the grid
            assert_relative_eq!(t.value().unwrap(), 4.0 / p, max_relative = 1e-12);
        }
        let fit = loglog_slope(&curve).unwrap();
        assert_relative_eq!(fit.slope, -1.0, max_relative = 1e-12);
    }

    #[test]
    fn tradeoff_all_censored_scale() {
        let a = curve_from(&[1.0, 2.0], &[0.5, 0.4]);
        let mut b = curve_from(&[1.0, 2.0], &[0.5, 0.05]);
        b.scale = 2.0;
        let curve = tradeoff_from_runs(&[a, b], 0.1, Channel::Test).unwrap();
        assert_eq!(curve.min_times[0], MinTime::Censored);
        assert_eq!(curve.n_censored, vec![1, 0]);
        assert!(tradeoff_from_runs(&[curve_from(&[1.0], &[0.1])], 0.1, Channel::Test).is_err());
    }

    #[test]
    fn tradeoff_std_err_over_seeds() {
        let curve = TradeoffCurve::from_samples(
            0.1,
            vec![(2.0, vec![MinTime::Reached(1.0), MinTime::Reached(3.0), MinTime::Censored])],
        );
        assert_eq!(curve.min_times[0], MinTime::Reached(2.0));
        assert_eq!(curve.std_err[0], Some(1.0));
        assert_eq!(curve.n_censored[0], 1);
    }

    #[test]
    fn slope_examples() {
        let fit = loglog_slope(&tradeoff(&[(1.0, 100.0), (10.0, 10.0), (100.0, 1.0)])).unwrap();
        assert_relative_eq!(fit.slope, -1.0, max_relative = 1e-12);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-12);
        let fit = loglog_slope(&tradeoff(&[(1.0, 1.0), (10.0, 1.0)])).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!(loglog_slope(&tradeoff(&[(1.0, 1.0)])).is_err());
    }

    proptest! {
        #[test]
        fn min_time_nonincreasing_in_threshold(
            errs in prop::collection::vec(0.0f64..1.0, 2..30),
            a in 0.001f64..1.0,
            b in 0.001f64..1.0,
        ) {
            let times: Vec<f64> = (0..errs.len()).map(|k| 1.0 + k as f64).collect();
            let c = curve_from(&times, &errs);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            match (min_time_to_threshold(&c, lo, Channel::Test), min_time_to_threshold(&c, hi, Channel::Test)) {
                (MinTime::Reached(tl), MinTime::Reached(th)) => prop_assert!(th <= tl + 1e-12),
                (MinTime::Reached(_), MinTime::Censored) => prop_assert!(false, "looser threshold censored"),
                _ => {}
            }
        }

        #[test]
        fn slope_invariant_under_time_rescaling(
            times in prop::collection::vec(0.01f64..100.0, 3..10),
            factor in 0.001f64..1000.0,
        ) {
            let pts: Vec<(f64, f64)> = times.iter().enumerate().map(|(i, &t)| (1.0 + i as f64, t)).collect();
            let scaled: Vec<(f64, f64)> = pts.iter().map(|&(s, t)| (s, t * factor)).collect();
            let a = loglog_slope(&tradeoff(&pts)).unwrap();
            let b = loglog_slope(&tradeoff(&scaled)).unwrap();
            prop_assert!((a.slope - b.slope).abs() < 1e-9);
            prop_assert!((b.intercept - a.intercept - factor.log10()).abs() < 1e-9);
        }

        #[test]
        fn effective_params_homogeneous(k in 1u64..40, c in 1u64..5000) {
            let lhs = effective_params(k * k * k * c).unwrap();
            let rhs = k as f64 * effective_params(c).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            prop_assert!(effective_params(c + 1).unwrap() > effective_params(c).unwrap());
        }
    }
}
