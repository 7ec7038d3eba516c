//! Gradient flow on a random subspace of a large linear model.
//!
//! A `P`-dimensional parameter vector `β` only matters through its
//! projection `α = Kβ ∈ Rʳ`. We control a random `p`-dimensional affine
//! slice `β = Rθ + β₀` with `R` having iid unit-Gaussian entries, and train
//! `θ` by gradient flow on `L(α)`:
//!
//! ```text
//! θ̇ = −η Rᵀ Kᵀ ∇L(α),     α = K(Rθ + β₀)
//! ```
//!
//! Since `E[KRRᵀKᵀ] = p·KKᵀ`, the induced flow on `α` tracks the
//! `p`-independent reference flow `Ȧ = −η KKᵀ ∇L(A)` read at time `p·t`.
//! This module integrates both flows, measures `‖α_t − A_{pt}‖`, evaluates
//! the high-probability bound on that deviation, and runs the discrete
//! scale/iterations tradeoff experiment on the same model.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::linalg::{psd_spectral_norm, smallest_singular_value, symmetric_eigenvalues};
use crate::predictor::{MinTime, TradeoffCurve};
use crate::rng::{derive_seed, gaussian_matrix, gaussian_vector, stream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubspaceError {
    #[error("invalid dimensions: {0}")]
    Dimension(String),
    #[error("projection matrix K is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),
    #[error("learning rate must be positive and finite, got {0}")]
    LearningRate(f64),
    #[error("step size must be positive and finite, got {0}")]
    StepSize(f64),
    #[error("horizon must be nonnegative and finite, got {0}")]
    Horizon(f64),
    #[error("state became non-finite at t = {time}")]
    Divergence { time: f64 },
    #[error("reference trajectory ends at s = {available} but s = {required} is needed")]
    Coverage { required: f64, available: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("deviation bound assumes θ₀ = 0; spec uses a Gaussian initialization")]
    RequiresZeroInit,
}

pub type Result<T> = std::result::Result<T, SubspaceError>;

/// Initialization of the controllable parameters `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaInit {
    Zero,
    UnitGaussian(u64),
}

impl ThetaInit {
    fn sample(self, p: usize) -> DVector<f64> {
        match self {
            ThetaInit::Zero => DVector::zeros(p),
            ThetaInit::UnitGaussian(seed) => gaussian_vector(&mut stream(seed), p),
        }
    }
}

/// The `(P, r, p, η, K, β₀)` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSpec {
    pub ambient_dim: usize,
    pub projection_dim: usize,
    pub controllable_dim: usize,
    pub learning_rate: f64,
    /// `K`, shape `r × P`.
    pub projection: DMatrix<f64>,
    /// `β₀`, length `P`.
    pub beta0: DVector<f64>,
    pub theta_init: ThetaInit,
}

impl SubspaceSpec {
    pub fn new(
        projection: DMatrix<f64>,
        beta0: DVector<f64>,
        controllable_dim: usize,
        learning_rate: f64,
        theta_init: ThetaInit,
    ) -> Result<Self> {
        let (r, big_p) = projection.shape();
        if r == 0 || big_p == 0 || controllable_dim == 0 {
            return Err(SubspaceError::Dimension(format!(
                "need positive r, P, p (got r={r}, P={big_p}, p={controllable_dim})"
            )));
        }
        if beta0.len() != big_p {
            return Err(SubspaceError::Dimension(format!(
                "beta0 has length {} but K has {big_p} columns",
                beta0.len()
            )));
        }
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(SubspaceError::LearningRate(learning_rate));
        }
        if r > big_p {
            return Err(SubspaceError::Dimension(format!("r={r} exceeds P={big_p}")));
        }
        let smin = smallest_singular_value(&projection);
        if smin <= 1e-12 {
            return Err(SubspaceError::RankDeficient(smin));
        }
        Ok(Self {
            ambient_dim: big_p,
            projection_dim: r,
            controllable_dim,
            learning_rate,
            projection,
            beta0,
            theta_init,
        })
    }

    /// `K` and `β₀` with iid unit-Gaussian entries.
    pub fn sample_gaussian(
        ambient_dim: usize,
        projection_dim: usize,
        controllable_dim: usize,
        learning_rate: f64,
        theta_init: ThetaInit,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = stream(seed);
        let k = gaussian_matrix(&mut rng, projection_dim, ambient_dim);
        let beta0 = gaussian_vector(&mut rng, ambient_dim);
        Self::new(k, beta0, controllable_dim, learning_rate, theta_init)
    }

    pub fn with_controllable_dim(&self, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(SubspaceError::Dimension("p must be positive".into()));
        }
        Ok(Self { controllable_dim: p, ..self.clone() })
    }

    /// The strict ordering `r < p < P` the deviation bound is stated for.
    pub fn check_bound_hypotheses(&self) -> Result<()> {
        let (r, p, big_p) = (self.projection_dim, self.controllable_dim, self.ambient_dim);
        if !(r < p && p < big_p) {
            return Err(SubspaceError::Dimension(format!(
                "bound verification needs r < p < P (got r={r}, p={p}, P={big_p})"
            )));
        }
        if self.theta_init != ThetaInit::Zero {
            return Err(SubspaceError::RequiresZeroInit);
        }
        Ok(())
    }

    /// `Kβ₀`, the common starting point of both flows when `θ₀ = 0`.
    pub fn initial_projection(&self) -> DVector<f64> {
        &self.projection * &self.beta0
    }

    pub fn kkt(&self) -> DMatrix<f64> {
        &self.projection * self.projection.transpose()
    }
}

/// `R`, shape `P × p`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub matrix: DMatrix<f64>,
    pub seed: u64,
}

pub fn sample_embedding(spec: &SubspaceSpec, seed: u64) -> EmbeddingMatrix {
    EmbeddingMatrix {
        matrix: gaussian_matrix(&mut stream(seed), spec.ambient_dim, spec.controllable_dim),
        seed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LossKind {
    /// `L(α) = ‖α − α*‖²`
    Quadratic { target: DVector<f64> },
}

/// Gradient-norm bound `l` and gradient Lipschitz constant `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzConstants {
    pub l: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec {
    pub kind: LossKind,
    /// `None` means: derive over the region visited by the reference flow.
    pub lipschitz: Option<LipschitzConstants>,
}

impl LossSpec {
    pub fn quadratic(target: DVector<f64>) -> Self {
        Self { kind: LossKind::Quadratic { target }, lipschitz: None }
    }

    pub fn with_lipschitz(mut self, l: f64, h: f64) -> Self {
        self.lipschitz = Some(LipschitzConstants { l, h });
        self
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            LossKind::Quadratic { target } => target.len(),
        }
    }

    pub fn value(&self, alpha: &DVector<f64>) -> f64 {
        match &self.kind {
            LossKind::Quadratic { target } => (alpha - target).norm_squared(),
        }
    }

    pub fn gradient(&self, alpha: &DVector<f64>) -> DVector<f64> {
        match &self.kind {
            LossKind::Quadratic { target } => 2.0 * (alpha - target),
        }
    }

    /// Largest gradient norm and Hessian operator norm over `region`.
    pub fn lipschitz_over(&self, region: &Region) -> LipschitzConstants {
        match &self.kind {
            LossKind::Quadratic { target } => {
                let far: f64 = region
                    .lower
                    .iter()
                    .zip(&region.upper)
                    .zip(target.iter())
                    .map(|((lo, hi), a)| (lo - a).abs().max((hi - a).abs()).powi(2))
                    .sum();
                LipschitzConstants { l: 2.0 * far.sqrt(), h: 2.0 }
            }
        }
    }
}

/// Axis-aligned box in `Rʳ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Region {
    /// Bounding box of the trajectory states with every half-width scaled
    /// by `1 + inflation` about the box center.
    pub fn around(traj: &FlowTrajectory, inflation: f64) -> Self {
        let r = traj.states[0].len();
        let mut lower = vec![f64::INFINITY; r];
        let mut upper = vec![f64::NEG_INFINITY; r];
        for s in &traj.states {
            for i in 0..r {
                lower[i] = lower[i].min(s[i]);
                upper[i] = upper[i].max(s[i]);
            }
        }
        for i in 0..r {
            let center = 0.5 * (lower[i] + upper[i]);
            let half = 0.5 * (upper[i] - lower[i]) * (1.0 + inflation);
            lower[i] = center - half;
            upper[i] = center + half;
        }
        Self { lower, upper }
    }
}

/// States sampled on a time grid starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub step_size: f64,
}

impl FlowTrajectory {
    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    /// Linear interpolation between grid states.
    pub fn interpolate(&self, s: f64) -> Result<DVector<f64>> {
        let end = self.end_time();
        if s > end * (1.0 + 1e-12) + 1e-300 || s < 0.0 {
            return Err(SubspaceError::Coverage { required: s, available: end });
        }
        let s = s.min(end);
        let j = self.times.partition_point(|&t| t <= s);
        if j == 0 {
            return Ok(self.states[0].clone());
        }
        if j == self.times.len() {
            return Ok(self.states[j - 1].clone());
        }
        let (t0, t1) = (self.times[j - 1], self.times[j]);
        let w = (s - t0) / (t1 - t0);
        Ok(&self.states[j - 1] + (&self.states[j] - &self.states[j - 1]) * w)
    }
}

fn step_grid(horizon: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SubspaceError::StepSize(dt));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(SubspaceError::Horizon(horizon));
    }
    let ratio = horizon / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    let mut times: Vec<f64> = (0..=steps).map(|k| (k as f64 * dt).min(horizon)).collect();
    if let Some(last) = times.last_mut() {
        *last = horizon;
    }
    Ok(times)
}

fn check_finite(v: &DVector<f64>, time: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SubspaceError::Divergence { time })
    }
}

/// Explicit Euler on `θ̇ = −ηRᵀKᵀ∇L(α)`, recording `α_t = K(Rθ_t + β₀)`.
pub fn integrate_controlled_flow(
    spec: &SubspaceSpec,
    embedding: &EmbeddingMatrix,
    loss: &LossSpec,
    horizon: f64,
    dt: f64,
) -> Result<FlowTrajectory> {
    if embedding.matrix.shape() != (spec.ambient_dim, spec.controllable_dim) {
        return Err(SubspaceError::Dimension(format!(
            "R is {:?}, expected {}×{}",
            embedding.matrix.shape(),
            spec.ambient_dim,
            spec.controllable_dim
        )));
    }
    if loss.dim() != spec.projection_dim {
        return Err(SubspaceError::Dimension("loss target length must equal r".into()));
    }
    let times = step_grid(horizon, dt)?;
    let kr = &spec.projection * &embedding.matrix;
    let offset = spec.initial_projection();
    let mut theta = spec.theta_init.sample(spec.controllable_dim);
    let eta = spec.learning_rate;

    let mut states = Vec::with_capacity(times.len());
    let mut alpha = &kr * &theta + &offset;
    check_finite(&alpha, 0.0)?;
    states.push(alpha.clone());
    for w in times.windows(2) {
        let h = w[1] - w[0];
        let grad = loss.gradient(&alpha);
        theta -= kr.tr_mul(&grad) * (eta * h);
        alpha = &kr * &theta + &offset;
        check_finite(&alpha, w[1])?;
        states.push(alpha.clone());
    }
    Ok(FlowTrajectory { times, states, step_size: dt })
}

/// Explicit Euler on `Ȧ = −ηKKᵀ∇L(A)`, `A₀ = Kβ₀`. Does not read `p`.
pub fn integrate_reference_flow(
    spec: &SubspaceSpec,
    loss: &LossSpec,
    horizon_s: f64,
    dt: f64,
) -> Result<FlowTrajectory> {
    if loss.dim() != spec.projection_dim {
        return Err(SubspaceError::Dimension("loss target length must equal r".into()));
    }
    let times = step_grid(horizon_s, dt)?;
    let kkt = spec.kkt();
    let eta = spec.learning_rate;
    let mut a = spec.initial_projection();
    check_finite(&a, 0.0)?;
    let mut states = Vec::with_capacity(times.len());
    states.push(a.clone());
    for w in times.windows(2) {
        let h = w[1] - w[0];
        a -= &kkt * loss.gradient(&a) * (eta * h);
        check_finite(&a, w[1])?;
        states.push(a.clone());
    }
    Ok(FlowTrajectory { times, states, step_size: dt })
}

/// `(t, ‖α_t − A_{pt}‖)` for every time on the controlled grid.
pub fn deviation_curve(
    alpha: &FlowTrajectory,
    reference: &FlowTrajectory,
    p: usize,
) -> Result<Vec<(f64, f64)>> {
    let pf = p as f64;
    let required = pf * alpha.end_time();
    if required > reference.end_time() * (1.0 + 1e-12) {
        return Err(SubspaceError::Coverage { required, available: reference.end_time() });
    }
    alpha
        .times
        .iter()
        .zip(&alpha.states)
        .map(|(&t, a)| Ok((t, (a - reference.interpolate(pf * t)?).norm())))
        .collect()
}

/// Precomputed matrix norms of the deviation bound
///
/// ```text
/// ‖α_t − A_{pt}‖ ≤ l·√(‖K‖_F⁴ + ‖KKᵀ‖_F²) / (h·√(pε)·‖KKᵀ‖₂) · (exp(η·p·t·h·‖KKᵀ‖₂) − 1)
/// ```
///
/// which holds with probability `1 − ε` over the draw of `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationBound {
    pub l: f64,
    pub h: f64,
    pub learning_rate: f64,
    pub failure_prob: f64,
    /// `√(‖K‖_F⁴ + ‖KKᵀ‖_F²)`
    pub frobenius_term: f64,
    /// `‖KKᵀ‖₂`
    pub kkt_norm: f64,
}

impl DeviationBound {
    pub fn new(k: &DMatrix<f64>, l: f64, h: f64, learning_rate: f64, failure_prob: f64) -> Result<Self> {
        if !(failure_prob > 0.0 && failure_prob <= 1.0) {
            return Err(SubspaceError::Domain(format!("failure probability must lie in (0, 1], got {failure_prob}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(SubspaceError::Domain(format!("h must be positive, got {h}")));
        }
        if !(l >= 0.0 && learning_rate >= 0.0) {
            return Err(SubspaceError::Domain("l and η must be nonnegative".into()));
        }
        let kkt = k * k.transpose();
        let eig = symmetric_eigenvalues(&kkt);
        let (top, bottom) = (eig.first().copied().unwrap_or(0.0), eig.last().copied().unwrap_or(0.0));
        if !(top > 0.0) || bottom <= 1e-12 * top {
            return Err(SubspaceError::Domain("KKᵀ is singular".into()));
        }
        let kf2 = k.norm_squared();
        Ok(Self {
            l,
            h,
            learning_rate,
            failure_prob,
            frobenius_term: (kf2 * kf2 + kkt.norm_squared()).sqrt(),
            kkt_norm: psd_spectral_norm(&kkt),
        })
    }

    pub fn at(&self, p: usize, t: f64) -> f64 {
        let pf = p as f64;
        let prefactor =
            self.l * self.frobenius_term / (self.h * (pf * self.failure_prob).sqrt() * self.kkt_norm);
        prefactor * (self.learning_rate * pf * t * self.h * self.kkt_norm).exp_m1()
    }
}

/// One-shot evaluation of [`DeviationBound`].
#[allow(clippy::too_many_arguments)]
pub fn scale_time_deviation_bound(
    k: &DMatrix<f64>,
    l: f64,
    h: f64,
    learning_rate: f64,
    p: usize,
    t: f64,
    failure_prob: f64,
) -> Result<f64> {
    if t < 0.0 {
        return Err(SubspaceError::Domain(format!("t must be nonnegative, got {t}")));
    }
    Ok(DeviationBound::new(k, l, h, learning_rate, failure_prob)?.at(p, t))
}

/// Step size keeping `η·h·λ_max·dt` at `stability_factor`, where `λ_max`
/// is the larger of `‖KRRᵀKᵀ‖₂` and `p‖KKᵀ‖₂`.
pub fn stable_step(spec: &SubspaceSpec, embedding: Option<&EmbeddingMatrix>, h: f64, stability_factor: f64) -> f64 {
    let mut lambda = spec.controllable_dim as f64 * psd_spectral_norm(&spec.kkt());
    if let Some(r) = embedding {
        let kr = &spec.projection * &r.matrix;
        lambda = lambda.max(psd_spectral_norm(&(&kr * kr.transpose())));
    }
    stability_factor / (spec.learning_rate * h * lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub max_deviation: f64,
    /// Largest `deviation / bound` over grid times with a positive bound.
    pub max_ratio: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub outcome: std::result::Result<TrialStats, SubspaceError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// Violations (failed trials included) over all trials.
    pub rate: f64,
    pub violations: usize,
    pub failed: usize,
    pub records: Vec<TrialRecord>,
    /// Region the Lipschitz constants were taken over; `None` if supplied.
    pub region: Option<Region>,
    pub constants: LipschitzConstants,
}

/// Fraction of random embeddings for which `‖α_t − A_{pt}‖` exceeds the
/// deviation bound at some grid time. Trials whose integration fails are
/// counted as violations.
#[allow(clippy::too_many_arguments)]
pub fn bound_violation_rate(
    spec: &SubspaceSpec,
    loss: &LossSpec,
    horizon: f64,
    dt: f64,
    trials: usize,
    failure_prob: f64,
    master_seed: u64,
) -> Result<BoundCheck> {
    spec.check_bound_hypotheses()?;
    if trials == 0 {
        return Err(SubspaceError::Domain("need at least one trial".into()));
    }
    let p = spec.controllable_dim;
    let reference = integrate_reference_flow(spec, loss, p as f64 * horizon, dt)?;
    let (constants, region) = match loss.lipschitz {
        Some(c) => (c, None),
        None => {
            let region = Region::around(&reference, 0.5);
            (loss.lipschitz_over(&region), Some(region))
        }
    };
    let bound = DeviationBound::new(&spec.projection, constants.l, constants.h, spec.learning_rate, failure_prob)?;

    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|index| {
            let seed = derive_seed(master_seed, index as u64);
            let embedding = sample_embedding(spec, seed);
            let outcome = integrate_controlled_flow(spec, &embedding, loss, horizon, dt)
                .and_then(|alpha| deviation_curve(&alpha, &reference, p))
                .map(|devs| {
                    let mut stats = TrialStats { max_deviation: 0.0, max_ratio: 0.0, violated: false };
                    for (t, d) in devs {
                        let b = bound.at(p, t);
                        stats.max_deviation = stats.max_deviation.max(d);
                        if d > b {
                            stats.violated = true;
                        }
                        if b > 0.0 {
                            stats.max_ratio = stats.max_ratio.max(d / b);
                        }
                    }
                    stats
                });
            TrialRecord { index, seed, outcome }
        })
        .collect();

    let failed = records.iter().filter(|r| r.outcome.is_err()).count();
    let violations = records
        .iter()
        .filter(|r| r.outcome.as_ref().map_or(true, |s| s.violated))
        .count();
    Ok(BoundCheck {
        rate: violations as f64 / trials as f64,
        violations,
        failed,
        records,
        region,
        constants,
    })
}

/// `‖KRRᵀKᵀ − pKKᵀ‖_F²` sampled over fresh `R`, next to its exact mean
/// `p(‖K‖_F⁴ + ‖KKᵀ‖_F²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseMatrixStats {
    pub empirical_mean: f64,
    pub standard_error: f64,
    pub analytic: f64,
}

impl NoiseMatrixStats {
    pub fn relative_error(&self) -> f64 {
        if self.analytic == 0.0 {
            self.empirical_mean.abs()
        } else {
            (self.empirical_mean - self.analytic).abs() / self.analytic
        }
    }
}

pub fn noise_matrix_analytic(k: &DMatrix<f64>, p: usize) -> f64 {
    let kf2 = k.norm_squared();
    let kkt = k * k.transpose();
    p as f64 * (kf2 * kf2 + kkt.norm_squared())
}

const NOISE_CHUNK: usize = 1024;

pub fn noise_matrix_stats(k: &DMatrix<f64>, p: usize, trials: usize, seed: u64) -> NoiseMatrixStats {
    let analytic = noise_matrix_analytic(k, p);
    if trials == 0 {
        return NoiseMatrixStats { empirical_mean: f64::NAN, standard_error: f64::NAN, analytic };
    }
    let big_p = k.ncols();
    let expected = k * k.transpose() * p as f64;
    let chunks = trials.div_ceil(NOISE_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(derive_seed(seed, c as u64));
            let count = NOISE_CHUNK.min(trials - c * NOISE_CHUNK);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let r = gaussian_matrix(&mut rng, big_p, p);
                let kr = k * r;
                let noise = &kr * kr.transpose() - &expected;
                let f = noise.norm_squared();
                sum += f;
                sum_sq += f * f;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    NoiseMatrixStats { empirical_mean: mean, standard_error: (var / n).sqrt(), analytic }
}

/// How thresholds are compared against the loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Absolute,
    /// Threshold is a fraction of the iteration-0 loss.
    RelativeToInitial,
}

/// How the entries of `R` are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingScaling {
    /// iid unit Gaussian.
    Gaussian,
    /// Gaussian rows rescaled to squared norm exactly `p`, so `‖ρ‖² = p`
    /// holds deterministically in the `P = 1` case.
    RowNormalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearTradeoffConfig {
    pub ambient_dim: usize,
    pub projection_dim: usize,
    pub learning_rate: f64,
    pub p_grid: Vec<usize>,
    pub loss_thresholds: Vec<f64>,
    pub threshold_mode: ThresholdMode,
    pub trials: usize,
    pub max_iters: usize,
    pub master_seed: u64,
    /// Gaussian initialization (the default) or `θ₀ = 0`.
    pub gaussian_theta_init: bool,
    pub embedding: EmbeddingScaling,
}

impl Default for LinearTradeoffConfig {
    fn default() -> Self {
        Self {
            ambient_dim: 1000,
            projection_dim: 3,
            learning_rate: 1e-6,
            // Below about 7r the smallest eigenvalue of the projected flow
            // falls well short of p and steepens the tradeoff.
            p_grid: vec![20, 50, 100, 200],
            loss_thresholds: vec![100.0, 10.0, 1.0],
            threshold_mode: ThresholdMode::Absolute,
            trials: 5,
            max_iters: 1_000_000,
            master_seed: 101,
            gaussian_theta_init: true,
            embedding: EmbeddingScaling::Gaussian,
        }
    }
}

impl LinearTradeoffConfig {
    fn validate(&self) -> Result<()> {
        if self.ambient_dim == 0 || self.projection_dim == 0 || self.p_grid.contains(&0) {
            return Err(SubspaceError::Dimension("P, r and every p must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(SubspaceError::LearningRate(self.learning_rate));
        }
        if self.loss_thresholds.iter().any(|t| !(*t > 0.0)) {
            return Err(SubspaceError::Domain("loss thresholds must be positive".into()));
        }
        Ok(())
    }
}

/// Iterations-to-threshold of one trial: `[p index][threshold index]`,
/// `None` when the threshold was not reached within `max_iters`.
pub type TrialIterations = Vec<Vec<Option<usize>>>;

/// One trial of the discrete tradeoff experiment: `K`, `β₀`, `α*` (and
/// `θ₀` when Gaussian) are drawn once from `trial_seed` and shared by every
/// `p`; each `p` gets its own `R`. Plain gradient descent
/// `θ ← θ − η∇_θ‖K(Rθ + β₀) − α*‖²` runs until all thresholds are met.
pub fn linear_tradeoff_trial(config: &LinearTradeoffConfig, trial_seed: u64) -> Result<TrialIterations> {
    config.validate()?;
    let (big_p, r) = (config.ambient_dim, config.projection_dim);
    let mut rng = stream(trial_seed);
    let k = gaussian_matrix(&mut rng, r, big_p);
    let beta0 = gaussian_vector(&mut rng, big_p);
    let target = gaussian_vector(&mut rng, r);
    let offset = &k * &beta0;
    let eta = config.learning_rate;

    config
        .p_grid
        .iter()
        .map(|&p| {
            let mut prng = stream(derive_seed(trial_seed, p as u64));
            let mut embedding = gaussian_matrix(&mut prng, big_p, p);
            if config.embedding == EmbeddingScaling::RowNormalized {
                for mut row in embedding.row_iter_mut() {
                    let norm = row.norm();
                    if norm > 0.0 {
                        row *= (p as f64).sqrt() / norm;
                    }
                }
            }
            let mut theta = if config.gaussian_theta_init {
                gaussian_vector(&mut prng, p)
            } else {
                DVector::zeros(p)
            };
            let kr = &k * &embedding;

            let mut residual = &kr * &theta + &offset - &target;
            let initial = residual.norm_squared();
            let thresholds: Vec<f64> = config
                .loss_thresholds
                .iter()
                .map(|&t| match config.threshold_mode {
                    ThresholdMode::Absolute => t,
                    ThresholdMode::RelativeToInitial => t * initial,
                })
                .collect();
            let mut hits: Vec<Option<usize>> = vec![None; thresholds.len()];
            for iter in 0..=config.max_iters {
                let loss = residual.norm_squared();
                if !loss.is_finite() {
                    return Err(SubspaceError::Divergence { time: iter as f64 });
                }
                let mut pending = false;
                for (hit, &thr) in hits.iter_mut().zip(&thresholds) {
                    if hit.is_none() {
                        if loss <= thr {
                            *hit = Some(iter);
                        } else {
                            pending = true;
                        }
                    }
                }
                if !pending || iter == config.max_iters {
                    break;
                }
                theta -= kr.tr_mul(&residual) * (2.0 * eta);
                residual = &kr * &theta + &offset - &target;
            }
            Ok(hits)
        })
        .collect()
}

/// Runs `config.trials` trials (seeds derived from `master_seed`) and
/// returns one tradeoff curve per threshold.
pub fn linear_tradeoff_experiment(config: &LinearTradeoffConfig) -> Result<Vec<TradeoffCurve>> {
    config.validate()?;
    let per_trial: Vec<TrialIterations> = (0..config.trials)
        .into_par_iter()
        .map(|i| linear_tradeoff_trial(config, derive_seed(config.master_seed, i as u64)))
        .collect::<Result<_>>()?;
    Ok(tradeoff_curves_from_trials(config, &per_trial))
}

/// Aggregates per-trial iteration counts into one curve per threshold.
pub fn tradeoff_curves_from_trials(config: &LinearTradeoffConfig, per_trial: &[TrialIterations]) -> Vec<TradeoffCurve> {
    config
        .loss_thresholds
        .iter()
        .enumerate()
        .map(|(ti, &threshold)| {
            let samples: Vec<(f64, Vec<MinTime>)> = config
                .p_grid
                .iter()
                .enumerate()
                .map(|(pi, &p)| {
                    let times = per_trial
                        .iter()
                        .map(|trial| match trial[pi][ti] {
                            Some(it) => MinTime::Reached(it as f64),
                            None => MinTime::Censored,
                        })
                        .collect();
                    (p as f64, times)
                })
                .collect();
            TradeoffCurve::from_samples(threshold, samples)
        })
        .collect()
}
