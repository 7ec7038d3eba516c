//! Linear student-teacher regression under gradient flow.
//!
//! Labels come from a hidden teacher, `Y = Xw + ε`. Gradient flow on the
//! squared error from `θ₀ = 0` has the closed form
//! `θ_t = X†(I − exp(−ηXXᵀt))Y`, evaluated here through the SVD
//! `X = UΣVᵀ`. On a test point `x` the prediction error splits per
//! singular direction into a decaying signal part and a growing noise part:
//!
//! ```text
//! xᵀθ_t − xᵀw = Σᵢ Sᵢ·exp(−ησᵢ²t) + Nᵢ·(1 − exp(−ησᵢ²t))/σᵢ
//! Sᵢ = −(xᵀV)ᵢ(Vᵀw)ᵢ,   Nᵢ = (xᵀV)ᵢ(Uᵀε)ᵢ
//! ```
//!
//! with the noise factor taken as 0 along directions where `σᵢ = 0`.
//! Averaging over isotropic Gaussian `w` and `ε` gives the expected squared
//! error in closed form; replacing `t` by `p·t` gives the unified error law
//! in model scale and training time.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

use crate::linalg::FullSvd;
use crate::rng::{derive_seed, gaussian_matrix, gaussian_vector, stream};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DoubleDescentError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("{0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, DoubleDescentError>;

/// Where the test point comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum XMode {
    Fixed(DVector<f64>),
    /// `x ~ N(0, I)`, so every `(xᵀV)ᵢ²` is replaced by its mean, 1.
    IsotropicAverage,
}

/// Teacher and noise scales: `w ~ N(0, s_w²I)`, `ε ~ N(0, s_eps²I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    pub s_w: f64,
    pub s_eps: f64,
    pub x_mode: XMode,
}

impl PriorSpec {
    pub fn isotropic(s_w: f64, s_eps: f64) -> Self {
        Self { s_w, s_eps, x_mode: XMode::IsotropicAverage }
    }

    fn validate(&self) -> Result<()> {
        if !(self.s_w.is_finite() && self.s_eps.is_finite() && self.s_w >= 0.0 && self.s_eps >= 0.0) {
            return Err(DoubleDescentError::Domain("prior scales must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(DoubleDescentError::NegativeTime(t))
    }
}

/// `(1 − e^{−ησ²t})/σ`, defined as 0 for `σ = 0`.
fn noise_gain(sigma: f64, eta: f64, t: f64) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        -(-eta * sigma * sigma * t).exp_m1() / sigma
    }
}

/// One training set `(X, w, ε, Y)` with its cached full SVD.
#[derive(Debug, Clone)]
pub struct StudentTeacherInstance {
    pub x: DMatrix<f64>,
    pub w: DVector<f64>,
    pub noise: DVector<f64>,
    pub y: DVector<f64>,
    pub learning_rate: f64,
    pub svd: FullSvd,
}

impl StudentTeacherInstance {
    /// `X` with iid unit-Gaussian entries, then `w`, then `ε`, all from
    /// the stream of `seed`.
    pub fn sample(n: usize, m: usize, prior: &PriorSpec, learning_rate: f64, seed: u64) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(DoubleDescentError::Dimension("n and m must be at least 1".into()));
        }
        prior.validate()?;
        let mut rng = stream(seed);
        let x = gaussian_matrix(&mut rng, n, m);
        let w = gaussian_vector(&mut rng, m) * prior.s_w;
        let noise = gaussian_vector(&mut rng, n) * prior.s_eps;
        Self::from_parts(x, w, noise, learning_rate)
    }

    pub fn from_parts(x: DMatrix<f64>, w: DVector<f64>, noise: DVector<f64>, learning_rate: f64) -> Result<Self> {
        let (n, m) = x.shape();
        if w.len() != m || noise.len() != n {
            return Err(DoubleDescentError::Dimension(format!(
                "X is {n}×{m} but w has length {} and ε has length {}",
                w.len(),
                noise.len()
            )));
        }
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            return Err(DoubleDescentError::Domain(format!("learning rate must be positive, got {learning_rate}")));
        }
        let y = &x * &w + &noise;
        let svd = FullSvd::new(&x);
        Ok(Self { x, w, noise, y, learning_rate, svd })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn m(&self) -> usize {
        self.x.ncols()
    }

    /// Singular values padded to length `m`; values within rounding of
    /// zero are set to exactly 0.
    pub fn sigma_ext(&self) -> DVector<f64> {
        let tol = self.svd.rank_tolerance();
        self.svd.extended_singular_values().map(|s| if s > tol { s } else { 0.0 })
    }

    /// `θ_t = V Σ† (I − e^{−ηΣΣᵀt}) Uᵀ Y`.
    pub fn theta_at(&self, t: f64) -> Result<DVector<f64>> {
        check_time(t)?;
        let sigma = self.sigma_ext();
        let uty = self.svd.u.tr_mul(&self.y);
        let mut theta = DVector::zeros(self.m());
        for i in 0..self.n().min(self.m()) {
            let g = noise_gain(sigma[i], self.learning_rate, t);
            if g != 0.0 {
                theta.axpy(g * uty[i], &self.svd.v.column(i), 1.0);
            }
        }
        Ok(theta)
    }

    fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.m() {
            return Err(DoubleDescentError::Dimension(format!(
                "test point has length {} but the model has {} parameters",
                x.len(),
                self.m()
            )));
        }
        Ok(())
    }

    /// `xᵀθ_t − xᵀw`.
    pub fn prediction_error_at(&self, x: &DVector<f64>, t: f64) -> Result<f64> {
        self.check_point(x)?;
        Ok(x.dot(&self.theta_at(t)?) - x.dot(&self.w))
    }

    pub fn signal_noise_coeffs(&self, x: &DVector<f64>) -> Result<SignalNoiseCoeffs> {
        self.check_point(x)?;
        let sigma_ext = self.sigma_ext();
        let xv = self.svd.v.tr_mul(x);
        let vw = self.svd.v.tr_mul(&self.w);
        let ue = self.svd.u.tr_mul(&self.noise);
        let m = self.m();
        let signal = DVector::from_fn(m, |i, _| -xv[i] * vw[i]);
        let noise = DVector::from_fn(m, |i, _| {
            if i < self.n() && sigma_ext[i] > 0.0 {
                xv[i] * ue[i]
            } else {
                0.0
            }
        });
        Ok(SignalNoiseCoeffs { test_point: x.clone(), signal, noise, sigma_ext })
    }

    /// `(xᵀV)ᵢ²` for a fixed point, all ones for the isotropic average.
    pub fn xv_sq(&self, mode: &XMode) -> Result<DVector<f64>> {
        match mode {
            XMode::IsotropicAverage => Ok(DVector::from_element(self.m(), 1.0)),
            XMode::Fixed(x) => {
                self.check_point(x)?;
                Ok(self.svd.v.tr_mul(x).map(|v| v * v))
            }
        }
    }

    /// `Xᵀ(Xθ − Y)`, the gradient of `½‖Xθ − Y‖²`.
    pub fn loss_gradient(&self, theta: &DVector<f64>) -> DVector<f64> {
        self.x.tr_mul(&(&self.x * theta - &self.y))
    }
}

/// Per-direction coefficients of the prediction-error expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalNoiseCoeffs {
    pub test_point: DVector<f64>,
    /// `Sᵢ = −(xᵀV)ᵢ(Vᵀw)ᵢ`
    pub signal: DVector<f64>,
    /// `Nᵢ = (xᵀV)ᵢ(Uᵀε)ᵢ`, zero where `σᵢ = 0`.
    pub noise: DVector<f64>,
    pub sigma_ext: DVector<f64>,
}

impl SignalNoiseCoeffs {
    /// Evaluates the expansion `Σ Sᵢe^{−ησᵢ²t} + Nᵢ(1 − e^{−ησᵢ²t})/σᵢ`.
    pub fn prediction_error(&self, learning_rate: f64, t: f64) -> f64 {
        (0..self.signal.len())
            .map(|i| {
                let s = self.sigma_ext[i];
                self.signal[i] * (-learning_rate * s * s * t).exp() + self.noise[i] * noise_gain(s, learning_rate, t)
            })
            .sum()
    }
}

/// Expected squared error split into its two components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTerms {
    pub total: f64,
    pub signal_sq: f64,
    pub noise_sq: f64,
}

/// ```text
/// signal² = s_w²·Σ (xᵀV)ᵢ²·e^{−2ησᵢ²t}
/// noise²  = s_eps²·Σ_{σᵢ>0} (xᵀV)ᵢ²·(1 − e^{−ησᵢ²t})²/σᵢ²
/// ```
pub fn expected_error_closed_form(
    sigma_ext: &DVector<f64>,
    xv_sq: &DVector<f64>,
    prior: &PriorSpec,
    learning_rate: f64,
    t: f64,
) -> Result<ErrorTerms> {
    check_time(t)?;
    if sigma_ext.len() != xv_sq.len() {
        return Err(DoubleDescentError::Dimension(format!(
            "{} singular values but {} projection weights",
            sigma_ext.len(),
            xv_sq.len()
        )));
    }
    let (mut signal, mut noise) = (0.0, 0.0);
    for (&s, &weight) in sigma_ext.iter().zip(xv_sq.iter()) {
        let decay = learning_rate * s * s * t;
        signal += weight * (-2.0 * decay).exp();
        let g = noise_gain(s, learning_rate, t);
        noise += weight * g * g;
    }
    let signal_sq = prior.s_w * prior.s_w * signal;
    let noise_sq = prior.s_eps * prior.s_eps * noise;
    Ok(ErrorTerms { total: signal_sq + noise_sq, signal_sq, noise_sq })
}

/// The closed form evaluated at time `p·t`.
pub fn unified_error(
    sigma_ext: &DVector<f64>,
    xv_sq: &DVector<f64>,
    prior: &PriorSpec,
    learning_rate: f64,
    p: f64,
    t: f64,
) -> Result<ErrorTerms> {
    if !(p > 0.0) {
        return Err(DoubleDescentError::NonPositiveScale(p));
    }
    check_time(t)?;
    expected_error_closed_form(sigma_ext, xv_sq, prior, learning_rate, p * t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    /// One entry per requested time.
    pub estimate: Vec<f64>,
    pub standard_error: Vec<f64>,
    pub draws: usize,
}

/// Monte-Carlo estimate of `E[(xᵀθ_t − xᵀw)²]` over fresh `(w, ε)` (and
/// fresh `x` under the isotropic average) with `X` fixed by `seed`.
///
/// `X` is drawn exactly as in [`StudentTeacherInstance::sample`]. The
/// flow solution is formed from `pinv(X)` and an eigendecomposition of
/// `XXᵀ`, independently of the SVD path used by the closed form.
pub fn expected_error_monte_carlo(
    n: usize,
    m: usize,
    prior: &PriorSpec,
    learning_rate: f64,
    times: &[f64],
    draws: usize,
    seed: u64,
) -> Result<McEstimate> {
    if draws < 2 {
        return Err(DoubleDescentError::Domain("need at least two draws".into()));
    }
    if n == 0 || m == 0 {
        return Err(DoubleDescentError::Dimension("n and m must be at least 1".into()));
    }
    prior.validate()?;
    for &t in times {
        check_time(t)?;
    }
    if let XMode::Fixed(x) = &prior.x_mode {
        if x.len() != m {
            return Err(DoubleDescentError::Dimension(format!("test point length {} ≠ m = {m}", x.len())));
        }
    }
    let x_mat = gaussian_matrix(&mut stream(seed), n, m);
    let pinv = x_mat
        .clone()
        .pseudo_inverse(1e-12 * x_mat.norm().max(1.0))
        .map_err(|e| DoubleDescentError::Domain(e.to_string()))?;
    let eig = SymmetricEigen::new(&x_mat * x_mat.transpose());
    // Maps Y to θ_t for each requested time.
    let solution_maps: Vec<DMatrix<f64>> = times
        .iter()
        .map(|&t| {
            let shrink = eig.eigenvalues.map(|lam| -(-learning_rate * lam.max(0.0) * t).exp_m1());
            let filter = &eig.eigenvectors * DMatrix::from_diagonal(&shrink) * eig.eigenvectors.transpose();
            &pinv * filter
        })
        .collect();

    let mut rng = stream(derive_seed(seed, 0xd7a3));
    let mut sums = vec![0.0; times.len()];
    let mut sums_sq = vec![0.0; times.len()];
    for _ in 0..draws {
        let w = gaussian_vector(&mut rng, m) * prior.s_w;
        let eps = gaussian_vector(&mut rng, n) * prior.s_eps;
        let x = match &prior.x_mode {
            XMode::Fixed(x) => x.clone(),
            XMode::IsotropicAverage => gaussian_vector(&mut rng, m),
        };
        let y = &x_mat * &w + eps;
        let xw = x.dot(&w);
        for (k, map) in solution_maps.iter().enumerate() {
            let e = x.dot(&(map * &y)) - xw;
            sums[k] += e * e;
            sums_sq[k] += e * e * e * e;
        }
    }
    let nd = draws as f64;
    let estimate: Vec<f64> = sums.iter().map(|s| s / nd).collect();
    let standard_error = estimate
        .iter()
        .zip(&sums_sq)
        .map(|(&mean, &sq)| (((sq - nd * mean * mean) / (nd - 1.0)).max(0.0) / nd).sqrt())
        .collect();
    Ok(McEstimate { estimate, standard_error, draws })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanAxis {
    Time,
    Scale,
    Data,
}

impl ScanAxis {
    pub fn name(self) -> &'static str {
        match self {
            ScanAxis::Time => "time",
            ScanAxis::Scale => "scale",
            ScanAxis::Data => "data",
        }
    }
}

/// How the swept scale `p` enters a scale-axis scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleCoupling {
    /// Fixed spectrum, evaluated at time `p·t`.
    TimeOnly,
    /// The model has `m = p` parameters (the first `p` columns of one
    /// `n × max(grid)` design) and is evaluated at time `p·t`.
    TimeAndDimension,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumSource {
    /// Gaussian designs, one per seed; curves are averaged over seeds.
    Sampled { seeds: Vec<u64> },
    /// Explicit singular values (padded with zeros to `m`).
    Given(DVector<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSettings {
    pub n: usize,
    pub m: usize,
    pub prior: PriorSpec,
    pub learning_rate: f64,
    /// Scale used when the axis is not `Scale`.
    pub p: f64,
    /// Time used when the axis is not `Time`.
    pub t: f64,
    pub spectrum: SpectrumSource,
    pub scale_coupling: ScaleCoupling,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            n: 50,
            m: 50,
            prior: PriorSpec::isotropic(1.0, 0.5),
            learning_rate: 1.0,
            p: 1.0,
            t: 1.0,
            spectrum: SpectrumSource::Sampled { seeds: vec![101, 102, 103, 104, 105] },
            scale_coupling: ScaleCoupling::TimeAndDimension,
        }
    }
}

/// Sampled error trajectory along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub axis: ScanAxis,
    pub grid: Vec<f64>,
    pub total_sq_error: Vec<f64>,
    pub signal_sq: Vec<f64>,
    pub noise_sq: Vec<f64>,
    pub metadata: Vec<(String, String)>,
}

impl ErrorCurve {
    /// Indices `i` with `total[i-1] < total[i] > total[i+1]`.
    pub fn interior_local_maxima(&self) -> Vec<usize> {
        let y = &self.total_sq_error;
        (1..y.len().saturating_sub(1)).filter(|&i| y[i] > y[i - 1] && y[i] > y[i + 1]).collect()
    }
}

fn validate_grid(grid: &[f64], integral: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(DoubleDescentError::Grid("empty grid".into()));
    }
    if grid.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
        return Err(DoubleDescentError::Grid("grid values must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(DoubleDescentError::Grid("grid must be strictly increasing".into()));
    }
    if integral && grid.iter().any(|g| g.fract() != 0.0) {
        return Err(DoubleDescentError::Grid("grid values must be integers on this axis".into()));
    }
    Ok(())
}

fn xv_sq_for(svd_v: &DMatrix<f64>, mode: &XMode) -> Result<DVector<f64>> {
    match mode {
        XMode::IsotropicAverage => Ok(DVector::from_element(svd_v.ncols(), 1.0)),
        XMode::Fixed(x) => {
            let m = svd_v.nrows();
            if x.len() < m {
                return Err(DoubleDescentError::Dimension(format!(
                    "test point has length {} but {m} coordinates are needed",
                    x.len()
                )));
            }
            Ok(svd_v.tr_mul(&x.rows(0, m).into_owned()).map(|v| v * v))
        }
    }
}

/// `(σ_ext, xv_sq)` of an `n × m` Gaussian design.
fn sampled_spectrum(x: &DMatrix<f64>, mode: &XMode) -> Result<(DVector<f64>, DVector<f64>)> {
    let svd = FullSvd::new(x);
    let tol = svd.rank_tolerance();
    let sigma = svd.extended_singular_values().map(|s| if s > tol { s } else { 0.0 });
    Ok((sigma, xv_sq_for(&svd.v, mode)?))
}

/// Sweeps time, scale or data volume and records the expected squared
/// error with its signal/noise split, averaged over spectrum seeds.
pub fn scan_curve(axis: ScanAxis, grid: &[f64], settings: &ScanSettings) -> Result<ErrorCurve> {
    let integral = matches!(axis, ScanAxis::Data)
        || (axis == ScanAxis::Scale && settings.scale_coupling == ScaleCoupling::TimeAndDimension);
    validate_grid(grid, integral)?;
    settings.prior.validate()?;
    check_time(settings.t)?;
    if !(settings.p > 0.0) {
        return Err(DoubleDescentError::NonPositiveScale(settings.p));
    }
    let (prior, eta) = (&settings.prior, settings.learning_rate);

    // One entry per spectrum seed, each holding one ErrorTerms per grid point.
    let per_spectrum: Vec<Vec<ErrorTerms>> = match (&settings.spectrum, axis) {
        (SpectrumSource::Given(sigma), ScanAxis::Time | ScanAxis::Scale)
            if !(axis == ScanAxis::Scale && settings.scale_coupling == ScaleCoupling::TimeAndDimension) =>
        {
            let m = settings.m.max(sigma.len());
            let sigma = DVector::from_fn(m, |i, _| sigma.get(i).copied().unwrap_or(0.0));
            let xv_sq = match &prior.x_mode {
                XMode::IsotropicAverage => DVector::from_element(m, 1.0),
                XMode::Fixed(_) => {
                    return Err(DoubleDescentError::Domain(
                        "a given spectrum has no singular vectors; use the isotropic average".into(),
                    ))
                }
            };
            vec![fixed_spectrum_scan(axis, grid, &sigma, &xv_sq, settings)?]
        }
        (SpectrumSource::Given(_), _) => {
            return Err(DoubleDescentError::Domain(
                "this axis redraws the design per grid point and needs a sampled spectrum".into(),
            ))
        }
        (SpectrumSource::Sampled { seeds }, _) => {
            if seeds.is_empty() {
                return Err(DoubleDescentError::Domain("need at least one spectrum seed".into()));
            }
            seeds
                .iter()
                .map(|&seed| match axis {
                    ScanAxis::Time => {
                        let x = gaussian_matrix(&mut stream(seed), settings.n, settings.m);
                        let (sigma, xv) = sampled_spectrum(&x, &prior.x_mode)?;
                        fixed_spectrum_scan(axis, grid, &sigma, &xv, settings)
                    }
                    ScanAxis::Scale => match settings.scale_coupling {
                        ScaleCoupling::TimeOnly => {
                            let x = gaussian_matrix(&mut stream(seed), settings.n, settings.m);
                            let (sigma, xv) = sampled_spectrum(&x, &prior.x_mode)?;
                            fixed_spectrum_scan(axis, grid, &sigma, &xv, settings)
                        }
                        ScaleCoupling::TimeAndDimension => {
                            let m_max = *grid.last().unwrap() as usize;
                            let full = gaussian_matrix(&mut stream(seed), settings.n, m_max);
                            grid.iter()
                                .map(|&p| {
                                    let x = full.columns(0, p as usize).into_owned();
                                    let (sigma, xv) = sampled_spectrum(&x, &prior.x_mode)?;
                                    unified_error(&sigma, &xv, prior, eta, p, settings.t)
                                })
                                .collect()
                        }
                    },
                    ScanAxis::Data => grid
                        .iter()
                        .map(|&n| {
                            let x = gaussian_matrix(&mut stream(derive_seed(seed, n as u64)), n as usize, settings.m);
                            let (sigma, xv) = sampled_spectrum(&x, &prior.x_mode)?;
                            unified_error(&sigma, &xv, prior, eta, settings.p, settings.t)
                        })
                        .collect(),
                })
                .collect::<Result<_>>()?
        }
    };

    let k = per_spectrum.len() as f64;
    let mean = |f: fn(&ErrorTerms) -> f64| -> Vec<f64> {
        (0..grid.len()).map(|i| per_spectrum.iter().map(|c| f(&c[i])).sum::<f64>() / k).collect()
    };
    let signal_sq = mean(|e| e.signal_sq);
    let noise_sq = mean(|e| e.noise_sq);
    let total_sq_error = signal_sq.iter().zip(&noise_sq).map(|(s, n)| s + n).collect();

    let mut metadata = vec![
        ("axis".to_string(), axis.name().to_string()),
        ("n".to_string(), settings.n.to_string()),
        ("m".to_string(), settings.m.to_string()),
        ("s_w".to_string(), settings.prior.s_w.to_string()),
        ("s_eps".to_string(), settings.prior.s_eps.to_string()),
        ("learning_rate".to_string(), eta.to_string()),
        ("p".to_string(), settings.p.to_string()),
        ("t".to_string(), settings.t.to_string()),
        ("prior_family".to_string(), "isotropic Gaussian w and noise (modelling choice)".to_string()),
    ];
    metadata.push((
        "x_mode".to_string(),
        match prior.x_mode {
            XMode::Fixed(_) => "fixed".to_string(),
            XMode::IsotropicAverage => "isotropic_average".to_string(),
        },
    ));
    if let SpectrumSource::Sampled { seeds } = &settings.spectrum {
        let list: Vec<String> = seeds.iter().map(u64::to_string).collect();
        metadata.push(("spectrum_seeds".to_string(), list.join(" ")));
    }
    if axis == ScanAxis::Scale {
        let coupling = match settings.scale_coupling {
            ScaleCoupling::TimeOnly => "time_only",
            ScaleCoupling::TimeAndDimension => "time_and_dimension",
        };
        metadata.push(("scale_coupling".to_string(), coupling.to_string()));
    }

    Ok(ErrorCurve { axis, grid: grid.to_vec(), total_sq_error, signal_sq, noise_sq, metadata })
}

fn fixed_spectrum_scan(
    axis: ScanAxis,
    grid: &[f64],
    sigma: &DVector<f64>,
    xv_sq: &DVector<f64>,
    settings: &ScanSettings,
) -> Result<Vec<ErrorTerms>> {
    grid.iter()
        .map(|&g| {
            let (p, t) = match axis {
                ScanAxis::Time => (settings.p, g),
                _ => (g, settings.t),
            };
            unified_error(sigma, xv_sq, &settings.prior, settings.learning_rate, p, t)
        })
        .collect()
}

/// `θ_t` of a two-parameter model on each grid time.
pub fn trajectory_2d(inst: &StudentTeacherInstance, t_grid: &[f64]) -> Result<Vec<[f64; 2]>> {
    if inst.m() != 2 {
        return Err(DoubleDescentError::Dimension(format!("need m = 2, got m = {}", inst.m())));
    }
    t_grid
        .iter()
        .map(|&t| inst.theta_at(t).map(|th| [th[0], th[1]]))
        .collect()
}
