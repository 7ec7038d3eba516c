//! Experiment configuration.
//!
//! A config is a TOML file with a few top-level keys and one table of
//! parameters for the chosen experiment:
//!
//! ```toml
//! experiment = "linear-tradeoff"
//! seeds = [101, 102, 103, 104, 105]
//! output_dir = "out/linear"
//! plots = true
//!
//! [linear_tradeoff]
//! p_grid = [20, 50, 100, 200]
//! ```
//!
//! Every parameter has a default. Unknown keys are rejected by name.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, HarnessError, Result};

pub const DEFAULT_SEEDS: [u64; 5] = [101, 102, 103, 104, 105];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    SubspaceVerify,
    LinearTradeoff,
    DdCurve,
    Predict,
    NnTradeoff,
    NnDataScan,
    NnNoiseScan,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::SubspaceVerify,
        ExperimentKind::LinearTradeoff,
        ExperimentKind::DdCurve,
        ExperimentKind::Predict,
        ExperimentKind::NnTradeoff,
        ExperimentKind::NnDataScan,
        ExperimentKind::NnNoiseScan,
    ];

    /// Name used for `experiment = ...` and as the CLI subcommand.
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SubspaceVerify => "subspace-verify",
            ExperimentKind::LinearTradeoff => "linear-tradeoff",
            ExperimentKind::DdCurve => "ddcurve",
            ExperimentKind::Predict => "predict",
            ExperimentKind::NnTradeoff => "nn-tradeoff",
            ExperimentKind::NnDataScan => "nn-data-scan",
            ExperimentKind::NnNoiseScan => "nn-noise-scan",
        }
    }

    /// Name of the parameter table.
    pub fn section(self) -> &'static str {
        match self {
            ExperimentKind::SubspaceVerify => "subspace_verify",
            ExperimentKind::LinearTradeoff => "linear_tradeoff",
            ExperimentKind::DdCurve => "ddcurve",
            ExperimentKind::Predict => "predict",
            ExperimentKind::NnTradeoff => "nn_tradeoff",
            ExperimentKind::NnDataScan => "nn_data_scan",
            ExperimentKind::NnNoiseScan => "nn_noise_scan",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let norm = name.to_ascii_lowercase().replace('_', "-");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| HarnessError::UnknownExperiment(name.to_string()))
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubspaceVerifyParams {
    pub ambient_dim: usize,
    pub projection_dim: usize,
    pub p_values: Vec<usize>,
    pub learning_rate: f64,
    pub horizon: f64,
    /// Euler step; derived from `stability_factor` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub stability_factor: f64,
    pub trials: usize,
    pub failure_prob: f64,
    pub noise_ambient_dim: usize,
    /// One random `K` per entry, with this many rows.
    pub noise_projection_dims: Vec<usize>,
    pub noise_p_values: Vec<usize>,
    /// 0 skips the noise-matrix check.
    pub noise_draws: usize,
}

impl Default for SubspaceVerifyParams {
    fn default() -> Self {
        Self {
            ambient_dim: 200,
            projection_dim: 3,
            p_values: vec![10, 20, 40],
            learning_rate: 1e-4,
            horizon: 1.0,
            dt: None,
            stability_factor: 0.01,
            trials: 200,
            failure_prob: 0.1,
            noise_ambient_dim: 20,
            noise_projection_dims: vec![1, 2, 3, 4, 5],
            noise_p_values: vec![2, 8, 32],
            noise_draws: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdModeParam {
    Absolute,
    Relative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaInitParam {
    Gaussian,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingParam {
    Gaussian,
    RowNormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearTradeoffParams {
    pub ambient_dim: usize,
    pub projection_dim: usize,
    pub learning_rate: f64,
    pub p_grid: Vec<usize>,
    pub loss_thresholds: Vec<f64>,
    pub threshold_mode: ThresholdModeParam,
    pub max_iters: usize,
    pub theta_init: ThetaInitParam,
    pub embedding: EmbeddingParam,
}

impl Default for LinearTradeoffParams {
    fn default() -> Self {
        Self {
            ambient_dim: 1000,
            projection_dim: 3,
            learning_rate: 1e-6,
            p_grid: vec![20, 50, 100, 200],
            loss_thresholds: vec![100.0, 10.0, 1.0],
            threshold_mode: ThresholdModeParam::Absolute,
            max_iters: 1_000_000,
            theta_init: ThetaInitParam::Gaussian,
            embedding: EmbeddingParam::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParam {
    Time,
    Scale,
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingParam {
    TimeOnly,
    TimeAndDimension,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdCurveParams {
    pub axis: AxisParam,
    /// Explicit grid; otherwise `grid_points` values from `grid_min` to
    /// `grid_max` (rounded to integers on the data axis and on the
    /// dimension-coupled scale axis).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub log_grid: bool,
    pub n: usize,
    pub m: usize,
    pub s_w: f64,
    pub s_eps: f64,
    pub learning_rate: f64,
    pub p: f64,
    pub t: f64,
    pub scale_coupling: CouplingParam,
    /// Fixed test point; the isotropic average is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_point: Option<Vec<f64>>,
    /// Explicit spectrum instead of sampled designs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_values: Option<Vec<f64>>,
}

impl Default for DdCurveParams {
    fn default() -> Self {
        Self {
            axis: AxisParam::Time,
            grid: None,
            grid_min: 1e-3,
            grid_max: 1e4,
            grid_points: 200,
            log_grid: true,
            n: 50,
            m: 50,
            s_w: 1.0,
            s_eps: 0.5,
            learning_rate: 1.0,
            p: 1.0,
            t: 1.0,
            scale_coupling: CouplingParam::TimeAndDimension,
            test_point: None,
            singular_values: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredictParams {
    pub n: usize,
    pub m: usize,
    pub s_w: f64,
    pub s_eps: f64,
    pub learning_rate: f64,
    /// Scale of the measured curve for the cross-scale prediction.
    pub source_scale: f64,
    /// Target scales are `source_scale · ratio`.
    pub scale_ratios: Vec<f64>,
    /// Both log grids hold `grid_points` values spaced `2^(1/steps_per_octave)`.
    pub grid_points: usize,
    pub steps_per_octave: usize,
    pub t_min: f64,
    /// Cross-time: scales start at `scale_min`, each trained to `t0`.
    pub scale_min: f64,
    pub t0: f64,
    pub target_scale: f64,
}

impl Default for PredictParams {
    fn default() -> Self {
        Self {
            n: 20,
            m: 30,
            s_w: 1.0,
            s_eps: 0.5,
            learning_rate: 0.01,
            source_scale: 1.0,
            scale_ratios: vec![2.0, 4.0, 8.0],
            grid_points: 512,
            steps_per_octave: 64,
            t_min: 0.01,
            scale_min: 1.0,
            t0: 10.0,
            target_scale: 4.0,
        }
    }
}

/// Where the network experiments get their data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataParams {
    pub classes: usize,
    pub dim: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub cluster_spread: f64,
    /// IDX files; when all four are set they replace the synthetic data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_images: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_labels: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_images: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_labels: Option<PathBuf>,
}

impl Default for DataParams {
    fn default() -> Self {
        Self {
            classes: 10,
            dim: 64,
            n_train: 2000,
            n_test: 1000,
            cluster_spread: 0.05,
            train_images: None,
            train_labels: None,
            test_images: None,
            test_labels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NnTradeoffParams {
    pub width_scales: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub threshold: f64,
    pub label_noise: f64,
    pub data: DataParams,
}

impl Default for NnTradeoffParams {
    fn default() -> Self {
        Self {
            width_scales: vec![1, 2, 5],
            epochs: 100,
            batch_size: 32,
            learning_rate: 0.01,
            threshold: 0.09,
            label_noise: 0.0,
            data: DataParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NnDataScanParams {
    pub width_scales: Vec<usize>,
    pub data_volumes: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub threshold: f64,
    pub data: DataParams,
}

impl Default for NnDataScanParams {
    fn default() -> Self {
        Self {
            width_scales: vec![1, 5],
            data_volumes: vec![100, 200, 500, 1000, 2000],
            epochs: 20,
            batch_size: 32,
            learning_rate: 0.01,
            threshold: 0.09,
            data: DataParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NnNoiseScanParams {
    pub width_scales: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub exclude_true_class: bool,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub data: DataParams,
}

impl Default for NnNoiseScanParams {
    fn default() -> Self {
        Self {
            width_scales: vec![1, 2, 5],
            noise_levels: vec![0.0, 0.2],
            exclude_true_class: false,
            epochs: 100,
            batch_size: 32,
            learning_rate: 0.01,
            data: DataParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    SubspaceVerify(SubspaceVerifyParams),
    LinearTradeoff(LinearTradeoffParams),
    DdCurve(DdCurveParams),
    Predict(PredictParams),
    NnTradeoff(NnTradeoffParams),
    NnDataScan(NnDataScanParams),
    NnNoiseScan(NnNoiseScanParams),
}

impl Experiment {
    pub fn defaults(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::SubspaceVerify => Experiment::SubspaceVerify(Default::default()),
            ExperimentKind::LinearTradeoff => Experiment::LinearTradeoff(Default::default()),
            ExperimentKind::DdCurve => Experiment::DdCurve(Default::default()),
            ExperimentKind::Predict => Experiment::Predict(Default::default()),
            ExperimentKind::NnTradeoff => Experiment::NnTradeoff(Default::default()),
            ExperimentKind::NnDataScan => Experiment::NnDataScan(Default::default()),
            ExperimentKind::NnNoiseScan => Experiment::NnNoiseScan(Default::default()),
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            Experiment::SubspaceVerify(_) => ExperimentKind::SubspaceVerify,
            Experiment::LinearTradeoff(_) => ExperimentKind::LinearTradeoff,
            Experiment::DdCurve(_) => ExperimentKind::DdCurve,
            Experiment::Predict(_) => ExperimentKind::Predict,
            Experiment::NnTradeoff(_) => ExperimentKind::NnTradeoff,
            Experiment::NnDataScan(_) => ExperimentKind::NnDataScan,
            Experiment::NnNoiseScan(_) => ExperimentKind::NnNoiseScan,
        }
    }

    fn from_section(kind: ExperimentKind, table: toml::Table) -> Result<Self> {
        let section = kind.section();
        Ok(match kind {
            ExperimentKind::SubspaceVerify => Experiment::SubspaceVerify(section_from(section, table)?),
            ExperimentKind::LinearTradeoff => Experiment::LinearTradeoff(section_from(section, table)?),
            ExperimentKind::DdCurve => Experiment::DdCurve(section_from(section, table)?),
            ExperimentKind::Predict => Experiment::Predict(section_from(section, table)?),
            ExperimentKind::NnTradeoff => Experiment::NnTradeoff(section_from(section, table)?),
            ExperimentKind::NnDataScan => Experiment::NnDataScan(section_from(section, table)?),
            ExperimentKind::NnNoiseScan => Experiment::NnNoiseScan(section_from(section, table)?),
        })
    }

    fn to_table(&self) -> toml::Table {
        let value = match self {
            Experiment::SubspaceVerify(p) => toml::Table::try_from(p),
            Experiment::LinearTradeoff(p) => toml::Table::try_from(p),
            Experiment::DdCurve(p) => toml::Table::try_from(p),
            Experiment::Predict(p) => toml::Table::try_from(p),
            Experiment::NnTradeoff(p) => toml::Table::try_from(p),
            Experiment::NnDataScan(p) => toml::Table::try_from(p),
            Experiment::NnNoiseScan(p) => toml::Table::try_from(p),
        };
        value.expect("parameter structs serialize to tables")
    }
}

/// Deserializes one parameter table, naming the offending key on failure.
fn section_from<T: DeserializeOwned>(section: &str, table: toml::Table) -> Result<T> {
    T::deserialize(toml::Value::Table(table)).map_err(|e| {
        let message = e.message().to_string();
        let key = message
            .strip_prefix("unknown field `")
            .and_then(|rest| rest.split('`').next())
            .map(|field| format!("{section}.{field}"))
            .unwrap_or_else(|| section.to_string());
        invalid(&key, message)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub plots: bool,
}

const TOP_LEVEL_KEYS: [&str; 5] = ["experiment", "seeds", "output_dir", "plots", "provenance"];

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self {
            experiment: Experiment::defaults(kind),
            seeds: DEFAULT_SEEDS.to_vec(),
            output_dir: PathBuf::from("out").join(kind.name()),
            plots: false,
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        self.experiment.kind()
    }

    /// Parses a config. When `expected` is given the `experiment` key may be
    /// omitted, and must agree with it if present.
    pub fn from_toml_str(text: &str, expected: Option<ExperimentKind>) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        let kind = match table.remove("experiment") {
            Some(toml::Value::String(name)) => {
                let kind = ExperimentKind::parse(&name)?;
                if let Some(exp) = expected {
                    if exp != kind {
                        return Err(invalid("experiment", format!("config is for `{kind}` but `{exp}` was requested")));
                    }
                }
                kind
            }
            Some(_) => return Err(invalid("experiment", "must be a string")),
            None => expected.ok_or_else(|| invalid("experiment", "missing"))?,
        };
        let mut config = Self::defaults(kind);

        for key in table.keys() {
            if TOP_LEVEL_KEYS.contains(&key.as_str()) || key == kind.section() {
                continue;
            }
            let reason = match ExperimentKind::ALL.iter().find(|k| k.section() == key) {
                Some(other) => format!("section belongs to `{other}`, not `{kind}`"),
                None => "unknown key".to_string(),
            };
            return Err(invalid(key, reason));
        }
        if let Some(v) = table.remove("seeds") {
            let seeds = v.as_array().ok_or_else(|| invalid("seeds", "must be an array of integers"))?;
            config.seeds = seeds
                .iter()
                .map(|s| s.as_integer().filter(|i| *i >= 0).map(|i| i as u64))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| invalid("seeds", "must be an array of nonnegative integers"))?;
        }
        if let Some(v) = table.remove("output_dir") {
            config.output_dir = PathBuf::from(v.as_str().ok_or_else(|| invalid("output_dir", "must be a string"))?);
        }
        if let Some(v) = table.remove("plots") {
            config.plots = v.as_bool().ok_or_else(|| invalid("plots", "must be a boolean"))?;
        }
        if let Some(v) = table.remove(kind.section()) {
            match v {
                toml::Value::Table(t) => config.experiment = Experiment::from_section(kind, t)?,
                _ => return Err(invalid(kind.section(), "must be a table")),
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path, expected: Option<ExperimentKind>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml_str(&text, expected)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(invalid("seeds", "must not be empty"));
        }
        Ok(())
    }

    /// The fully resolved config, followed by `extra` under `[provenance]`.
    pub fn to_toml_string(&self, provenance: Option<toml::Table>) -> String {
        let mut table = toml::Table::new();
        table.insert("experiment".into(), self.kind().name().into());
        table.insert("seeds".into(), toml::Value::Array(self.seeds.iter().map(|&s| (s as i64).into()).collect()));
        table.insert("output_dir".into(), self.output_dir.to_string_lossy().into_owned().into());
        table.insert("plots".into(), self.plots.into());
        table.insert(self.kind().section().into(), toml::Value::Table(self.experiment.to_table()));
        if let Some(p) = provenance {
            table.insert("provenance".into(), toml::Value::Table(p));
        }
        toml::to_string(&table).expect("config tables serialize")
    }
}

/// `--out` beats `SCALINGLAB_OUT`, which beats the config file.
pub fn resolve_output_dir(config_dir: &Path, env_dir: Option<&str>, cli_dir: Option<&Path>) -> PathBuf {
    match (cli_dir, env_dir) {
        (Some(cli), _) => cli.to_path_buf(),
        (None, Some(env)) if !env.is_empty() => PathBuf::from(env),
        _ => config_dir.to_path_buf(),
    }
}
