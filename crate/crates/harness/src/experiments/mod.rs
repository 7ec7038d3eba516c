//! One runner per experiment. Each writes its CSVs (and plots, if asked)
//! through an [`Outputs`] collector.

mod analytic;
mod network;
mod subspace;

pub use analytic::{build_grid, cross_scale_predictions, cross_time_predictions, PredictionRow};
pub use network::{load_data, train_width};

use std::path::{Path, PathBuf};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::output::{emit_csv, AggregateSeries, CsvTable};
use crate::plot::{emit_svg_plot, AxesSpec};

/// Files written so far, relative to the output directory.
pub struct Outputs {
    dir: PathBuf,
    plots: bool,
    pub files: Vec<String>,
    pub metadata: toml::Table,
}

impl Outputs {
    pub fn new(dir: &Path, plots: bool) -> Self {
        Self { dir: dir.to_path_buf(), plots, files: Vec::new(), metadata: toml::Table::new() }
    }

    pub fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        emit_csv(table, &self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes the plot only when plots are enabled.
    pub fn plot(&mut self, name: &str, series: &[AggregateSeries], axes: &AxesSpec) -> Result<()> {
        if !self.plots {
            return Ok(());
        }
        emit_svg_plot(series, axes, &self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

pub fn dispatch(config: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let seeds = &config.seeds;
    match &config.experiment {
        Experiment::SubspaceVerify(p) => subspace::subspace_verify(p, seeds, out),
        Experiment::LinearTradeoff(p) => subspace::linear_tradeoff(p, seeds, out),
        Experiment::DdCurve(p) => analytic::ddcurve(p, seeds, out),
        Experiment::Predict(p) => analytic::predict(p, seeds, out),
        Experiment::NnTradeoff(p) => network::nn_tradeoff(p, seeds, out),
        Experiment::NnDataScan(p) => network::nn_data_scan(p, seeds, out),
        Experiment::NnNoiseScan(p) => network::nn_noise_scan(p, seeds, out),
    }
}
