#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use scalinglab::{ExperimentConfig, ExperimentKind};

/// A seconds-scale config for every experiment.
pub fn tiny_toml(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::SubspaceVerify => {
            "[subspace_verify]\nambient_dim = 40\np_values = [6, 12]\ntrials = 4\nnoise_ambient_dim = 6\n\
             noise_projection_dims = [1, 2]\nnoise_p_values = [2, 4]\nnoise_draws = 500\n"
        }
        ExperimentKind::LinearTradeoff => {
            "[linear_tradeoff]\nambient_dim = 60\np_grid = [6, 12, 24]\nloss_thresholds = [0.5, 0.1]\n\
             threshold_mode = \"relative\"\nlearning_rate = 1e-4\nmax_iters = 200000\n"
        }
        ExperimentKind::DdCurve => "[ddcurve]\nn = 8\nm = 6\ngrid_points = 12\n",
        ExperimentKind::Predict => {
            "[predict]\nn = 6\nm = 8\ngrid_points = 40\nsteps_per_octave = 8\nscale_ratios = [2.0, 4.0]\n"
        }
        ExperimentKind::NnTradeoff => {
            "[nn_tradeoff]\nwidth_scales = [1, 2]\nepochs = 3\nthreshold = 0.2\n\
             [nn_tradeoff.data]\nn_train = 60\nn_test = 30\ndim = 8\nclasses = 3\ncluster_spread = 0.3\n"
        }
        ExperimentKind::NnDataScan => {
            "[nn_data_scan]\nwidth_scales = [1, 2]\ndata_volumes = [20, 40]\nepochs = 2\nthreshold = 0.3\n\
             [nn_data_scan.data]\nn_train = 40\nn_test = 30\ndim = 8\nclasses = 3\n"
        }
        ExperimentKind::NnNoiseScan => {
            "[nn_noise_scan]\nwidth_scales = [1, 2]\nnoise_levels = [0.0, 0.3]\nepochs = 2\n\
             [nn_noise_scan.data]\nn_train = 40\nn_test = 30\ndim = 8\nclasses = 3\n"
        }
    }
}

pub fn tiny_config(kind: ExperimentKind, out: &Path) -> ExperimentConfig {
    let text = format!("experiment = \"{}\"\nseeds = [101, 102]\n{}", kind.name(), tiny_toml(kind));
    let mut c = ExperimentConfig::from_toml_str(&text, None).unwrap();
    c.output_dir = out.to_path_buf();
    c
}

/// Every CSV in `dir`, by file name.
pub fn csv_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}
