use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scalinglab::config::resolve_output_dir;
use scalinglab::{run_experiment, ExperimentConfig, ExperimentKind, Result};

#[derive(Parser)]
#[command(name = "scalinglab", version, about = "Scale-time tradeoff experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run whichever experiment the config names.
    Run(RunArgs),
    /// Deviation bound and noise-matrix checks for subspace gradient flow.
    SubspaceVerify(RunArgs),
    /// Iterations-to-threshold across scales for the linear subspace model.
    LinearTradeoff(RunArgs),
    /// Closed-form error curve along time, scale or data.
    Ddcurve(RunArgs),
    /// Cross-scale and cross-time predictions against the closed form.
    Predict(RunArgs),
    /// Epochs-to-threshold across MLP widths.
    NnTradeoff(RunArgs),
    /// Final test error against training-set size.
    NnDataScan(RunArgs),
    /// Final test error under label noise.
    NnNoiseScan(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config; defaults are used for anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides SCALINGLAB_OUT and the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated seeds, e.g. 101,102,103.
    #[arg(long, value_delimiter = ',')]
    seed_list: Option<Vec<u64>>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    plots: bool,
}

fn build_config(kind: Option<ExperimentKind>, args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match (&args.config, kind) {
        (Some(path), _) => ExperimentConfig::from_path(path, kind)?,
        (None, Some(kind)) => ExperimentConfig::defaults(kind),
        (None, None) => return Err(scalinglab::HarnessError::Config("`run` needs --config".into())),
    };
    if let Some(seeds) = &args.seed_list {
        config.seeds = seeds.clone();
    }
    if args.plots {
        config.plots = true;
    }
    let env = std::env::var("SCALINGLAB_OUT").ok();
    config.output_dir = resolve_output_dir(&config.output_dir, env.as_deref(), args.out.as_deref());
    config.validate()?;
    Ok(config)
}

fn execute(kind: Option<ExperimentKind>, args: &RunArgs) -> Result<()> {
    let config = build_config(kind, args)?;
    let run = || run_experiment(&config);
    let summary = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| scalinglab::HarnessError::Config(format!("--threads: {e}")))?
            .install(run)?,
        None => run()?,
    };
    for f in &summary.files {
        println!("{}", summary.output_dir.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Run(a) => (None, a),
        Command::SubspaceVerify(a) => (Some(ExperimentKind::SubspaceVerify), a),
        Command::LinearTradeoff(a) => (Some(ExperimentKind::LinearTradeoff), a),
        Command::Ddcurve(a) => (Some(ExperimentKind::DdCurve), a),
        Command::Predict(a) => (Some(ExperimentKind::Predict), a),
        Command::NnTradeoff(a) => (Some(ExperimentKind::NnTradeoff), a),
        Command::NnDataScan(a) => (Some(ExperimentKind::NnDataScan), a),
        Command::NnNoiseScan(a) => (Some(ExperimentKind::NnNoiseScan), a),
    };
    match execute(kind, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
