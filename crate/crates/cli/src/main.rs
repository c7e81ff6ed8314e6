use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;

use config::RunConfig;

/// Signature conformance anomaly detection.
#[derive(Parser, Debug)]
#[command(name = "sigconform", version, about)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for batch scoring (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DatasetKind {
    Pendigits,
    Ucr,
    Ais,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Experiment {
    Pendigits,
    Ucr,
}

/// Signature pipeline flags shared by `fit` and `reproduce`.
#[derive(clap::Args, Debug, Default)]
pub struct PipelineArgs {
    /// Signature truncation order N.
    #[arg(long)]
    order: Option<usize>,
    /// Comma-separated transforms: time, time-diff, lead-lag, invisibility.
    #[arg(long, value_delimiter = ',')]
    transforms: Option<Vec<String>>,
    /// none, per-stream or corpus.
    #[arg(long)]
    normalization: Option<String>,
    #[arg(long)]
    spectral_cutoff: Option<f64>,
    #[arg(long)]
    null_tolerance: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a raw dataset into stream files plus a manifest.
    Prepare {
        kind: DatasetKind,
        /// PenDigits file or directory, UCR directory, or AIS CSV.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// UCR dataset name, e.g. `Trace`.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        normal_class: Option<String>,
        #[arg(long)]
        anomaly_rate: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// AIS sub-stream length in metres.
        #[arg(long)]
        segment_length: Option<f64>,
    },
    /// Fit a conformance model on a corpus stream file.
    Fit {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Attach split-half calibration to a fitted model.
    Calibrate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score a stream file against a model.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        streams: PathBuf,
        /// Score file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate normal vs anomalous score files.
    Eval {
        #[arg(long)]
        normal: PathBuf,
        #[arg(long)]
        anomaly: PathBuf,
        /// auc or balanced-accuracy.
        #[arg(long, default_value = "auc")]
        metric: String,
        /// Bootstrap resamples for the standard error (0 disables).
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write both ECDFs here as delimited text.
        #[arg(long)]
        ecdf_out: Option<PathBuf>,
    },
    /// Run a full evaluation protocol and print a results table.
    Reproduce {
        experiment: Experiment,
        /// PenDigits directory or UCR directory.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Signature orders for PenDigits, e.g. `1..5`.
        #[arg(long)]
        orders: Option<String>,
        /// UCR dataset names (default: every `*_TRAIN` file in the directory).
        #[arg(long, value_delimiter = ',')]
        datasets: Option<Vec<String>>,
        #[arg(long)]
        anomaly_rate: Option<f64>,
        /// Split seeds for UCR, e.g. `0-9`.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        bootstrap: Option<usize>,
        /// JSON results file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] sigconform::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_config_error() => 2,
            _ => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(w) = cli.workers {
        cfg.workers = Some(w);
    }
    if let Some(w) = cfg.workers {
        if w == 0 {
            return Err(CliError::Config("workers must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Prepare {
            kind,
            input,
            out_dir,
            name,
            normal_class,
            anomaly_rate,
            seed,
            segment_length,
        } => {
            cfg.seed = seed.or(cfg.seed);
            cfg.anomaly_rate = anomaly_rate.or(cfg.anomaly_rate);
            if let Some(d) = segment_length {
                cfg.ais.params.segment_length_m = d;
            }
            commands::prepare(&cfg, kind, &input, &out_dir, name.as_deref(), normal_class)
        }
        Command::Fit {
            corpus,
            out,
            pipeline,
        } => {
            apply_pipeline_args(&mut cfg, pipeline);
            commands::fit(&cfg, &corpus, &out)
        }
        Command::Calibrate {
            model,
            out,
            epsilon,
            seed,
        } => {
            cfg.epsilon = epsilon.or(cfg.epsilon);
            cfg.seed = seed.or(cfg.seed);
            commands::calibrate(&cfg, &model, &out)
        }
        Command::Score {
            model,
            streams,
            out,
        } => commands::score(&model, &streams, out.as_deref()),
        Command::Eval {
            normal,
            anomaly,
            metric,
            bootstrap,
            seed,
            ecdf_out,
        } => {
            cfg.bootstrap = bootstrap.or(cfg.bootstrap);
            cfg.seed = seed.or(cfg.seed);
            commands::eval(&cfg, &normal, &anomaly, &metric, ecdf_out.as_deref())
        }
        Command::Reproduce {
            experiment,
            data,
            orders,
            datasets,
            anomaly_rate,
            seeds,
            bootstrap,
            out,
        } => {
            cfg.data = data.or(cfg.data);
            if let Some(o) = orders {
                let list = config::parse_list(&o).map_err(CliError::Config)?;
                cfg.orders = Some(list.into_iter().map(|v| v as usize).collect());
            }
            if let Some(s) = seeds {
                cfg.seeds = Some(config::parse_list(&s).map_err(CliError::Config)?);
            }
            cfg.ucr.datasets = datasets.or(cfg.ucr.datasets);
            cfg.anomaly_rate = anomaly_rate.or(cfg.anomaly_rate);
            cfg.bootstrap = bootstrap.or(cfg.bootstrap);
            commands::reproduce(&cfg, experiment, out.as_deref())
        }
    }
}

fn apply_pipeline_args(cfg: &mut RunConfig, a: PipelineArgs) {
    cfg.order = a.order.or(cfg.order);
    cfg.transforms = a.transforms.or(cfg.transforms.take());
    cfg.normalization = a.normalization.or(cfg.normalization.take());
    cfg.spectral_cutoff = a.spectral_cutoff.or(cfg.spectral_cutoff);
    cfg.null_tolerance = a.null_tolerance.or(cfg.null_tolerance);
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sigconform: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
