//! Command-line runner: dataset generation, training, evaluation, pipeline
//! comparison and gradient checking.
//!
//! Exit codes: 0 success, 1 I/O or file-format failure, 2 invalid
//! configuration or arguments, 3 non-finite loss during training,
//! 4 incomparable reports, 5 gradient check failure.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qisc_core::dataset::{make_dataset, Dataset};
use qisc_core::gradients::{check_gradients, GradcheckConfig, GradientFault};
use qisc_core::report::{compare_dirs, read_params, write_comparison, write_report, ResultsFile};
use qisc_core::training::{evaluate, train_with_progress, EpochProgress, TrainReport};
use qisc_core::{Error, Execution, Pipeline};

use crate::config::RunConfig;

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NON_FINITE: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_GRADCHECK: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "qisc",
    version,
    about = "Sensing-and-computation training under definite and switched causal order"
)]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, env = "QISC_OUT_DIR", default_value = "runs")]
    out: PathBuf,

    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct TrainFlags {
    #[arg(long)]
    pipeline: Option<Pipeline>,
    /// Training seed; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    /// Run every per-sample evaluation on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Debug, Clone, Default)]
struct DataFlags {
    /// Dataset directory written by `gen-data`.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Generate the dataset in-run (written to `<out>/data`).
    #[arg(long)]
    generate: bool,
    /// Dataset seed used with --generate.
    #[arg(long)]
    data_seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a train/test dataset and write it to the output directory.
    GenData {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        train: Option<usize>,
        #[arg(long)]
        test: Option<usize>,
    },
    /// Train one pipeline over several seeded trials.
    Train {
        #[command(flatten)]
        flags: TrainFlags,
        #[command(flatten)]
        data: DataFlags,
        /// Also write cumulative (running-sum) loss curves.
        #[arg(long)]
        cumulative: bool,
    },
    /// Align the mean curves of an ICO run and a definite-order run.
    Compare {
        /// ICO run directory (omit with --generate).
        #[arg(long)]
        ico: Option<PathBuf>,
        /// Definite-order run directory (omit with --generate).
        #[arg(long)]
        definite: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        flags: TrainFlags,
        #[command(flatten)]
        data: DataFlags,
    },
    /// Check analytic gradients against central finite differences.
    Gradcheck {
        #[arg(long)]
        pipeline: Option<Pipeline>,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 8)]
        batch: usize,
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
        /// Pass threshold on the max-norm error; defaults to max(step, 1e-5).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        layers: Option<usize>,
        /// Negate the first analytic gradient entry (negative control).
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
    /// Mean loss of a saved parameter file on a dataset split.
    Eval {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        pipeline: Option<Pipeline>,
        #[arg(long)]
        layers: Option<usize>,
        #[arg(long)]
        data: PathBuf,
        /// `train` or `test`.
        #[arg(long, default_value = "test")]
        split: String,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::Domain(_) | Error::Structural(_) => EXIT_CONFIG,
            Error::NonFinite(_) => EXIT_NON_FINITE,
            Error::Mismatch(_) => EXIT_MISMATCH,
            Error::Io(_) | Error::Exists(_) | Error::Csv(_) | Error::Json(_) | Error::Format(_) => {
                EXIT_IO
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn apply_train_flags(cfg: &mut RunConfig, flags: &TrainFlags) {
    let t = &mut cfg.train;
    if let Some(p) = flags.pipeline {
        t.pipeline = p;
    }
    if let Some(v) = flags.seed {
        t.seed = v;
    }
    if let Some(v) = flags.epochs {
        t.epochs = v;
    }
    if let Some(v) = flags.lr {
        t.learning_rate = v;
    }
    if let Some(v) = flags.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = flags.trials {
        t.n_trials = v;
    }
    if let Some(v) = flags.layers {
        t.n_layers = v;
    }
    if flags.sequential {
        t.execution = Execution::Sequential;
    }
}

fn load_data(
    cfg: &mut RunConfig,
    flags: &DataFlags,
    out: &Path,
    force: bool,
) -> CliResult<Dataset> {
    match (&flags.data, flags.generate) {
        (Some(_), true) => Err(Failure {
            code: EXIT_CONFIG,
            message: "--data and --generate are mutually exclusive".into(),
        }),
        (Some(dir), false) => Ok(Dataset::read_dir(dir)?),
        (None, true) => {
            if let Some(seed) = flags.data_seed {
                cfg.dataset.seed = seed;
            }
            let data = make_dataset(&cfg.dataset)?;
            data.write_dir(&out.join("data"), force)?;
            Ok(data)
        }
        (None, false) => Err(Failure {
            code: EXIT_CONFIG,
            message: "no dataset: pass --data <dir> or --generate".into(),
        }),
    }
}

fn run_training(
    cfg: &RunConfig,
    data: &Dataset,
    out: &Path,
    cumulative: bool,
    force: bool,
) -> CliResult<TrainReport> {
    let model = cfg.train.model()?;
    let name = cfg.train.pipeline.name();
    let progress = |p: &EpochProgress| {
        eprintln!(
            "[{name}] trial {} epoch {} train {} test {}",
            p.trial, p.epoch, p.train_loss, p.test_loss
        );
    };
    let report = train_with_progress(&model, &cfg.train, data, Some(&progress))?;
    write_report(out, &report, cumulative, force)?;
    Ok(report)
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}").map_err(Error::from)?;
    Ok(())
}

fn aborted_failure(report: &TrainReport) -> Failure {
    let detail: Vec<String> = report
        .trials
        .iter()
        .filter_map(|t| {
            t.aborted
                .as_ref()
                .map(|a| format!("trial {}: {a}", t.trial))
        })
        .collect();
    Failure {
        code: EXIT_NON_FINITE,
        message: format!(
            "{} training aborted: {}",
            report.config.pipeline.name(),
            detail.join("; ")
        ),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    let out = cli.out.as_path();
    match cli.command {
        Command::GenData { seed, train, test } => {
            if let Some(s) = seed {
                cfg.dataset.seed = s;
            }
            if let Some(k) = train {
                cfg.dataset.k_train = k;
            }
            if let Some(k) = test {
                cfg.dataset.k_test = k;
            }
            let data = make_dataset(&cfg.dataset)?;
            data.write_dir(out, cli.force)?;
            print_json(&data.meta())?;
        }
        Command::Train {
            flags,
            data,
            cumulative,
        } => {
            apply_train_flags(&mut cfg, &flags);
            cfg.train.validate()?;
            let dataset = load_data(&mut cfg, &data, out, cli.force)?;
            let report = run_training(&cfg, &dataset, out, cumulative, cli.force)?;
            print_json(&ResultsFile::from_report(&report))?;
            if report.any_aborted() {
                return Err(aborted_failure(&report));
            }
        }
        Command::Compare {
            ico,
            definite,
            threshold,
            flags,
            data,
        } => {
            apply_train_flags(&mut cfg, &flags);
            let threshold = threshold.unwrap_or(cfg.compare.threshold);
            let (ico_dir, def_dir) = match (ico, definite) {
                (Some(i), Some(d)) => (i, d),
                (None, None) if data.generate || data.data.is_some() => {
                    cfg.train.validate()?;
                    let dataset = load_data(&mut cfg, &data, out, cli.force)?;
                    let mut dirs = Vec::new();
                    for pipeline in [Pipeline::Ico, Pipeline::Definite] {
                        let mut run_cfg = cfg.clone();
                        run_cfg.train.pipeline = pipeline;
                        let dir = out.join(pipeline.name());
                        let report = run_training(&run_cfg, &dataset, &dir, false, cli.force)?;
                        if report.any_aborted() {
                            return Err(aborted_failure(&report));
                        }
                        dirs.push(dir);
                    }
                    (dirs[0].clone(), dirs[1].clone())
                }
                _ => {
                    return Err(Failure {
                        code: EXIT_CONFIG,
                        message: "compare needs both --ico and --definite, or --generate/--data to train both".into(),
                    })
                }
            };
            let cmp = compare_dirs(&ico_dir, &def_dir, threshold)?;
            write_comparison(out, &cmp, cli.force)?;
            print_json(&cmp.summary)?;
        }
        Command::Gradcheck {
            pipeline,
            instances,
            batch,
            step,
            tol,
            seed,
            layers,
            inject_sign_flip,
        } => {
            if let Some(l) = layers {
                cfg.train.n_layers = l;
            }
            let pipelines = match pipeline {
                Some(p) => vec![p],
                None => vec![Pipeline::Definite, Pipeline::Ico],
            };
            let check = GradcheckConfig {
                instances,
                batch_size: batch,
                step,
                tolerance: tol.unwrap_or(step.max(1e-5)),
                seed,
                loss_kind: cfg.train.loss_kind,
            };
            let flip = |g: &mut [f64]| {
                if let Some(first) = g.first_mut() {
                    *first = -*first;
                }
            };
            let fault: Option<GradientFault> = if inject_sign_flip { Some(&flip) } else { None };
            let mut reports = Vec::new();
            for p in pipelines {
                let mut train = cfg.train.clone();
                train.pipeline = p;
                reports.push(check_gradients(&train.model()?, &check, fault)?);
            }
            print_json(&reports)?;
            if let Some(bad) = reports.iter().find(|r| !r.passed) {
                let w = &bad.worst;
                return Err(Failure {
                    code: EXIT_GRADCHECK,
                    message: format!(
                        "gradient check failed for {}: instance {} coordinate {}: analytic {} vs finite difference {} (|err| {} > {})",
                        bad.pipeline.name(),
                        w.instance,
                        w.coordinate,
                        w.analytic,
                        w.finite_difference,
                        w.abs_error,
                        bad.tolerance
                    ),
                });
            }
            for r in &reports {
                eprintln!(
                    "{}: pass, max deviation {}",
                    r.pipeline.name(),
                    r.worst.abs_error
                );
            }
        }
        Command::Eval {
            params,
            pipeline,
            layers,
            data,
            split,
        } => {
            if let Some(p) = pipeline {
                cfg.train.pipeline = p;
            }
            if let Some(l) = layers {
                cfg.train.n_layers = l;
            }
            let dataset = Dataset::read_dir(&data)?;
            let samples = match split.as_str() {
                "train" => &dataset.train,
                "test" => &dataset.test,
                other => {
                    return Err(Failure {
                        code: EXIT_CONFIG,
                        message: format!("unknown split {other:?}; use train or test"),
                    })
                }
            };
            let params = read_params(&params)?;
            let loss = evaluate(&cfg.train.model()?, &params, samples, cfg.train.loss_kind)?;
            print_json(&serde_json::json!({
                "pipeline": cfg.train.pipeline,
                "split": split,
                "samples": samples.len(),
                "loss_kind": cfg.train.loss_kind,
                "mean_loss": loss,
            }))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
