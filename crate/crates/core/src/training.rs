//! Mini-batch gradient descent over seeded trials.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::AnsatzSpec;
use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};
use crate::gradients::{batch_loss, loss_and_grad_analytic, LossKind};
use crate::model::{Model, Pipeline};
use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitScheme {
    /// Each angle uniform on `[-π, π)`.
    #[default]
    UniformPi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub pipeline: Pipeline,
    pub n_layers: usize,
    pub n_qubits: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub n_trials: usize,
    pub loss_kind: LossKind,
    pub seed: u64,
    pub init_scheme: InitScheme,
    pub execution: Execution,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            pipeline: Pipeline::Ico,
            n_layers: 15,
            n_qubits: 3,
            epochs: 200,
            learning_rate: 0.01,
            batch_size: 32,
            n_trials: 5,
            loss_kind: LossKind::Mse,
            seed: 1,
            init_scheme: InitScheme::UniformPi,
            execution: Execution::Parallel,
        }
    }
}

impl TrainConfig {
    pub fn ansatz(&self) -> Result<AnsatzSpec> {
        AnsatzSpec::new(self.n_qubits, self.n_layers)
    }

    pub fn model(&self) -> Result<Model> {
        Ok(Model::new(self.pipeline, self.ansatz()?)?.with_execution(self.execution))
    }

    /// Checks everything except `batch_size ≤ K`, which needs the dataset.
    pub fn validate(&self) -> Result<()> {
        self.ansatz()?;
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        for (name, v) in [
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("n_trials", self.n_trials),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be >= 1")));
            }
        }
        Ok(())
    }

    /// Seed of trial `t`.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    pub train_loss: Vec<f64>,
    pub test_loss: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Set when a non-finite loss or gradient stopped the trial early.
    pub aborted: Option<String>,
}

impl TrialReport {
    pub fn completed(&self) -> bool {
        self.aborted.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: TrainConfig,
    pub dataset_seed: u64,
    pub trials: Vec<TrialReport>,
    /// Means over completed trials.
    pub mean_train_curve: Vec<f64>,
    pub mean_test_curve: Vec<f64>,
    pub wall_clock_seconds: f64,
}

impl TrainReport {
    pub fn any_aborted(&self) -> bool {
        self.trials.iter().any(|t| !t.completed())
    }
}

pub fn init_params<R: Rng + ?Sized>(
    spec: &AnsatzSpec,
    scheme: InitScheme,
    rng: &mut R,
) -> Vec<f64> {
    use std::f64::consts::PI;
    match scheme {
        InitScheme::UniformPi => (0..spec.n_params())
            .map(|_| rng.random_range(-PI..PI))
            .collect(),
    }
}

/// A seeded permutation of `0..n` cut into consecutive batches; the last
/// batch keeps the remainder.
pub fn epoch_batches<R: Rng + ?Sized>(n: usize, batch_size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(batch_size).map(<[usize]>::to_vec).collect()
}

/// Mean loss of `params` over `samples`.
pub fn evaluate(model: &Model, params: &[f64], samples: &[Sample], kind: LossKind) -> Result<f64> {
    batch_loss(model, params, samples, kind)
}

fn finite_or(value: f64, what: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what()))
    }
}

/// End-of-epoch losses handed to a progress observer.
#[derive(Debug, Clone, Copy)]
pub struct EpochProgress {
    pub trial: usize,
    pub epoch: usize,
    pub train_loss: f64,
    pub test_loss: f64,
}

pub type ProgressFn<'a> = &'a (dyn Fn(&EpochProgress) + Sync);

/// One seeded trial. Returned curves stop at the failing epoch when the
/// trial aborts.
pub fn run_trial(
    model: &Model,
    config: &TrainConfig,
    data: &Dataset,
    trial: usize,
    progress: Option<ProgressFn<'_>>,
) -> TrialReport {
    let seed = config.trial_seed(trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = init_params(model.ansatz(), config.init_scheme, &mut rng);
    let mut report = TrialReport {
        trial,
        seed,
        train_loss: Vec::with_capacity(config.epochs),
        test_loss: Vec::with_capacity(config.epochs),
        final_params: Vec::new(),
        aborted: None,
    };
    let outcome = (|| -> Result<()> {
        for epoch in 1..=config.epochs {
            for batch_idx in epoch_batches(data.train.len(), config.batch_size, &mut rng) {
                let batch: Vec<Sample> = batch_idx.iter().map(|&i| data.train[i]).collect();
                let step = loss_and_grad_analytic(model, &params, &batch, config.loss_kind)?;
                finite_or(step.loss, || format!("batch loss at epoch {epoch}"))?;
                if step.grad.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFinite(format!("gradient at epoch {epoch}")));
                }
                for (p, g) in params.iter_mut().zip(&step.grad) {
                    *p -= config.learning_rate * g;
                }
            }
            let train = evaluate(model, &params, &data.train, config.loss_kind)?;
            let test = evaluate(model, &params, &data.test, config.loss_kind)?;
            report
                .train_loss
                .push(finite_or(train, || format!("train loss at epoch {epoch}"))?);
            report
                .test_loss
                .push(finite_or(test, || format!("test loss at epoch {epoch}"))?);
            if let Some(observe) = progress {
                observe(&EpochProgress {
                    trial,
                    epoch,
                    train_loss: train,
                    test_loss: test,
                });
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        report.aborted = Some(e.to_string());
    }
    report.final_params = params;
    report
}

fn mean_curve<'a>(curves: impl Iterator<Item = &'a [f64]>, len: usize) -> Vec<f64> {
    let mut sum = vec![0.0; len];
    let mut count = 0usize;
    for c in curves {
        for (s, v) in sum.iter_mut().zip(c) {
            *s += v;
        }
        count += 1;
    }
    if count == 0 {
        return Vec::new();
    }
    sum.into_iter().map(|s| s / count as f64).collect()
}

/// Trains `config.n_trials` independent trials of the configured pipeline.
pub fn train(config: &TrainConfig, data: &Dataset) -> Result<TrainReport> {
    train_model(&config.model()?, config, data)
}

/// As [`train`] with a caller-supplied model.
pub fn train_model(model: &Model, config: &TrainConfig, data: &Dataset) -> Result<TrainReport> {
    train_with_progress(model, config, data, None)
}

pub fn train_with_progress(
    model: &Model,
    config: &TrainConfig,
    data: &Dataset,
    progress: Option<ProgressFn<'_>>,
) -> Result<TrainReport> {
    config.validate()?;
    if data.train.is_empty() || data.test.is_empty() {
        return Err(Error::Config(
            "training and test sets must be non-empty".into(),
        ));
    }
    if config.batch_size > data.train.len() {
        return Err(Error::Config(format!(
            "batch size {} exceeds {} training samples",
            config.batch_size,
            data.train.len()
        )));
    }
    let started = Instant::now();
    let trial_ids: Vec<usize> = (0..config.n_trials).collect();
    let trials = config
        .execution
        .map(&trial_ids, |&t| run_trial(model, config, data, t, progress));
    let done = || trials.iter().filter(|t| t.completed());
    Ok(TrainReport {
        config: config.clone(),
        dataset_seed: data.seed,
        mean_train_curve: mean_curve(done().map(|t| t.train_loss.as_slice()), config.epochs),
        mean_test_curve: mean_curve(done().map(|t| t.test_loss.as_slice()), config.epochs),
        trials,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}
