//! Loss functions and parameter gradients.
//!
//! The analytic path is adjoint (reverse-mode) differentiation through the
//! simulated circuit. A parameter that occurs in several gates, as every
//! ansatz angle does inside the switch, accumulates one term per occurrence.
//! Central finite differences serve as the reference.

use serde::{Deserialize, Serialize};

use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::gate::{Angle, GateKind, GateOp};
use crate::model::Model;
use crate::state::{expectation, generator_overlap, Kernel, Observable, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    Mse,
    Absolute,
}

/// `(y − ŷ)²` or `|y − ŷ|`.
pub fn loss(prediction: f64, target: f64, kind: LossKind) -> f64 {
    let r = target - prediction;
    match kind {
        LossKind::Mse => r * r,
        LossKind::Absolute => r.abs(),
    }
}

/// `∂loss/∂ŷ`. The absolute loss uses subgradient 0 at `ŷ = y`.
pub fn loss_slope(prediction: f64, target: f64, kind: LossKind) -> f64 {
    let d = prediction - target;
    match kind {
        LossKind::Mse => 2.0 * d,
        LossKind::Absolute => {
            if d == 0.0 {
                0.0
            } else {
                d.signum()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradientResult {
    pub grad: Vec<f64>,
    pub loss: f64,
    pub method: GradMethod,
}

/// Prediction `ŷ(x)` and `∂ŷ/∂θ` for a model input.
pub fn prediction_and_grad(model: &Model, params: &[f64], x: &[f64]) -> Result<(f64, Vec<f64>)> {
    model.check_params(params)?;
    expectation_grad(
        model.n_register(),
        &model.program(x)?,
        params,
        &model.observable(),
    )
}

/// `⟨O⟩` after `program` on `|0…0⟩` and its gradient with respect to
/// `params`, by one forward and one backward sweep.
pub fn expectation_grad(
    n_qubits: usize,
    program: &[GateOp],
    params: &[f64],
    obs: &Observable,
) -> Result<(f64, Vec<f64>)> {
    let kernels = program
        .iter()
        .map(|g| Kernel::compile(g, n_qubits, params))
        .collect::<Result<Vec<_>>>()?;
    let mut psi = StateVector::new_zero(n_qubits)?;
    for k in &kernels {
        k.apply(psi.amps_mut());
    }
    let value = expectation(&psi, obs)?;
    let mut lambda = obs.apply(&psi)?;

    // psi and lambda both sit just after gate k while visiting it
    let mut grad = vec![0.0; params.len()];
    for (gate, kernel) in program.iter().zip(&kernels).rev() {
        if let (
            GateKind::Rotation {
                axis,
                angle: Angle::Param(p),
                ..
            },
            Kernel::Single { bit, cond, .. },
        ) = (gate.kind, kernel)
        {
            // ∂⟨O⟩ = 2 Re⟨λ|(−i/2)P|ψ⟩ = Im⟨λ|P|ψ⟩
            grad[p] +=
                generator_overlap(lambda.amplitudes(), psi.amplitudes(), axis, *bit, *cond).im;
        }
        let inv = kernel.dagger();
        inv.apply(psi.amps_mut());
        inv.apply(lambda.amps_mut());
    }
    Ok((value, grad))
}

fn check_batch(batch: &[Sample]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::Config("empty batch".into()));
    }
    Ok(())
}

/// Batch-mean loss and its exact gradient. Per-sample terms may run in
/// parallel; the reduction is always in batch order.
pub fn loss_and_grad_analytic(
    model: &Model,
    params: &[f64],
    batch: &[Sample],
    kind: LossKind,
) -> Result<GradientResult> {
    check_batch(batch)?;
    let per_sample = model
        .execution()
        .map(batch, |s| prediction_and_grad(model, params, &s.x_norm));
    let mut grad = vec![0.0; params.len()];
    let mut total = 0.0;
    for (s, res) in batch.iter().zip(per_sample) {
        let (pred, dpred) = res?;
        total += loss(pred, s.y_norm, kind);
        let slope = loss_slope(pred, s.y_norm, kind);
        for (g, d) in grad.iter_mut().zip(&dpred) {
            *g += slope * d;
        }
    }
    let scale = 1.0 / batch.len() as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    Ok(GradientResult {
        grad,
        loss: total * scale,
        method: GradMethod::Analytic,
    })
}

/// Mean loss over `samples`, reduced in order.
pub fn batch_loss(
    model: &Model,
    params: &[f64],
    samples: &[Sample],
    kind: LossKind,
) -> Result<f64> {
    check_batch(samples)?;
    let preds = model.execution().map(samples, |s| model.predict(params, s));
    let mut total = 0.0;
    for (s, p) in samples.iter().zip(preds) {
        total += loss(p?, s.y_norm, kind);
    }
    Ok(total / samples.len() as f64)
}

/// Central differences `(L(θ + h e_i) − L(θ − h e_i)) / 2h`.
pub fn loss_and_grad_fd(
    model: &Model,
    params: &[f64],
    batch: &[Sample],
    kind: LossKind,
    step: f64,
) -> Result<GradientResult> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!(
            "finite-difference step must be > 0, got {step}"
        )));
    }
    model.check_params(params)?;
    let center = batch_loss(model, params, batch, kind)?;
    let mut shifted = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for i in 0..params.len() {
        shifted[i] = params[i] + step;
        let up = batch_loss(model, &shifted, batch, kind)?;
        shifted[i] = params[i] - step;
        let down = batch_loss(model, &shifted, batch, kind)?;
        shifted[i] = params[i];
        grad.push((up - down) / (2.0 * step));
    }
    Ok(GradientResult {
        grad,
        loss: center,
        method: GradMethod::FiniteDifference,
    })
}

/// Worst disagreement found by [`check_gradients`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub instance: usize,
    pub coordinate: usize,
    pub analytic: f64,
    pub finite_difference: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub pipeline: crate::model::Pipeline,
    pub instances: usize,
    pub step: f64,
    pub tolerance: f64,
    pub worst: Deviation,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct GradcheckConfig {
    pub instances: usize,
    pub batch_size: usize,
    pub step: f64,
    pub tolerance: f64,
    pub seed: u64,
    pub loss_kind: LossKind,
}

impl Default for GradcheckConfig {
    fn default() -> Self {
        GradcheckConfig {
            instances: 20,
            batch_size: 8,
            step: 1e-5,
            tolerance: 1e-5,
            seed: 0,
            loss_kind: LossKind::Mse,
        }
    }
}

/// Hook that tampers with an analytic gradient in place.
pub type GradientFault<'a> = &'a dyn Fn(&mut [f64]);

/// Compares analytic and central-difference gradients on random parameter
/// vectors and random field batches. `fault` may tamper with each analytic
/// gradient before comparison.
pub fn check_gradients(
    model: &Model,
    cfg: &GradcheckConfig,
    fault: Option<GradientFault>,
) -> Result<GradcheckReport> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::dataset::{sample_field, DatasetConfig};

    if cfg.instances == 0 || cfg.batch_size == 0 {
        return Err(Error::Config(
            "gradient check needs instances and batch size >= 1".into(),
        ));
    }
    let data_cfg = DatasetConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = Deviation {
        instance: 0,
        coordinate: 0,
        analytic: 0.0,
        finite_difference: 0.0,
        abs_error: -1.0,
    };
    for instance in 0..cfg.instances {
        let params: Vec<f64> = (0..model.n_params())
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let mut batch = Vec::with_capacity(cfg.batch_size);
        while batch.len() < cfg.batch_size {
            let b = sample_field(&mut rng, &data_cfg.bounds);
            if let Ok(s) = Sample::from_field(b, &data_cfg.bounds, data_cfg.heading) {
                batch.push(s);
            }
        }
        let mut analytic = loss_and_grad_analytic(model, &params, &batch, cfg.loss_kind)?;
        if let Some(f) = fault {
            f(&mut analytic.grad);
        }
        let fd = loss_and_grad_fd(model, &params, &batch, cfg.loss_kind, cfg.step)?;
        for (coordinate, (a, d)) in analytic.grad.iter().zip(&fd.grad).enumerate() {
            let err = (a - d).abs();
            if err > worst.abs_error || err.is_nan() {
                worst = Deviation {
                    instance,
                    coordinate,
                    analytic: *a,
                    finite_difference: *d,
                    abs_error: err,
                };
            }
        }
    }
    Ok(GradcheckReport {
        pipeline: model.pipeline(),
        instances: cfg.instances,
        step: cfg.step,
        tolerance: cfg.tolerance,
        passed: worst.abs_error < cfg.tolerance,
        worst,
    })
}
