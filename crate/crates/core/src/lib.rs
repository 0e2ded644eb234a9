//! Exact statevector simulation and variational training for integrated
//! sensing and computation, with the sensing and computation stages run
//! either in definite order or under a quantum SWITCH.
//!
//! A three-qubit register senses a magnetic field through per-axis angle
//! encoding, a layered hardware-efficient ansatz computes on the same state,
//! and a Pauli-Z expectation reads out a heading prediction. In the switched
//! pipeline an extra order qubit in `|+⟩` superposes the two stage orders.
//!
//! Per-sample evaluations fan out with rayon when the `parallel` feature is
//! on (the default); every reduction runs in a fixed order, so results are
//! bit-identical with or without it.

pub mod circuits;
pub mod dataset;
pub mod dense;
pub mod error;
pub mod gate;
pub mod gradients;
pub mod model;
pub mod par;
pub mod report;
pub mod state;
pub mod switch;
pub mod training;

pub use circuits::{build_ansatz, build_encoding, invert_sequence, AnsatzSpec, EncodingSpec};
pub use dataset::{make_dataset, Dataset, DatasetConfig, Sample};
pub use error::{Error, Result};
pub use gate::{Angle, Axis, GateKind, GateOp};
pub use gradients::{loss, loss_and_grad_analytic, loss_and_grad_fd, GradientResult, LossKind};
pub use model::{Model, OrderInit, Pipeline};
pub use par::Execution;
pub use state::{expectation, expectation_on_subset, Observable, StateVector};
pub use switch::{apply_switch, prepare_order_qubit, switch_as_dense_matrix, SwitchProgram};
pub use training::{evaluate, train, TrainConfig, TrainReport};
