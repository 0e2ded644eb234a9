//! The two prediction pipelines.
//!
//! * Definite order: `ŷ = ⟨Z₀⟩` on `U_θ U(x) |0…0⟩`.
//! * Switched order: an order qubit in `|+⟩` is appended and the encoding and
//!   ansatz are composed under a SWITCH; `ŷ = ⟨I_T ⊗ Z₀⟩` on the result.

use serde::{Deserialize, Serialize};

use crate::circuits::{build_ansatz, build_encoding, AnsatzSpec, EncodingSpec};
use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::par::Execution;
use crate::state::{expectation, expectation_on_subset, Observable, StateVector};
use crate::switch::SwitchProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    Definite,
    #[default]
    Ico,
}

impl Pipeline {
    pub fn name(self) -> &'static str {
        match self {
            Pipeline::Definite => "definite",
            Pipeline::Ico => "ico",
        }
    }
}

impl std::str::FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "definite" => Ok(Pipeline::Definite),
            "ico" => Ok(Pipeline::Ico),
            other => Err(Error::Config(format!("unknown pipeline {other:?}"))),
        }
    }
}

/// Initial state of the order qubit in the switched pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderInit {
    #[default]
    Plus,
    /// Leaves the order qubit at `|0⟩`, collapsing the switch to definite
    /// order. Used to cross-check the two pipelines.
    Zero,
}

#[derive(Debug, Clone)]
pub struct Model {
    pipeline: Pipeline,
    encoding: EncodingSpec,
    ansatz: AnsatzSpec,
    ansatz_gates: Vec<GateOp>,
    observable: Observable,
    order_init: OrderInit,
    execution: Execution,
}

impl Model {
    pub fn new(pipeline: Pipeline, ansatz: AnsatzSpec) -> Result<Self> {
        let encoding = EncodingSpec::default();
        if encoding.n_qubits() != ansatz.n_qubits {
            return Err(Error::Config(format!(
                "field encoding uses {} qubits but the ansatz has {}",
                encoding.n_qubits(),
                ansatz.n_qubits
            )));
        }
        Ok(Model {
            pipeline,
            ansatz_gates: build_ansatz(&ansatz)?,
            encoding,
            ansatz,
            observable: Observable::z(0),
            order_init: OrderInit::Plus,
            execution: Execution::default(),
        })
    }

    pub fn with_order_init(mut self, init: OrderInit) -> Self {
        self.order_init = init;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn pipeline(&self) -> Pipeline {
        self.pipeline
    }

    pub fn ansatz(&self) -> &AnsatzSpec {
        &self.ansatz
    }

    pub fn observable(&self) -> Observable {
        self.observable
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn n_params(&self) -> usize {
        self.ansatz.n_params()
    }

    /// Register width including the order qubit when present.
    pub fn n_register(&self) -> usize {
        match self.pipeline {
            Pipeline::Definite => self.ansatz.n_qubits,
            Pipeline::Ico => self.ansatz.n_qubits + 1,
        }
    }

    pub fn order_qubit(&self) -> Option<usize> {
        match self.pipeline {
            Pipeline::Definite => None,
            Pipeline::Ico => Some(self.ansatz.n_qubits),
        }
    }

    /// Full gate list that takes `|0…0⟩` to the output state for input `x`.
    pub fn program(&self, x: &[f64]) -> Result<Vec<GateOp>> {
        let encoding = build_encoding(&self.encoding, x)?;
        match self.pipeline {
            Pipeline::Definite => Ok([encoding, self.ansatz_gates.clone()].concat()),
            Pipeline::Ico => {
                let prog =
                    SwitchProgram::new(encoding, self.ansatz_gates.clone(), self.ansatz.n_qubits)?;
                let mut gates =
                    Vec::with_capacity(1 + 2 * (prog.branch_a().len() + prog.branch_b().len()));
                if self.order_init == OrderInit::Plus {
                    gates.push(GateOp::h(prog.order_qubit()));
                }
                gates.extend(prog.lower());
                Ok(gates)
            }
        }
    }

    pub fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Config(format!(
                "model expects {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        Ok(())
    }

    pub fn output_state(&self, params: &[f64], x: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let mut state = StateVector::new_zero(self.n_register())?;
        state.apply_sequence(&self.program(x)?, params)?;
        Ok(state)
    }

    /// Expectation readout on the computation register.
    pub fn readout(&self, state: &StateVector) -> Result<f64> {
        match self.order_qubit() {
            None => expectation(state, &self.observable),
            Some(t) => expectation_on_subset(state, &self.observable, t),
        }
    }

    pub fn predict(&self, params: &[f64], sample: &Sample) -> Result<f64> {
        self.readout(&self.output_state(params, &sample.x_norm)?)
    }
}
