//! Builders for the field-encoding unitary and the layered hardware-efficient
//! ansatz.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{Angle, Axis, GateOp};

/// One rotation per qubit, axis chosen by qubit position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub axes: Vec<Axis>,
}

impl Default for EncodingSpec {
    fn default() -> Self {
        EncodingSpec {
            axes: vec![Axis::X, Axis::Y, Axis::Z],
        }
    }
}

impl EncodingSpec {
    pub fn n_qubits(&self) -> usize {
        self.axes.len()
    }
}

/// `RX(x0) ⊗ RY(x1) ⊗ RZ(x2)` for the default spec. The three rotations act
/// on distinct qubits, so their product order is immaterial; they are listed
/// in qubit order.
pub fn build_encoding(spec: &EncodingSpec, x: &[f64]) -> Result<Vec<GateOp>> {
    if x.len() != spec.n_qubits() {
        return Err(Error::Config(format!(
            "encoding expects {} components, got {}",
            spec.n_qubits(),
            x.len()
        )));
    }
    Ok(spec
        .axes
        .iter()
        .zip(x)
        .enumerate()
        .map(|(q, (&axis, &angle))| GateOp::rotation(axis, q, Angle::Fixed(angle)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub n_layers: usize,
}

/// Single-qubit rotations per qubit per layer (RY then RZ).
pub const ROTATIONS_PER_QUBIT: usize = 2;

impl AnsatzSpec {
    pub fn new(n_qubits: usize, n_layers: usize) -> Result<Self> {
        let spec = AnsatzSpec { n_qubits, n_layers };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return Err(Error::Config(format!(
                "CNOT ring needs at least 2 qubits, got {}",
                self.n_qubits
            )));
        }
        if self.n_layers == 0 {
            return Err(Error::Config("ansatz needs at least one layer".into()));
        }
        Ok(())
    }

    pub fn n_params(&self) -> usize {
        self.n_layers * self.n_qubits * ROTATIONS_PER_QUBIT
    }
}

impl Default for AnsatzSpec {
    fn default() -> Self {
        AnsatzSpec {
            n_qubits: 3,
            n_layers: 15,
        }
    }
}

/// Per layer: `RY(θ) RZ(θ')` on each qubit, then CNOTs `i → (i+1) mod n`.
/// Parameter indices run consecutively in gate order.
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Vec<GateOp>> {
    spec.validate()?;
    let n = spec.n_qubits;
    let mut gates = Vec::with_capacity(spec.n_layers * n * (ROTATIONS_PER_QUBIT + 1));
    let mut next = 0..;
    for _ in 0..spec.n_layers {
        for q in 0..n {
            for axis in [Axis::Y, Axis::Z] {
                let idx = next.next().expect("unbounded range");
                gates.push(GateOp::rotation(axis, q, Angle::Param(idx)));
            }
        }
        gates.extend((0..n).map(|q| GateOp::cnot(q, (q + 1) % n)));
    }
    Ok(gates)
}

/// Reversed sequence with every rotation negated and bound parameters
/// resolved to literals.
pub fn invert_sequence(gates: &[GateOp], params: &[f64]) -> Result<Vec<GateOp>> {
    gates.iter().rev().map(|g| g.inverse(params)).collect()
}
