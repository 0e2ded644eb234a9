//! Primitive gate instances.
//!
//! A [`GateOp`] is a gate kind plus an optional [`Condition`]: a conditioned
//! gate acts only on the subspace where one control qubit holds a fixed value
//! and as the identity elsewhere. Conditions let a pair of gate sequences be
//! routed by an order qubit without leaving the gate-application framework.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Rotation angle: either a literal in radians or a slot in a trainable
/// parameter vector. Exactly one of the two is ever present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    Fixed(f64),
    Param(usize),
}

impl Angle {
    pub fn resolve(self, params: &[f64]) -> Result<f64> {
        match self {
            Angle::Fixed(a) => Ok(a),
            Angle::Param(i) => params.get(i).copied().ok_or_else(|| {
                Error::Config(format!(
                    "parameter index {i} out of range for {} parameters",
                    params.len()
                ))
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    Rotation {
        axis: Axis,
        qubit: usize,
        angle: Angle,
    },
    Hadamard {
        qubit: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

/// Restricts a gate to the basis states where `qubit` reads `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub qubit: usize,
    pub value: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub condition: Option<Condition>,
}

impl GateOp {
    fn new(kind: GateKind) -> Self {
        GateOp {
            kind,
            condition: None,
        }
    }

    pub fn rotation(axis: Axis, qubit: usize, angle: Angle) -> Self {
        Self::new(GateKind::Rotation { axis, qubit, angle })
    }

    pub fn rx(qubit: usize, angle: f64) -> Self {
        Self::rotation(Axis::X, qubit, Angle::Fixed(angle))
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Self::rotation(Axis::Y, qubit, Angle::Fixed(angle))
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Self::rotation(Axis::Z, qubit, Angle::Fixed(angle))
    }

    pub fn h(qubit: usize) -> Self {
        Self::new(GateKind::Hadamard { qubit })
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot { control, target })
    }

    /// Returns the same gate conditioned on `qubit == value`.
    pub fn when(mut self, qubit: usize, value: bool) -> Self {
        self.condition = Some(Condition { qubit, value });
        self
    }

    /// Every qubit the gate reads or writes, condition included.
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match self.kind {
            GateKind::Rotation { qubit, .. } | GateKind::Hadamard { qubit } => (qubit, None),
            GateKind::Cnot { control, target } => (control, Some(target)),
        };
        std::iter::once(a)
            .chain(b)
            .chain(self.condition.map(|c| c.qubit))
    }

    pub fn param_index(&self) -> Option<usize> {
        match self.kind {
            GateKind::Rotation {
                angle: Angle::Param(i),
                ..
            } => Some(i),
            _ => None,
        }
    }

    /// Checks qubit indices against a register of `n_qubits` and rejects
    /// repeated qubits within one gate.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let mut seen = [usize::MAX; 3];
        for (slot, q) in self.qubits().enumerate() {
            if q >= n_qubits {
                return Err(Error::Structural(format!(
                    "gate {:?} touches qubit {q} on a {n_qubits}-qubit register",
                    self.kind
                )));
            }
            if seen[..slot].contains(&q) {
                return Err(Error::Structural(format!(
                    "gate {:?} uses qubit {q} more than once",
                    self.kind
                )));
            }
            seen[slot] = q;
        }
        Ok(())
    }

    /// Inverse gate with any parameter binding resolved against `params`.
    pub fn inverse(&self, params: &[f64]) -> Result<Self> {
        let kind = match self.kind {
            GateKind::Rotation { axis, qubit, angle } => GateKind::Rotation {
                axis,
                qubit,
                angle: Angle::Fixed(-angle.resolve(params)?),
            },
            other => other,
        };
        Ok(GateOp {
            kind,
            condition: self.condition,
        })
    }
}
