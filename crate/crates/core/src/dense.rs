//! Explicit `2^n × 2^n` matrices built by Kronecker products.
//!
//! Verification only: nothing on the simulation or training path calls into
//! this module. It shares no code with the strided kernels in
//! [`crate::state`], so it serves as an independent oracle for them.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::{GateKind, GateOp};
use crate::state::{single_qubit_matrix, StateVector};

pub type Matrix = DMatrix<Complex64>;

/// Dense operators are only built up to this many qubits.
pub const MAX_DENSE_QUBITS: usize = 8;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn two_by_two(m: [Complex64; 4]) -> Matrix {
    Matrix::from_row_slice(2, 2, &m)
}

fn identity2() -> Matrix {
    Matrix::identity(2, 2)
}

fn projector(value: bool) -> Matrix {
    if value {
        two_by_two([c(0.0), c(0.0), c(0.0), c(1.0)])
    } else {
        two_by_two([c(1.0), c(0.0), c(0.0), c(0.0)])
    }
}

/// `⊗_q factors[q]`, qubit 0 leftmost; missing factors are identity.
fn kron_term(n_qubits: usize, factors: &[(usize, Matrix)]) -> Matrix {
    (0..n_qubits).fold(Matrix::identity(1, 1), |acc, q| {
        let f = factors
            .iter()
            .find(|(fq, _)| *fq == q)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(identity2);
        acc.kronecker(&f)
    })
}

/// Embedded unitary of one gate on an `n_qubits` register.
pub fn gate_matrix(gate: &GateOp, n_qubits: usize, params: &[f64]) -> Result<Matrix> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::Config(format!(
            "dense matrices capped at {MAX_DENSE_QUBITS} qubits"
        )));
    }
    gate.validate(n_qubits)?;
    let terms: Vec<Vec<(usize, Matrix)>> = match gate.kind {
        GateKind::Cnot { control, target } => vec![
            vec![(control, projector(false))],
            vec![
                (control, projector(true)),
                (target, two_by_two([c(0.0), c(1.0), c(1.0), c(0.0)])),
            ],
        ],
        GateKind::Rotation { qubit, .. } | GateKind::Hadamard { qubit } => {
            let m = single_qubit_matrix(&gate.kind, params)?.expect("single-qubit kind");
            vec![vec![(qubit, two_by_two(m))]]
        }
    };
    let terms = match gate.condition {
        None => terms,
        Some(cond) => {
            let mut out: Vec<_> = terms
                .into_iter()
                .map(|mut t| {
                    t.push((cond.qubit, projector(cond.value)));
                    t
                })
                .collect();
            out.push(vec![(cond.qubit, projector(!cond.value))]);
            out
        }
    };
    let dim = 1 << n_qubits;
    Ok(terms.iter().fold(Matrix::zeros(dim, dim), |acc, t| {
        acc + kron_term(n_qubits, t)
    }))
}

/// Product `G_k ⋯ G_1` for gates listed in application order.
pub fn sequence_matrix(gates: &[GateOp], n_qubits: usize, params: &[f64]) -> Result<Matrix> {
    let dim = 1 << n_qubits;
    gates.iter().try_fold(Matrix::identity(dim, dim), |acc, g| {
        Ok(gate_matrix(g, n_qubits, params)? * acc)
    })
}

pub fn apply_matrix(m: &Matrix, state: &StateVector) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    (m * v).iter().copied().collect()
}

/// `max |(M†M − I)_ij|`.
pub fn unitarity_defect(m: &Matrix) -> f64 {
    let prod = m.adjoint() * m;
    let id = Matrix::identity(m.nrows(), m.ncols());
    (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
