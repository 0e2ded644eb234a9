//! Quantum SWITCH of two gate sequences.
//!
//! An order qubit, appended after the computation register, routes the two
//! branches: with the order qubit at `|0⟩` branch A runs before branch B,
//! with it at `|1⟩` branch B runs first. The composite is realized as two
//! stages of conditioned gates,
//!
//! ```text
//! stage 1: |0⟩⟨0| ⊗ A + |1⟩⟨1| ⊗ B
//! stage 2: |0⟩⟨0| ⊗ B + |1⟩⟨1| ⊗ A
//! ```
//!
//! whose product is `|0⟩⟨0| ⊗ BA + |1⟩⟨1| ⊗ AB`.

use num_complex::Complex64;

use crate::dense::{self, Matrix};
use crate::error::{Error, Result};
use crate::gate::GateOp;
use crate::state::StateVector;

/// Largest total register (computation + order) for which a dense matrix is
/// built.
pub const MAX_DENSE_SWITCH_QUBITS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchProgram {
    branch_a: Vec<GateOp>,
    branch_b: Vec<GateOp>,
    n_comp: usize,
}

impl SwitchProgram {
    /// Both branches must act on qubits `0..n_comp` only and carry no
    /// conditions of their own.
    pub fn new(branch_a: Vec<GateOp>, branch_b: Vec<GateOp>, n_comp: usize) -> Result<Self> {
        for g in branch_a.iter().chain(&branch_b) {
            if g.condition.is_some() {
                return Err(Error::Structural(format!(
                    "switch branch gate {:?} is already conditioned",
                    g.kind
                )));
            }
            g.validate(n_comp).map_err(|_| {
                Error::Structural(format!(
                    "switch branch gate {:?} leaves the {n_comp}-qubit computation register",
                    g.kind
                ))
            })?;
        }
        Ok(SwitchProgram {
            branch_a,
            branch_b,
            n_comp,
        })
    }

    pub fn order_qubit(&self) -> usize {
        self.n_comp
    }

    pub fn n_comp(&self) -> usize {
        self.n_comp
    }

    pub fn n_total(&self) -> usize {
        self.n_comp + 1
    }

    pub fn branch_a(&self) -> &[GateOp] {
        &self.branch_a
    }

    pub fn branch_b(&self) -> &[GateOp] {
        &self.branch_b
    }

    /// Flattens both stages into one conditioned gate list.
    pub fn lower(&self) -> Vec<GateOp> {
        let t = self.order_qubit();
        let on = |gates: &[GateOp], value| {
            gates
                .iter()
                .map(move |g| g.when(t, value))
                .collect::<Vec<_>>()
        };
        [
            on(&self.branch_a, false),
            on(&self.branch_b, true),
            on(&self.branch_b, false),
            on(&self.branch_a, true),
        ]
        .concat()
    }
}

/// Hadamard on the order qubit (the last qubit of `state`).
pub fn prepare_order_qubit(state: &mut StateVector) -> Result<()> {
    let t = state.n_qubits() - 1;
    state.apply_gate(&GateOp::h(t), &[])
}

pub fn apply_switch(state: &mut StateVector, prog: &SwitchProgram, params: &[f64]) -> Result<()> {
    if state.n_qubits() != prog.n_total() {
        return Err(Error::Structural(format!(
            "switch over {} computation qubits needs a {}-qubit register, got {}",
            prog.n_comp,
            prog.n_total(),
            state.n_qubits()
        )));
    }
    state.apply_sequence(&prog.lower(), params)
}

/// `BA ⊗ |0⟩⟨0| + AB ⊗ |1⟩⟨1|` with the order qubit as the least
/// significant factor, built directly from the unconditioned branches.
pub fn switch_as_dense_matrix(prog: &SwitchProgram, params: &[f64]) -> Result<Matrix> {
    if prog.n_total() > MAX_DENSE_SWITCH_QUBITS {
        return Err(Error::Config(format!(
            "dense switch matrix capped at {MAX_DENSE_SWITCH_QUBITS} qubits, program needs {}",
            prog.n_total()
        )));
    }
    let a = dense::sequence_matrix(&prog.branch_a, prog.n_comp, params)?;
    let b = dense::sequence_matrix(&prog.branch_b, prog.n_comp, params)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let p0 = Matrix::from_row_slice(2, 2, &[one, zero, zero, zero]);
    let p1 = Matrix::from_row_slice(2, 2, &[zero, zero, zero, one]);
    Ok((&b * &a).kronecker(&p0) + (&a * &b).kronecker(&p1))
}

/// `⟨+|ρ_T|+⟩` for the reduced state of the order qubit.
pub fn order_qubit_fidelity_plus(state: &StateVector) -> Result<f64> {
    let rho = state.single_qubit_density(state.n_qubits() - 1)?;
    Ok(0.5 * (rho[0][0].re + rho[1][1].re) + 0.5 * (rho[0][1].re + rho[1][0].re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{Angle, Axis};
    use crate::state::{expectation_on_subset, Observable};

    fn amps_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    fn comp_branch(state: &StateVector, value: bool) -> Vec<Complex64> {
        state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & 1 == 1) == value)
            .map(|(_, a)| *a)
            .collect()
    }

    fn sample_program() -> SwitchProgram {
        let a = vec![GateOp::rx(0, 0.4), GateOp::ry(1, -0.8), GateOp::rz(2, 1.3)];
        let b = vec![
            GateOp::rotation(Axis::Y, 0, Angle::Param(0)),
            GateOp::cnot(0, 1),
            GateOp::rotation(Axis::Z, 2, Angle::Param(1)),
            GateOp::cnot(2, 0),
        ];
        SwitchProgram::new(a, b, 3).unwrap()
    }

    #[test]
    fn prepare_gives_plus_on_order_qubit() {
        let mut s = StateVector::new_zero(4).unwrap();
        prepare_order_qubit(&mut s).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amplitudes()[0].re - h).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - h).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_zero_runs_a_then_b() {
        let prog = sample_program();
        let params = [0.6, -1.1];
        let mut s = StateVector::new_zero(4).unwrap();
        apply_switch(&mut s, &prog, &params).unwrap();

        let mut plain = StateVector::new_zero(3).unwrap();
        plain.apply_sequence(prog.branch_a(), &params).unwrap();
        plain.apply_sequence(prog.branch_b(), &params).unwrap();
        assert!(amps_close(
            &comp_branch(&s, false),
            plain.amplitudes(),
            1e-14
        ));
        assert!(comp_branch(&s, true).iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn order_one_runs_b_then_a() {
        let prog = sample_program();
        let params = [0.6, -1.1];
        let mut s = StateVector::new_zero(4).unwrap();
        s.apply_gate(&GateOp::rx(3, std::f64::consts::PI), &[])
            .unwrap();
        apply_switch(&mut s, &prog, &params).unwrap();

        let mut plain = StateVector::new_zero(3).unwrap();
        plain.apply_sequence(prog.branch_b(), &params).unwrap();
        plain.apply_sequence(prog.branch_a(), &params).unwrap();
        // RX(π)|0⟩ = -i|1⟩
        let expected: Vec<_> = plain
            .amplitudes()
            .iter()
            .map(|a| a * Complex64::new(0.0, -1.0))
            .collect();
        assert!(amps_close(&comp_branch(&s, true), &expected, 1e-14));
    }

    #[test]
    fn commuting_branches_leave_order_qubit_plus() {
        let prog = SwitchProgram::new(
            vec![GateOp::rz(0, 0.3)],
            vec![GateOp::rotation(Axis::Z, 0, Angle::Param(0))],
            3,
        )
        .unwrap();
        let mut s = StateVector::new_zero(4).unwrap();
        s.apply_gate(&GateOp::h(0), &[]).unwrap();
        prepare_order_qubit(&mut s).unwrap();
        apply_switch(&mut s, &prog, &[1.7]).unwrap();
        assert!((order_qubit_fidelity_plus(&s).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn branch_on_order_qubit_rejected() {
        let err = SwitchProgram::new(vec![GateOp::rx(3, 0.1)], vec![], 3);
        assert!(matches!(err, Err(Error::Structural(_))));
        let err = SwitchProgram::new(vec![], vec![GateOp::rx(0, 0.1).when(1, true)], 3);
        assert!(matches!(err, Err(Error::Structural(_))));
    }

    #[test]
    fn register_size_mismatch_rejected() {
        let mut s = StateVector::new_zero(3).unwrap();
        assert!(apply_switch(&mut s, &sample_program(), &[0.0, 0.0]).is_err());
    }

    #[test]
    fn identity_branches_give_identity() {
        let prog = SwitchProgram::new(vec![], vec![], 2).unwrap();
        let m = switch_as_dense_matrix(&prog, &[]).unwrap();
        assert_eq!(m, Matrix::identity(8, 8));
    }

    #[test]
    fn dense_cap() {
        let prog = SwitchProgram::new(vec![], vec![], 5).unwrap();
        assert!(matches!(
            switch_as_dense_matrix(&prog, &[]),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn readout_excludes_order_qubit() {
        let prog = sample_program();
        let mut s = StateVector::new_zero(4).unwrap();
        prepare_order_qubit(&mut s).unwrap();
        apply_switch(&mut s, &prog, &[0.2, 0.9]).unwrap();
        let ev = expectation_on_subset(&s, &Observable::z(0), prog.order_qubit()).unwrap();
        assert!((-1.0..=1.0).contains(&ev));
    }
}
