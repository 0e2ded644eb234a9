#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qisc_core::dense;
use qisc_core::{Angle, Axis, GateOp, StateVector};
use rand::Rng;

pub fn random_gate<R: Rng>(rng: &mut R, n_qubits: usize, n_params: usize) -> GateOp {
    let q = rng.random_range(0..n_qubits);
    let choice = rng.random_range(0..if n_qubits > 1 { 5 } else { 4 });
    let angle = if n_params > 0 && rng.random_bool(0.5) {
        Angle::Param(rng.random_range(0..n_params))
    } else {
        Angle::Fixed(rng.random_range(-7.0..7.0))
    };
    match choice {
        0 => GateOp::rotation(Axis::X, q, angle),
        1 => GateOp::rotation(Axis::Y, q, angle),
        2 => GateOp::rotation(Axis::Z, q, angle),
        3 => GateOp::h(q),
        _ => {
            let t = (q + rng.random_range(1..n_qubits)) % n_qubits;
            GateOp::cnot(q, t)
        }
    }
}

pub fn random_circuit<R: Rng>(
    rng: &mut R,
    n_qubits: usize,
    len: usize,
    n_params: usize,
) -> Vec<GateOp> {
    (0..len)
        .map(|_| random_gate(rng, n_qubits, n_params))
        .collect()
}

pub fn random_params<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

pub fn random_state<R: Rng>(rng: &mut R, n_qubits: usize) -> StateVector {
    let amps = (0..1 << n_qubits)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn max_amp_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Dense product of the circuit applied to `state`.
pub fn dense_apply(gates: &[GateOp], state: &StateVector, params: &[f64]) -> Vec<Complex64> {
    let m = dense::sequence_matrix(gates, state.n_qubits(), params).unwrap();
    dense::apply_matrix(&m, state)
}

/// `Tr[ρ_A O]` where `ρ_A` keeps all qubits but the last and `O` is Z on
/// qubit `z_qubit` of the kept register, computed from the full density
/// matrix by an explicit partial trace.
pub fn partial_trace_z(state: &StateVector, z_qubit: usize) -> f64 {
    let n = state.n_qubits();
    let dim = 1usize << n;
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    let rho: DMatrix<Complex64> = &v * v.adjoint();
    let kept = dim / 2;
    let mut reduced = DMatrix::<Complex64>::zeros(kept, kept);
    for a in 0..kept {
        for b in 0..kept {
            for t in 0..2 {
                reduced[(a, b)] += rho[(2 * a + t, 2 * b + t)];
            }
        }
    }
    let n_kept = n - 1;
    let mut z = DMatrix::<Complex64>::zeros(kept, kept);
    for i in 0..kept {
        let bit = (i >> (n_kept - 1 - z_qubit)) & 1;
        z[(i, i)] = Complex64::new(if bit == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    let tr = (reduced * z).trace();
    assert!(tr.im.abs() < 1e-12);
    tr.re
}
