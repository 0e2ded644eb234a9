//! Dense statevector storage and in-place gate kernels.
//!
//! Qubit 0 is the most significant bit of the amplitude index, so on an
//! `n`-qubit register qubit `q` lives at bit `n - 1 - q`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{Axis, Condition, GateKind, GateOp};

pub const MAX_QUBITS: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new_zero(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes, rescaling them to unit norm.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Structural(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain(
                "amplitude vector has zero or non-finite norm".into(),
            ));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_gate(&mut self, gate: &GateOp, params: &[f64]) -> Result<()> {
        let kernel = Kernel::compile(gate, self.n_qubits, params)?;
        kernel.apply(&mut self.amps);
        Ok(())
    }

    /// Applies `gates` left to right.
    pub fn apply_sequence(&mut self, gates: &[GateOp], params: &[f64]) -> Result<()> {
        for gate in gates {
            self.apply_gate(gate, params)?;
        }
        Ok(())
    }

    /// Reduced density matrix `[[ρ00, ρ01], [ρ10, ρ11]]` of one qubit.
    pub fn single_qubit_density(&self, qubit: usize) -> Result<[[Complex64; 2]; 2]> {
        if qubit >= self.n_qubits {
            return Err(Error::Structural(format!(
                "qubit {qubit} out of range for {} qubits",
                self.n_qubits
            )));
        }
        let stride = 1usize << (self.n_qubits - 1 - qubit);
        let mut rho = [[ZERO; 2]; 2];
        for i in (0..self.dim()).filter(|i| i & stride == 0) {
            let a0 = self.amps[i];
            let a1 = self.amps[i | stride];
            rho[0][0] += a0 * a0.conj();
            rho[0][1] += a0 * a1.conj();
            rho[1][0] += a1 * a0.conj();
            rho[1][1] += a1 * a1.conj();
        }
        Ok(rho)
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "qubit count {n_qubits} outside 1..={MAX_QUBITS}"
        )))
    }
}

/// Pauli-Z on one qubit, identity elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observable {
    pub qubit: usize,
}

impl Observable {
    pub fn z(qubit: usize) -> Self {
        Observable { qubit }
    }

    fn check(&self, n_qubits: usize) -> Result<usize> {
        if self.qubit >= n_qubits {
            return Err(Error::Structural(format!(
                "observable qubit {} out of range for {n_qubits} qubits",
                self.qubit
            )));
        }
        Ok(1 << (n_qubits - 1 - self.qubit))
    }

    /// `O|ψ⟩` as a new state (not normalized in general, but Z is unitary).
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let bit = self.check(state.n_qubits)?;
        let amps = state
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & bit == 0 { *a } else { -a })
            .collect();
        Ok(StateVector {
            n_qubits: state.n_qubits,
            amps,
        })
    }
}

/// `⟨ψ|O|ψ⟩`. Z is diagonal, so the raw inner product is real by
/// construction and no imaginary part is formed.
pub fn expectation(state: &StateVector, obs: &Observable) -> Result<f64> {
    let bit = obs.check(state.n_qubits)?;
    Ok(state
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if i & bit == 0 {
                a.norm_sqr()
            } else {
                -a.norm_sqr()
            }
        })
        .sum())
}

/// `⟨ψ|(I_order ⊗ O)|ψ⟩`, i.e. `Tr[ρ_comp O]` with the order qubit traced out.
pub fn expectation_on_subset(
    state: &StateVector,
    obs: &Observable,
    order_qubit: usize,
) -> Result<f64> {
    if obs.qubit == order_qubit {
        return Err(Error::Structural(format!(
            "observable acts on order qubit {order_qubit}"
        )));
    }
    if order_qubit >= state.n_qubits {
        return Err(Error::Structural(format!(
            "order qubit {order_qubit} out of range for {} qubits",
            state.n_qubits
        )));
    }
    expectation(state, obs)
}

/// 2×2 unitary of a single-qubit gate kind, row-major.
pub fn single_qubit_matrix(kind: &GateKind, params: &[f64]) -> Result<Option<[Complex64; 4]>> {
    Ok(match *kind {
        GateKind::Rotation { axis, angle, .. } => {
            Some(rotation_matrix(axis, angle.resolve(params)?))
        }
        GateKind::Hadamard { .. } => {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            Some([h, h, h, -h])
        }
        GateKind::Cnot { .. } => None,
    })
}

/// `exp(-i θ P / 2)`.
pub fn rotation_matrix(axis: Axis, theta: f64) -> [Complex64; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    match axis {
        Axis::X => [
            Complex64::new(c, 0.0),
            Complex64::new(0.0, -s),
            Complex64::new(0.0, -s),
            Complex64::new(c, 0.0),
        ],
        Axis::Y => [
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
        Axis::Z => [Complex64::new(c, -s), ZERO, ZERO, Complex64::new(c, s)],
    }
}

/// A gate resolved against a register size and parameter vector, expressed
/// in bit positions rather than qubit labels.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Kernel {
    Single {
        bit: usize,
        m: [Complex64; 4],
        cond: Option<(usize, bool)>,
    },
    Cnot {
        cbit: usize,
        tbit: usize,
        cond: Option<(usize, bool)>,
    },
}

impl Kernel {
    pub(crate) fn compile(gate: &GateOp, n_qubits: usize, params: &[f64]) -> Result<Self> {
        gate.validate(n_qubits)?;
        let bit = |q: usize| 1usize << (n_qubits - 1 - q);
        let cond = gate
            .condition
            .map(|Condition { qubit, value }| (bit(qubit), value));
        Ok(match gate.kind {
            GateKind::Cnot { control, target } => Kernel::Cnot {
                cbit: bit(control),
                tbit: bit(target),
                cond,
            },
            GateKind::Rotation { qubit, .. } | GateKind::Hadamard { qubit } => Kernel::Single {
                bit: bit(qubit),
                m: single_qubit_matrix(&gate.kind, params)?.expect("single-qubit kind"),
                cond,
            },
        })
    }

    /// Conjugate transpose.
    pub(crate) fn dagger(self) -> Self {
        match self {
            Kernel::Single { bit, m, cond } => Kernel::Single {
                bit,
                m: [m[0].conj(), m[2].conj(), m[1].conj(), m[3].conj()],
                cond,
            },
            cnot => cnot,
        }
    }

    pub(crate) fn apply(&self, amps: &mut [Complex64]) {
        match *self {
            Kernel::Single { bit, m, cond } => {
                for i in pair_indices(amps.len(), bit, cond) {
                    let j = i | bit;
                    let (a, b) = (amps[i], amps[j]);
                    amps[i] = m[0] * a + m[1] * b;
                    amps[j] = m[2] * a + m[3] * b;
                }
            }
            Kernel::Cnot { cbit, tbit, cond } => {
                for i in pair_indices(amps.len(), tbit, cond) {
                    if i & cbit != 0 {
                        amps.swap(i, i | tbit);
                    }
                }
            }
        }
    }
}

/// Indices with `bit` clear that also satisfy the optional condition.
fn pair_indices(
    dim: usize,
    bit: usize,
    cond: Option<(usize, bool)>,
) -> impl Iterator<Item = usize> {
    (0..dim)
        .filter(move |&i| i & bit == 0 && cond.is_none_or(|(cbit, value)| (i & cbit != 0) == value))
}

/// `⟨bra| G |ket⟩` where `G` is the Pauli generator of a rotation kernel,
/// restricted to the kernel's condition subspace.
pub(crate) fn generator_overlap(
    bra: &[Complex64],
    ket: &[Complex64],
    axis: Axis,
    bit: usize,
    cond: Option<(usize, bool)>,
) -> Complex64 {
    let mut acc = ZERO;
    for i in pair_indices(ket.len(), bit, cond) {
        let j = i | bit;
        let (a, b) = (ket[i], ket[j]);
        // (P ket)_i, (P ket)_j
        let (pi, pj) = match axis {
            Axis::X => (b, a),
            Axis::Y => (Complex64::new(b.im, -b.re), Complex64::new(-a.im, a.re)),
            Axis::Z => (a, -b),
        };
        acc += bra[i].conj() * pi + bra[j].conj() * pj;
    }
    acc
}
