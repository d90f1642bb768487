//! Gate tapes for the hardware-efficient ansatz and reverse-mode (adjoint)
//! differentiation of statevector circuits.
//!
//! A tape is a flat list of [`GateOp`]s applied left to right. Parametrized
//! rotations carry the index of their angle in the caller's parameter
//! vector, which is what [`adjoint_gradient`] accumulates into.

use num_complex::Complex64;

use crate::sim::Statevector;

/// One gate in a circuit tape.
#[derive(Clone, Copy, Debug)]
pub enum GateOp {
    Rx { qubit: usize, angle: f64, param: Option<usize> },
    Rz { qubit: usize, angle: f64, param: Option<usize> },
    Cnot { control: usize, target: usize },
}

/// Apply a single gate.
pub fn apply_gate(state: &mut Statevector, gate: &GateOp) {
    match *gate {
        GateOp::Rx { qubit, angle, .. } => state.apply_rx(qubit, angle),
        GateOp::Rz { qubit, angle, .. } => state.apply_rz(qubit, angle),
        GateOp::Cnot { control, target } => state.apply_cnot(control, target),
    }
}

/// Apply a whole tape in order.
pub fn apply_tape(state: &mut Statevector, tape: &[GateOp]) {
    for gate in tape {
        apply_gate(state, gate);
    }
}

fn apply_inverse(state: &mut Statevector, gate: &GateOp) {
    match *gate {
        GateOp::Rx { qubit, angle, .. } => state.apply_rx(qubit, -angle),
        GateOp::Rz { qubit, angle, .. } => state.apply_rz(qubit, -angle),
        GateOp::Cnot { control, target } => state.apply_cnot(control, target),
    }
}

/// One brick-layer block of the ansatz: Rx and Rz rotations on every qubit,
/// the staggered CNOT pattern applied twice, then a final Rz row per layer.
///
/// `angles` holds 3 angles per qubit per layer, layer-major then qubit-major;
/// parameter indices start at `param_base` and follow the same order.
pub fn layered_ansatz(n_qubits: usize, n_layers: usize, angles: &[f64], param_base: usize) -> Vec<GateOp> {
    assert_eq!(angles.len(), n_layers * n_qubits * 3, "angle count mismatch");
    let mut tape = Vec::with_capacity(n_layers * (3 * n_qubits + 2 * n_qubits));
    let idx = |layer: usize, qubit: usize, comp: usize| layer * n_qubits * 3 + (qubit - 1) * 3 + comp;
    for layer in 0..n_layers {
        for q in 1..=n_qubits {
            let k = idx(layer, q, 0);
            tape.push(GateOp::Rx { qubit: q, angle: angles[k], param: Some(param_base + k) });
        }
        for q in 1..=n_qubits {
            let k = idx(layer, q, 1);
            tape.push(GateOp::Rz { qubit: q, angle: angles[k], param: Some(param_base + k) });
        }
        for _ in 0..2 {
            // Even-control pairs (2,3), (4,5), … act first, then the odd-control
            // pairs (1,2), (3,4), … on top.
            for i in 1..=(n_qubits.saturating_sub(1)) / 2 {
                tape.push(GateOp::Cnot { control: 2 * i, target: 2 * i + 1 });
            }
            for i in 1..=n_qubits / 2 {
                tape.push(GateOp::Cnot { control: 2 * i - 1, target: 2 * i });
            }
        }
        for q in 1..=n_qubits {
            let k = idx(layer, q, 2);
            tape.push(GateOp::Rz { qubit: q, angle: angles[k], param: Some(param_base + k) });
        }
    }
    tape
}

/// The closing row of Rx rotations applied after all ansatz layers.
pub fn final_rotation_row(n_qubits: usize, angles: &[f64], param_base: usize) -> Vec<GateOp> {
    assert_eq!(angles.len(), n_qubits, "angle count mismatch");
    (1..=n_qubits)
        .map(|q| GateOp::Rx { qubit: q, angle: angles[q - 1], param: Some(param_base + q - 1) })
        .collect()
}

/// Gradient of a real scalar F(ψ) with respect to the tape's rotation angles.
///
/// `final_state` must be the tape applied to the circuit input, and `costate`
/// the Wirtinger gradient ∂F/∂ψ* evaluated there. For a rotation
/// exp(−iθP/2) the contribution is dF/dθ = Im ⟨λ|P|ψ⟩ with both vectors
/// back-propagated to the gate; the sweep undoes gates in reverse, so only
/// two working states are kept.
pub fn adjoint_gradient(
    tape: &[GateOp],
    n_params: usize,
    final_state: &Statevector,
    costate: &[Complex64],
) -> Vec<f64> {
    assert_eq!(costate.len(), final_state.dim(), "costate dimension mismatch");
    let mut grad = vec![0.0; n_params];
    let mut ket = final_state.clone();
    let mut bra = Statevector::from_amplitudes_unchecked(final_state.n_qubits(), costate.to_vec());

    for gate in tape.iter().rev() {
        match *gate {
            GateOp::Rx { qubit, param: Some(p), .. } => {
                let mut pk = ket.clone();
                pk.apply_pauli_x(qubit);
                grad[p] += bra.inner(&pk).im;
            }
            GateOp::Rz { qubit, param: Some(p), .. } => {
                let mut pk = ket.clone();
                pk.apply_pauli_z(qubit);
                grad[p] += bra.inner(&pk).im;
            }
            _ => {}
        }
        apply_inverse(&mut ket, gate);
        apply_inverse(&mut bra, gate);
    }
    grad
}
