//! The variational quantum classifier: a layered Rx/Rz/CNOT ansatz measured
//! in the Z basis on every qubit, followed by a one-hidden-layer network
//! that maps the measurement vector to two class logits.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::circuit::{self, GateOp};
use crate::dataset::Sample;
use crate::error::{Error, Result};
use crate::sim::Statevector;

const CHECKPOINT_MAGIC: &[u8; 4] = b"QCLP";
const CHECKPOINT_VERSION: u16 = 1;

/// All trainable parameters: circuit angles plus readout weights.
///
/// The flat layout (used by the optimizer, gradients, and checkpoints) is:
/// layer angles (layer-major, 3 per qubit), final Rx angles, then the head
/// as W1 (row-major n×n), b1, W2 (row-major 2×n), b2.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierParams {
    n_qubits: usize,
    n_layers: usize,
    pub layer_angles: Vec<f64>,
    pub final_angles: Vec<f64>,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl ClassifierParams {
    pub fn zeros(n_qubits: usize, n_layers: usize) -> Self {
        Self {
            n_qubits,
            n_layers,
            layer_angles: vec![0.0; n_layers * n_qubits * 3],
            final_angles: vec![0.0; n_qubits],
            w1: vec![0.0; n_qubits * n_qubits],
            b1: vec![0.0; n_qubits],
            w2: vec![0.0; 2 * n_qubits],
            b2: vec![0.0; 2],
        }
    }

    /// Random initialization: every circuit angle uniform in [−π, π], every
    /// head weight and bias uniform in [−1/√n, 1/√n]. Values are drawn in
    /// flat-layout order, so a seeded generator gives a reproducible start.
    pub fn random_init(n_qubits: usize, n_layers: usize, rng: &mut ChaCha12Rng) -> Self {
        use std::f64::consts::PI;
        let mut p = Self::zeros(n_qubits, n_layers);
        let bound = 1.0 / (n_qubits as f64).sqrt();
        for a in p.layer_angles.iter_mut().chain(p.final_angles.iter_mut()) {
            *a = rng.random_range(-PI..PI);
        }
        for w in p
            .w1
            .iter_mut()
            .chain(p.b1.iter_mut())
            .chain(p.w2.iter_mut())
            .chain(p.b2.iter_mut())
        {
            *w = rng.random_range(-bound..bound);
        }
        p
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    /// Number of circuit-angle parameters (the head starts at this offset in
    /// the flat layout).
    pub fn circuit_param_count(&self) -> usize {
        self.n_layers * self.n_qubits * 3 + self.n_qubits
    }

    pub fn param_count(&self) -> usize {
        Self::param_count_for(self.n_qubits, self.n_layers)
    }

    pub fn param_count_for(n_qubits: usize, n_layers: usize) -> usize {
        n_layers * n_qubits * 3 + n_qubits + n_qubits * n_qubits + n_qubits + 2 * n_qubits + 2
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        flat.extend_from_slice(&self.layer_angles);
        flat.extend_from_slice(&self.final_angles);
        flat.extend_from_slice(&self.w1);
        flat.extend_from_slice(&self.b1);
        flat.extend_from_slice(&self.w2);
        flat.extend_from_slice(&self.b2);
        flat
    }

    pub fn unflatten(n_qubits: usize, n_layers: usize, flat: &[f64]) -> Self {
        let mut p = Self::zeros(n_qubits, n_layers);
        p.assign_from_flat(flat);
        p
    }

    /// Overwrite all parameters from a flat vector (inverse of [`flatten`]).
    pub fn assign_from_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "flat parameter length mismatch");
        let mut at = 0;
        for dst in [
            &mut self.layer_angles,
            &mut self.final_angles,
            &mut self.w1,
            &mut self.b1,
            &mut self.w2,
            &mut self.b2,
        ] {
            let len = dst.len();
            dst.copy_from_slice(&flat[at..at + len]);
            at += len;
        }
    }

    /// Full circuit tape with parameter indices matching the flat layout.
    pub fn circuit_tape(&self) -> Vec<GateOp> {
        let mut tape = circuit::layered_ansatz(self.n_qubits, self.n_layers, &self.layer_angles, 0);
        tape.extend(circuit::final_rotation_row(
            self.n_qubits,
            &self.final_angles,
            self.n_layers * self.n_qubits * 3,
        ));
        tape
    }

    /// Write a checkpoint: magic, version, qubit and layer counts, then the
    /// flat parameter vector as little-endian f64.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::with_capacity(10 + 8 * self.param_count());
        buf.extend_from_slice(CHECKPOINT_MAGIC);
        buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n_qubits as u16).to_le_bytes());
        buf.extend_from_slice(&(self.n_layers as u16).to_le_bytes());
        for v in self.flatten() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        let mut f = fs::File::create(path)?;
        f.write_all(&buf)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        if bytes.len() < 10 || &bytes[0..4] != CHECKPOINT_MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let n_qubits = u16::from_le_bytes([bytes[6], bytes[7]]) as usize;
        let n_layers = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
        let p = Self::param_count_for(n_qubits, n_layers);
        if bytes.len() != 10 + 8 * p {
            return Err(Error::Checkpoint(format!(
                "expected {} bytes of parameters, found {}",
                8 * p,
                bytes.len() - 10
            )));
        }
        let flat: Vec<f64> = bytes[10..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self::unflatten(n_qubits, n_layers, &flat))
    }
}

/// Run the circuit on an input state and measure ⟨Z⟩ on every qubit.
pub fn circuit_forward(params: &ClassifierParams, x: &Statevector) -> Vec<f64> {
    assert_eq!(params.n_qubits, x.n_qubits(), "parameter shape does not match input state");
    let mut state = x.clone();
    circuit::apply_tape(&mut state, &params.circuit_tape());
    (1..=params.n_qubits).map(|q| state.expect_z(q)).collect()
}

/// Readout network: logits = W2·tanh(W1·z + b1) + b2.
pub fn head_forward(params: &ClassifierParams, z: &[f64]) -> [f64; 2] {
    head_forward_cached(params, z).logits
}

pub(crate) struct HeadCache {
    pub hidden: Vec<f64>,
    pub logits: [f64; 2],
}

pub(crate) fn head_forward_cached(params: &ClassifierParams, z: &[f64]) -> HeadCache {
    let n = params.n_qubits;
    assert_eq!(z.len(), n, "measurement vector length mismatch");
    let mut hidden = vec![0.0; n];
    for i in 0..n {
        let mut acc = params.b1[i];
        for j in 0..n {
            acc += params.w1[i * n + j] * z[j];
        }
        hidden[i] = acc.tanh();
    }
    let mut logits = [0.0; 2];
    for (k, logit) in logits.iter_mut().enumerate() {
        let mut acc = params.b2[k];
        for (i, h) in hidden.iter().enumerate() {
            acc += params.w2[k * n + i] * h;
        }
        *logit = acc;
    }
    HeadCache { hidden, logits }
}

/// Predicted class label; ties go to label 0.
pub fn predict(params: &ClassifierParams, x: &Statevector) -> u8 {
    let logits = head_forward(params, &circuit_forward(params, x));
    u8::from(logits[1] > logits[0])
}

/// Numerically stable softmax cross-entropy of a two-logit pair.
pub fn cross_entropy(logits: [f64; 2], label: u8) -> f64 {
    let m = logits[0].max(logits[1]);
    let lse = m + ((logits[0] - m).exp() + (logits[1] - m).exp()).ln();
    lse - logits[usize::from(label)]
}

/// Mean softmax cross-entropy over a batch.
pub fn loss(params: &ClassifierParams, batch: &[Sample]) -> f64 {
    assert!(!batch.is_empty(), "loss over an empty batch");
    let total: f64 = batch
        .iter()
        .map(|s| cross_entropy(head_forward(params, &circuit_forward(params, &s.state)), s.label))
        .sum();
    total / batch.len() as f64
}
