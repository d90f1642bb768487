//! Exact gradients of the classifier loss, a finite-difference oracle, and
//! the Adam update.
//!
//! The head and softmax cross-entropy are differentiated in closed form;
//! circuit angles get adjoint differentiation through the gate tape. Both
//! paths are checked against [`fd_grad`].

use crate::circuit;
use crate::classifier::{self, ClassifierParams};
use crate::dataset::Sample;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Mean loss over a batch and its exact gradient in flat-parameter order.
pub fn loss_and_grad(params: &ClassifierParams, batch: &[Sample]) -> Result<(f64, Vec<f64>)> {
    assert!(!batch.is_empty(), "gradient over an empty batch");
    let n = params.n_qubits();
    let circuit_p = params.circuit_param_count();
    let total_p = params.param_count();
    let tape = params.circuit_tape();

    let mut loss_sum = 0.0;
    let mut grad = vec![0.0; total_p];

    for s in batch {
        let mut psi = s.state.clone();
        circuit::apply_tape(&mut psi, &tape);
        let z: Vec<f64> = (1..=n).map(|q| psi.expect_z(q)).collect();
        let cache = classifier::head_forward_cached(params, &z);
        loss_sum += classifier::cross_entropy(cache.logits, s.label);

        // softmax cross-entropy backward
        let m = cache.logits[0].max(cache.logits[1]);
        let e0 = (cache.logits[0] - m).exp();
        let e1 = (cache.logits[1] - m).exp();
        let sum = e0 + e1;
        let mut dlogits = [e0 / sum, e1 / sum];
        dlogits[usize::from(s.label)] -= 1.0;

        // head backward
        let mut d_hidden = vec![0.0; n];
        for k in 0..2 {
            grad[total_p - 2 + k] += dlogits[k]; // b2
            for i in 0..n {
                grad[circuit_p + n * n + n + k * n + i] += dlogits[k] * cache.hidden[i]; // w2
                d_hidden[i] += dlogits[k] * params.w2[k * n + i];
            }
        }
        let mut dz = vec![0.0; n];
        for i in 0..n {
            let d_pre = d_hidden[i] * (1.0 - cache.hidden[i] * cache.hidden[i]);
            grad[circuit_p + n * n + i] += d_pre; // b1
            for j in 0..n {
                grad[circuit_p + i * n + j] += d_pre * z[j]; // w1
                dz[j] += d_pre * params.w1[i * n + j];
            }
        }

        // circuit backward: co-state λ_b = ψ_b Σ_i dz_i·(±1 for qubit i's bit)
        let dim = psi.dim();
        let mut costate = vec![Complex64::ZERO; dim];
        for (b, c) in costate.iter_mut().enumerate() {
            let mut weight = 0.0;
            for (i, dzi) in dz.iter().enumerate() {
                let bit = (b >> (n - 1 - i)) & 1;
                weight += if bit == 0 { *dzi } else { -*dzi };
            }
            *c = psi.amplitudes()[b] * weight;
        }
        let circuit_grad = circuit::adjoint_gradient(&tape, circuit_p, &psi, &costate);
        for (g, c) in grad.iter_mut().zip(circuit_grad) {
            *g += c;
        }
    }

    let scale = 1.0 / batch.len() as f64;
    loss_sum *= scale;
    for g in grad.iter_mut() {
        *g *= scale;
    }

    if !loss_sum.is_finite() {
        return Err(Error::NonFinite { param_index: 0 });
    }
    if let Some(idx) = grad.iter().position(|g| !g.is_finite()) {
        return Err(Error::NonFinite { param_index: idx });
    }
    Ok((loss_sum, grad))
}

/// Central-difference gradient of an arbitrary scalar function.
pub fn central_difference(mut f: impl FnMut(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "step size must be positive");
    let mut x = x.to_vec();
    let mut grad = vec![0.0; x.len()];
    for j in 0..x.len() {
        let orig = x[j];
        x[j] = orig + h;
        let up = f(&x);
        x[j] = orig - h;
        let down = f(&x);
        x[j] = orig;
        grad[j] = (up - down) / (2.0 * h);
    }
    grad
}

/// Finite-difference gradient of the batch loss; the oracle that
/// [`loss_and_grad`] is tested against.
pub fn fd_grad(params: &ClassifierParams, batch: &[Sample], h: f64) -> Vec<f64> {
    let n_qubits = params.n_qubits();
    let n_layers = params.n_layers();
    central_difference(
        |flat| classifier::loss(&ClassifierParams::unflatten(n_qubits, n_layers, flat), batch),
        &params.flatten(),
        h,
    )
}

/// Adam optimizer state over a flat parameter vector.
#[derive(Clone, Debug)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub step_count: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AdamState {
    pub fn new(n_params: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step_count: 0,
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
        }
    }

    /// One bias-corrected update step, in place.
    pub fn update(&mut self, params: &mut [f64], grad: &[f64]) {
        assert_eq!(params.len(), grad.len());
        assert_eq!(params.len(), self.m.len());
        self.step_count += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step_count as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step_count as i32);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Statevector;
    use num_complex::Complex64;
    use rand::Rng;

    fn random_batch(n: usize, count: usize, seed: u64) -> Vec<Sample> {
        let mut rng = crate::rng::seeded(seed);
        (0..count)
            .map(|_| {
                let dim = 1usize << n;
                let mut amps: Vec<Complex64> = (0..dim)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                for a in &mut amps {
                    *a /= norm;
                }
                Sample {
                    state: Statevector::from_amplitudes(n, amps),
                    label: rng.random_range(0..2u8),
                }
            })
            .collect()
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / 1.0f64.max(a.abs()).max(b.abs())
    }

    #[test]
    fn central_difference_exact_on_quadratics() {
        let coeffs = [2.0, -1.5, 0.25];
        let f = |x: &[f64]| x.iter().zip(coeffs).map(|(xi, c)| c * xi * xi).sum::<f64>();
        let x = [1.0, -2.0, 3.0];
        let g = central_difference(f, &x, 1e-4);
        for (j, (xi, c)) in x.iter().zip(coeffs).enumerate() {
            assert!((g[j] - 2.0 * c * xi).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_gradient_matches_fd_oracle() {
        let mut rng = crate::rng::seeded(101);
        let mut worst = 0.0f64;
        for trial in 0..10 {
            let params = ClassifierParams::random_init(4, 1, &mut rng);
            let batch = random_batch(4, 4, 500 + trial);
            let (_, grad) = loss_and_grad(&params, &batch).unwrap();
            let fd = fd_grad(&params, &batch, 1e-5);
            for (a, b) in grad.iter().zip(&fd) {
                worst = worst.max(rel_err(*a, *b));
            }
        }
        assert!(worst < 1e-5, "max relative error {worst}");
    }

    #[test]
    fn zero_head_blocks_circuit_gradient() {
        let mut rng = crate::rng::seeded(5);
        let mut params = ClassifierParams::random_init(3, 1, &mut rng);
        for w in params.w1.iter_mut().chain(params.w2.iter_mut()) {
            *w = 0.0;
        }
        let batch = random_batch(3, 3, 9);
        let (_, grad) = loss_and_grad(&params, &batch).unwrap();
        for g in &grad[..params.circuit_param_count()] {
            assert_eq!(*g, 0.0);
        }
    }

    #[test]
    fn batch_gradient_is_mean_of_per_sample_gradients() {
        let mut rng = crate::rng::seeded(6);
        let params = ClassifierParams::random_init(3, 1, &mut rng);
        let batch = random_batch(3, 5, 77);
        let (_, grad) = loss_and_grad(&params, &batch).unwrap();
        let mut mean = vec![0.0; params.param_count()];
        for s in &batch {
            let (_, g) = loss_and_grad(&params, std::slice::from_ref(s)).unwrap();
            for (m, v) in mean.iter_mut().zip(g) {
                *m += v / batch.len() as f64;
            }
        }
        for (a, b) in grad.iter().zip(&mean) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn large_step_degrades_fd_accuracy() {
        let mut rng = crate::rng::seeded(8);
        let params = ClassifierParams::random_init(3, 1, &mut rng);
        let batch = random_batch(3, 3, 15);
        let (_, exact) = loss_and_grad(&params, &batch).unwrap();
        let err = |fd: &[f64]| {
            fd.iter()
                .zip(&exact)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        };
        let fine = err(&fd_grad(&params, &batch, 1e-5));
        let coarse = err(&fd_grad(&params, &batch, 0.1));
        assert!(coarse > fine, "coarse {coarse} should exceed fine {fine}");
        assert!(coarse > 1e-6, "h=0.1 should show visible truncation error");
    }

    #[test]
    fn adam_first_step_and_zero_gradient() {
        let mut adam = AdamState::new(2, 0.1);
        let mut params = vec![0.0, 3.0];
        adam.update(&mut params, &[1.0, 0.0]);
        // m̂ = 1, v̂ = 1 on the first step.
        let expected = -0.1 / (1.0 + 1e-8);
        assert!((params[0] - expected).abs() < 1e-15);
        assert!((params[0] + 0.0999999999).abs() < 1e-9);
        assert_eq!(params[1], 3.0);
        assert_eq!(adam.step_count, 1);

        let mut adam = AdamState::new(1, 0.1);
        let mut params = vec![0.7];
        for _ in 0..50 {
            adam.update(&mut params, &[0.0]);
        }
        assert_eq!(params[0], 0.7);
    }

    #[test]
    fn adam_converges_on_parabola() {
        let mut adam = AdamState::new(1, 0.1);
        let mut theta = vec![1.0];
        for _ in 0..200 {
            let g = [2.0 * theta[0]];
            adam.update(&mut theta, &g);
        }
        assert!(theta[0].abs() < 0.01, "theta = {}", theta[0]);
    }
}
