//! Dense statevector simulation with the minimal gate set used by the
//! classifier ansatz and the spin-chain Hamiltonians.
//!
//! Conventions, fixed once and used everywhere:
//!
//! * Qubits are numbered `1..=n_qubits`. Qubit 1 is the **most significant
//!   bit** of the basis-state index, so for two qubits `|10⟩` (qubit 1 in
//!   state 1, qubit 2 in state 0) is basis index 2.
//! * Rotations use the generator convention `Rx(θ) = exp(−iθX/2)` and
//!   `Rz(θ) = exp(−iθZ/2)`.

use num_complex::Complex64;

/// Normalized pure state of `n_qubits` qubits as 2^n complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// The all-zeros computational basis state |0…0⟩.
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis_state(n_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits >= 1 && n_qubits <= 24, "unsupported qubit count {n_qubits}");
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range for {n_qubits} qubits");
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Self { n_qubits, amps }
    }

    /// The uniform superposition |+⟩^⊗n.
    pub fn plus_state(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self { n_qubits, amps: vec![a; dim] }
    }

    /// Wrap raw amplitudes. Panics unless the vector has length 2^n and is
    /// normalized to within 1e-10.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1usize << n_qubits, "amplitude count must be 2^n_qubits");
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert!(
            (norm_sqr - 1.0).abs() < 1e-10,
            "state not normalized: |ψ|² = {norm_sqr}"
        );
        Self { n_qubits, amps }
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

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit position (from the least significant end) holding `qubit`.
    fn bit(&self, qubit: usize) -> usize {
        assert!(
            qubit >= 1 && qubit <= self.n_qubits,
            "qubit index {qubit} out of range 1..={}",
            self.n_qubits
        );
        self.n_qubits - qubit
    }

    /// Visit all (index with bit 0, index with bit 1) amplitude pairs for a bit position.
    #[inline]
    fn for_each_pair(&mut self, bit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let mask = 1usize << bit;
        let dim = self.amps.len();
        let mut base = 0;
        while base < dim {
            for off in base..base + mask {
                let (lo, hi) = self.amps.split_at_mut(off + mask);
                f(&mut lo[off], &mut hi[0]);
            }
            base += mask << 1;
        }
    }

    /// Rx(θ) = exp(−iθX/2) on one qubit.
    pub fn apply_rx(&mut self, qubit: usize, angle: f64) {
        let bit = self.bit(qubit);
        let c = (angle / 2.0).cos();
        let s = (angle / 2.0).sin();
        let m_is = Complex64::new(0.0, -s);
        self.for_each_pair(bit, |a0, a1| {
            let (x0, x1) = (*a0, *a1);
            *a0 = c * x0 + m_is * x1;
            *a1 = m_is * x0 + c * x1;
        });
    }

    /// Rz(θ) = exp(−iθZ/2) on one qubit.
    pub fn apply_rz(&mut self, qubit: usize, angle: f64) {
        let bit = self.bit(qubit);
        let p0 = Complex64::from_polar(1.0, -angle / 2.0);
        let p1 = Complex64::from_polar(1.0, angle / 2.0);
        self.for_each_pair(bit, |a0, a1| {
            *a0 *= p0;
            *a1 *= p1;
        });
    }

    /// CNOT with the given control and target qubits.
    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        assert_ne!(control, target, "CNOT control and target must differ");
        let cbit = self.bit(control);
        let tbit = self.bit(target);
        let cmask = 1usize << cbit;
        let tmask = 1usize << tbit;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
    }

    /// Pauli X on one qubit.
    pub fn apply_pauli_x(&mut self, qubit: usize) {
        let bit = self.bit(qubit);
        self.for_each_pair(bit, |a0, a1| std::mem::swap(a0, a1));
    }

    /// Pauli Z on one qubit.
    pub fn apply_pauli_z(&mut self, qubit: usize) {
        let bit = self.bit(qubit);
        self.for_each_pair(bit, |_, a1| *a1 = -*a1);
    }

    /// ⟨ψ|σ_z^qubit|ψ⟩. Always real; in [−1, 1] for a normalized state.
    pub fn expect_z(&self, qubit: usize) -> f64 {
        let mask = 1usize << self.bit(qubit);
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            acc += if i & mask == 0 { p } else { -p };
        }
        acc
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch in inner product");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn from_amplitudes_unchecked(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        Self { n_qubits, amps }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn random_state(n: usize, rng: &mut ChaCha12Rng) -> Statevector {
        let dim = 1usize << n;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Statevector::from_amplitudes(n, amps)
    }

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!((a - b).norm() < tol, "{a} != {b}");
    }

    #[test]
    fn rx_identity_and_pi() {
        let mut s = Statevector::zero_state(1);
        s.apply_rx(1, 0.0);
        assert_close(s.amplitudes()[0], Complex64::ONE, 1e-15);

        let mut s = Statevector::zero_state(1);
        s.apply_rx(1, PI);
        // Rx(π) = −iX
        assert_close(s.amplitudes()[0], Complex64::ZERO, 1e-15);
        assert_close(s.amplitudes()[1], Complex64::new(0.0, -1.0), 1e-15);
    }

    #[test]
    fn rx_half_pi_matches_matrix_exponential() {
        // exp(−i(π/2)X/2) |0⟩ = (|0⟩ − i|1⟩)/√2, worked out from the 2×2 series.
        let mut s = Statevector::zero_state(1);
        s.apply_rx(1, PI / 2.0);
        assert_close(s.amplitudes()[0], Complex64::new(FRAC_1_SQRT_2, 0.0), 1e-12);
        assert_close(s.amplitudes()[1], Complex64::new(0.0, -FRAC_1_SQRT_2), 1e-12);
    }

    #[test]
    fn rz_phases() {
        let mut s = Statevector::zero_state(1);
        s.apply_rz(1, 0.7);
        assert_close(s.amplitudes()[0], Complex64::from_polar(1.0, -0.35), 1e-15);

        // Rz(π) flips ⟨X⟩ on |+⟩ up to global phase.
        let mut s = Statevector::plus_state(1);
        s.apply_rz(1, PI);
        let mut x = s.clone();
        x.apply_pauli_x(1);
        let ex = s.inner(&x).re;
        assert!((ex + 1.0).abs() < 1e-12, "⟨X⟩ = {ex}");

        let mut s = Statevector::plus_state(2);
        let before = s.clone();
        s.apply_rz(2, 0.0);
        assert_eq!(s, before);
    }

    #[test]
    fn cnot_basis_action() {
        // |10⟩: qubit 1 set → target flips.
        let mut s = Statevector::basis_state(2, 0b10);
        s.apply_cnot(1, 2);
        assert_close(s.amplitudes()[0b11], Complex64::ONE, 1e-15);

        let mut s = Statevector::basis_state(2, 0b00);
        s.apply_cnot(1, 2);
        assert_close(s.amplitudes()[0b00], Complex64::ONE, 1e-15);
    }

    #[test]
    fn cnot_is_involution() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let orig = random_state(4, &mut rng);
        let mut s = orig.clone();
        s.apply_cnot(2, 4);
        s.apply_cnot(2, 4);
        for (a, b) in s.amplitudes().iter().zip(orig.amplitudes()) {
            assert_close(*a, *b, 1e-12);
        }
    }

    #[test]
    fn expect_z_values() {
        assert!((Statevector::zero_state(1).expect_z(1) - 1.0).abs() < 1e-15);
        assert!(Statevector::plus_state(1).expect_z(1).abs() < 1e-15);

        // GHZ_2 = (|00⟩ + |11⟩)/√2: ⟨Z⟩ = ½·(+1) + ½·(−1) = 0.
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let ghz = Statevector::from_amplitudes(2, vec![a, Complex64::ZERO, Complex64::ZERO, a]);
        assert!(ghz.expect_z(1).abs() < 1e-15);
    }

    #[test]
    fn inner_product_basics() {
        let z = Statevector::zero_state(1);
        let o = Statevector::basis_state(1, 1);
        assert_close(z.inner(&z), Complex64::ONE, 1e-15);
        assert_close(z.inner(&o), Complex64::ZERO, 1e-15);

        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let psi = random_state(3, &mut rng);
        assert_close(psi.inner(&psi), Complex64::ONE, 1e-12);
    }

    #[test]
    fn norm_preserved_by_random_gate_sequences() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut s = random_state(5, &mut rng);
        for _ in 0..200 {
            match rng.random_range(0..3) {
                0 => s.apply_rx(rng.random_range(1..=5), rng.random_range(-PI..PI)),
                1 => s.apply_rz(rng.random_range(1..=5), rng.random_range(-PI..PI)),
                _ => {
                    let c = rng.random_range(1..=5);
                    let mut t = rng.random_range(1..=5);
                    if t == c {
                        t = c % 5 + 1;
                    }
                    s.apply_cnot(c, t);
                }
            }
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gates_preserve_inner_products() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let psi = random_state(4, &mut rng);
        let phi = random_state(4, &mut rng);
        let before = psi.inner(&phi);

        let mut psi2 = psi.clone();
        let mut phi2 = phi.clone();
        for (q, a) in [(1, 0.3), (3, -1.2), (4, 2.2)] {
            psi2.apply_rx(q, a);
            phi2.apply_rx(q, a);
            psi2.apply_rz(q, -a);
            phi2.apply_rz(q, -a);
        }
        psi2.apply_cnot(2, 3);
        phi2.apply_cnot(2, 3);
        assert_close(psi2.inner(&phi2), before, 1e-10);
    }

    #[test]
    fn disjoint_cnot_and_rz_commute() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        let s = random_state(4, &mut rng);

        let mut ab = s.clone();
        ab.apply_cnot(1, 2);
        ab.apply_rz(4, 0.9);

        let mut ba = s.clone();
        ba.apply_rz(4, 0.9);
        ba.apply_cnot(1, 2);

        for (a, b) in ab.amplitudes().iter().zip(ba.amplitudes()) {
            assert_close(*a, *b, 1e-12);
        }
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn out_of_range_qubit_panics() {
        let mut s = Statevector::zero_state(2);
        s.apply_rx(3, 0.1);
    }

    #[test]
    #[should_panic(expected = "must differ")]
    fn cnot_equal_indices_panics() {
        let mut s = Statevector::zero_state(2);
        s.apply_cnot(1, 1);
    }
}
