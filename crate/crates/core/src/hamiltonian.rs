//! Spin-chain Hamiltonians as dense Hermitian matrices: construction from
//! Pauli strings, exact ground states, and e^{−iH} time evolution.
//!
//! Everything here runs through one dense eigendecomposition, which is exact
//! and cheap at the 8-qubit scale the datasets use (256×256 matrices).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::Statevector;

/// Single-qubit Pauli operator label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// Dense Hermitian operator on `n_qubits` qubits.
///
/// Hermiticity is validated at construction (max |H − H†| < 1e-12), so every
/// instance can be eigendecomposed with the symmetric solver.
#[derive(Clone, Debug)]
pub struct DenseHermitian {
    n_qubits: usize,
    mat: DMatrix<Complex64>,
}

impl DenseHermitian {
    /// Wrap a matrix, validating shape and Hermiticity.
    pub fn new(n_qubits: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        assert_eq!(mat.nrows(), dim, "matrix rows must be 2^n_qubits");
        assert_eq!(mat.ncols(), dim, "matrix cols must be 2^n_qubits");
        let mut max_dev = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let dev = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev >= 1e-12 {
            return Err(Error::NotHermitian { max_dev });
        }
        Ok(Self { n_qubits, mat })
    }

    /// Sum of weighted Pauli strings. Each term is a real coefficient and a
    /// list of (qubit, Pauli) factors on distinct qubits (1-based, qubit 1 is
    /// the most significant bit).
    ///
    /// Built by mapping basis columns directly: a Pauli string sends |b⟩ to
    /// phase·|b'⟩, so each term touches 2^n entries instead of going through
    /// Kronecker products.
    pub fn from_pauli_terms(n_qubits: usize, terms: &[(f64, Vec<(usize, Pauli)>)]) -> Self {
        let dim = 1usize << n_qubits;
        let mut mat = DMatrix::<Complex64>::zeros(dim, dim);
        for (coeff, factors) in terms {
            for (q, _) in factors {
                assert!(*q >= 1 && *q <= n_qubits, "qubit index {q} out of range");
            }
            for col in 0..dim {
                let mut row = col;
                let mut phase = Complex64::new(*coeff, 0.0);
                for (q, p) in factors {
                    let mask = 1usize << (n_qubits - q);
                    let bit = col & mask != 0;
                    match p {
                        Pauli::X => row ^= mask,
                        Pauli::Y => {
                            row ^= mask;
                            phase *= if bit {
                                Complex64::new(0.0, -1.0)
                            } else {
                                Complex64::new(0.0, 1.0)
                            };
                        }
                        Pauli::Z => {
                            if bit {
                                phase = -phase;
                            }
                        }
                    }
                }
                mat[(row, col)] += phase;
            }
        }
        Self { n_qubits, mat }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// ⟨ψ|H|ψ⟩ (real part; the imaginary part vanishes for Hermitian H).
    pub fn expectation(&self, psi: &Statevector) -> f64 {
        let v = DVector::from_column_slice(psi.amplitudes());
        let hv = &self.mat * &v;
        v.dotc(&hv).re
    }

    fn eigh(&self) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
        let se = nalgebra::SymmetricEigen::try_new(self.mat.clone(), f64::EPSILON, 100_000)
            .ok_or(Error::EigenConvergence)?;
        Ok((se.eigenvalues, se.eigenvectors))
    }
}

fn wrap(i: usize, n: usize) -> usize {
    (i + n - 1) % n + 1
}

/// Cluster Hamiltonian −Σ_i X_{i−1} Z_i X_{i+1} + h Σ_i Y_i Y_{i+1} with
/// periodic boundaries (neighbor indices wrap mod n_qubits).
pub fn build_cluster(n_qubits: usize, h: f64) -> DenseHermitian {
    assert!(n_qubits >= 3, "cluster chain needs at least 3 qubits");
    let mut terms = Vec::with_capacity(2 * n_qubits);
    for i in 1..=n_qubits {
        terms.push((
            -1.0,
            vec![
                (wrap(i + n_qubits - 1, n_qubits), Pauli::X),
                (i, Pauli::Z),
                (wrap(i + 1, n_qubits), Pauli::X),
            ],
        ));
    }
    for i in 1..=n_qubits {
        terms.push((h, vec![(i, Pauli::Y), (wrap(i + 1, n_qubits), Pauli::Y)]));
    }
    DenseHermitian::from_pauli_terms(n_qubits, &terms)
}

/// Transverse-field Ising Hamiltonian (1−τ) Σ_i X_i + τ J Σ_{i<j} Z_i Z_j
/// with all-to-all couplings.
pub fn build_ising(n_qubits: usize, tau: f64, j: f64) -> DenseHermitian {
    assert!(n_qubits >= 2, "Ising chain needs at least 2 qubits");
    assert!((0.0..=1.0).contains(&tau), "tau must lie in [0, 1]");
    let mut terms = Vec::new();
    for i in 1..=n_qubits {
        terms.push((1.0 - tau, vec![(i, Pauli::X)]));
    }
    for a in 1..=n_qubits {
        for b in a + 1..=n_qubits {
            terms.push((tau * j, vec![(a, Pauli::Z), (b, Pauli::Z)]));
        }
    }
    DenseHermitian::from_pauli_terms(n_qubits, &terms)
}

/// Normalized eigenvector of the smallest eigenvalue.
///
/// Deterministic across runs: eigenvalues are sorted ascending (ties keep the
/// solver's order), and the global phase is fixed by making the
/// largest-magnitude amplitude real positive (first such index on ties).
pub fn ground_state(h: &DenseHermitian) -> Result<Statevector> {
    let (vals, vecs) = h.eigh()?;
    let mut imin = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v < vals[imin] {
            imin = i;
        }
    }
    let col = vecs.column(imin);
    let mut amps: Vec<Complex64> = col.iter().copied().collect();

    let mut ref_idx = 0;
    let mut ref_mag = 0.0f64;
    for (i, a) in amps.iter().enumerate() {
        let m = a.norm_sqr();
        if m > ref_mag {
            ref_mag = m;
            ref_idx = i;
        }
    }
    let phase = amps[ref_idx].conj() / amps[ref_idx].norm();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a = *a * phase / norm;
    }
    Ok(Statevector::from_amplitudes(h.n_qubits, amps))
}

/// e^{−iH}|ψ⟩ through the eigendecomposition H = VΛV†.
pub fn evolve(h: &DenseHermitian, psi: &Statevector) -> Result<Statevector> {
    assert_eq!(h.dim(), psi.dim(), "dimension mismatch between operator and state");
    let (vals, vecs) = h.eigh()?;
    let v = DVector::from_column_slice(psi.amplitudes());
    let mut w = vecs.adjoint() * v;
    for (k, entry) in w.iter_mut().enumerate() {
        *entry *= Complex64::from_polar(1.0, -vals[k]);
    }
    let out = vecs * w;
    Ok(Statevector::from_amplitudes_unchecked(
        h.n_qubits,
        out.iter().copied().collect(),
    ))
}
