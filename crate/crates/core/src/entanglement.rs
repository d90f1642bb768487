//! Multipartite entanglement measures: subsystem purities and concentratable
//! entanglement (CE).
//!
//! CE(ψ) = 1 − 2^{−n} Σ_α Tr ρ_α², summed over all 2^n qubit subsets
//! (including the empty and full sets). [`concentratable_entanglement`]
//! evaluates the equivalent two-copy form 1 − ⟨ψψ| ⊗_i Π_i |ψψ⟩, where Π_i
//! projects the i-th qubit pair onto its symmetric subspace: expanding
//! ⊗_i (I + SWAP_i)/2 reproduces the subset-purity sum term by term. Tests
//! check one route against the other.

use num_complex::Complex64;

use crate::sim::Statevector;

/// Purity Tr(ρ_A²) of the reduced state on a qubit subset.
///
/// `subset` is a bitmask with bit q−1 selecting qubit q. The empty and full
/// subsets give purity 1 for any normalized pure state.
pub fn reduced_purity(psi: &Statevector, subset: u32) -> f64 {
    let n = psi.n_qubits();
    assert!(subset < (1u32 << n), "subset mask selects qubits beyond {n}");
    let amps = psi.amplitudes();

    // Bit positions (in basis-index order) inside and outside the subset.
    let mut keep = Vec::new();
    let mut env = Vec::new();
    for q in 1..=n {
        let pos = n - q;
        if subset & (1 << (q - 1)) != 0 {
            keep.push(pos);
        } else {
            env.push(pos);
        }
    }
    let da = 1usize << keep.len();
    let de = 1usize << env.len();

    // Reshape ψ into the (subset, environment) matrix M.
    let compose = |positions: &[usize], idx: usize| -> usize {
        let mut b = 0usize;
        for (k, pos) in positions.iter().enumerate() {
            if idx & (1 << (positions.len() - 1 - k)) != 0 {
                b |= 1 << pos;
            }
        }
        b
    };
    let mut m = vec![Complex64::ZERO; da * de];
    for a in 0..da {
        let ba = compose(&keep, a);
        for e in 0..de {
            m[a * de + e] = amps[ba | compose(&env, e)];
        }
    }

    // ρ_A = M M†; purity = ‖ρ_A‖_F².
    let mut purity = 0.0;
    for a in 0..da {
        for a2 in 0..da {
            let mut entry = Complex64::ZERO;
            for e in 0..de {
                entry += m[a * de + e] * m[a2 * de + e].conj();
            }
            purity += entry.norm_sqr();
        }
    }
    purity
}

/// Two-copy tensor ψ⊗ψ with every qubit pair projected onto its symmetric
/// subspace, returned as a row-major 2^n × 2^n table.
fn projected_double(psi: &Statevector) -> Vec<Complex64> {
    let n = psi.n_qubits();
    let dim = psi.dim();
    let amps = psi.amplitudes();
    let mut t = vec![Complex64::ZERO; dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            t[r * dim + c] = amps[r] * amps[c];
        }
    }
    // Π on pair i: |00⟩,|11⟩ fixed; |01⟩,|10⟩ → their average.
    for pos in 0..n {
        let mask = 1usize << pos;
        for r in 0..dim {
            if r & mask != 0 {
                continue;
            }
            for c in 0..dim {
                if c & mask == 0 {
                    continue;
                }
                let i01 = r * dim + c;
                let i10 = (r | mask) * dim + (c & !mask);
                let avg = 0.5 * (t[i01] + t[i10]);
                t[i01] = avg;
                t[i10] = avg;
            }
        }
    }
    t
}

/// Concentratable entanglement of a normalized pure state; 0 for product
/// states, approaching (2^n − 2)/2^n·½ + … < 1 for highly entangled ones.
pub fn concentratable_entanglement(psi: &Statevector) -> f64 {
    let dim = psi.dim();
    let amps = psi.amplitudes();
    let t = projected_double(psi);
    let mut overlap = Complex64::ZERO;
    for r in 0..dim {
        for c in 0..dim {
            overlap += (amps[r] * amps[c]).conj() * t[r * dim + c];
        }
    }
    1.0 - overlap.re
}

/// CE value together with its Wirtinger gradient ∂CE/∂ψ* — the co-state fed
/// to adjoint differentiation when synthesizing states with a target CE.
pub fn ce_with_costate(psi: &Statevector) -> (f64, Vec<Complex64>) {
    let dim = psi.dim();
    let amps = psi.amplitudes();
    let t = projected_double(psi);
    let mut overlap = Complex64::ZERO;
    let mut costate = vec![Complex64::ZERO; dim];
    for r in 0..dim {
        let mut row_contract = Complex64::ZERO;
        for c in 0..dim {
            let tv = t[r * dim + c];
            overlap += (amps[r] * amps[c]).conj() * tv;
            row_contract += amps[c].conj() * tv;
        }
        // ∂⟨ψψ|Π|ψψ⟩/∂ψ_r* = 2 Σ_c ψ_c* (ΠT)_{rc}; CE flips the sign.
        costate[r] = -2.0 * row_contract;
    }
    (1.0 - overlap.re, costate)
}
