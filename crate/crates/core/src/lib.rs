//! Quantum continual learning on simulated quantum data.
//!
//! This crate simulates a variational quantum classifier trained sequentially
//! on six quantum-state classification tasks, with three training strategies:
//! plain sequential training, elastic weight consolidation (EWC), and
//! gradient episodic memory (GEM). It provides:
//!
//! * [`sim`] — dense statevector simulation (Rx/Rz/CNOT, ⟨Z⟩, inner products);
//! * [`circuit`] — gate tapes and adjoint differentiation;
//! * [`hamiltonian`] — cluster and transverse-field Ising spin chains,
//!   ground states, and e^{−iH} evolution;
//! * [`entanglement`] — reduced purities and concentratable entanglement;
//! * [`classifier`] — the layered ansatz plus a one-hidden-layer readout;
//! * [`autodiff`] — exact loss gradients, a finite-difference oracle, Adam;
//! * [`dataset`] — generation, labeling, splitting, and persistence of the
//!   six task datasets;
//! * [`continual`] — the Plain/EWC/GEM training loop, Fisher anchors,
//!   episodic memories, and the GEM gradient projection;
//! * [`metrics`] — accuracy matrices and the ACC/BWT summary metrics.

pub mod autodiff;
pub mod circuit;
pub mod classifier;
pub mod continual;
pub mod dataset;
pub mod entanglement;
mod error;
pub mod hamiltonian;
pub mod metrics;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use sim::Statevector;
