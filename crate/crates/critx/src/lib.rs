//! Locating quantum critical points of 1D spin chains by finite-size
//! crossings of local observables.
//!
//! The crate bundles four pieces that together implement the crossing
//! method end to end:
//!
//! - [`tfim`] — exact free-fermion solution of the periodic transverse-field
//!   Ising chain (energies, transverse magnetization, two-point correlators
//!   via Toeplitz determinants, correlation length, and the closed-form
//!   critical asymptotics used as verifiers).
//! - [`ed`] — matrix-free Lanczos exact diagonalization for spin-1/2 and
//!   spin-1 chains in symmetry sectors, with local expectation values and
//!   reduced density matrices.
//! - [`entanglement`] — local entanglement measures built from one- and
//!   two-site density matrices: von Neumann and linear entropies,
//!   Wootters concurrence, and spin-1 closed forms.
//! - [`fss`] — the analysis pipeline: shape-preserving interpolation,
//!   crossing detection, power-law extrapolation of crossing sequences,
//!   derivative/slope fits, exponent algebra, scaling collapse, and the
//!   scaled-gap (PRG) baseline.
//!
//! [`models`] holds the shared model definitions the engines agree on.

pub mod ed;
pub mod entanglement;
pub mod fss;
pub mod models;
pub mod tfim;

mod quad;

