//! Dual-rail qubits built from bosonic field wavepackets, evaluated in the
//! Heisenberg picture against the global vacuum.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//!
//! * [`wavepacket`]: spectral amplitudes, overlaps and the mismatch factor ξ.
//! * [`fock`]: truncated multi-mode Fock spaces and sparse operators, used as
//!   the brute-force oracle for every closed form in the crate.
//! * [`source`]: the multiplexed heralded single-particle source, its
//!   closed-form statistics and the general detector expansion.
//! * [`qubit`]: Stokes operators, matrix/field translation and the gate set.
//! * [`mismatch`]: matched/orthogonal mode splitting and the block system.
//! * [`evaluator`]: expectation values by the block rule and by the Fock
//!   oracle.
//!
//! File formats, the CLI and parallel sweeps live in the `dualrail` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod dense;
mod error;
pub mod evaluator;
pub mod fock;
pub mod mismatch;
pub mod quadrature;
pub mod qubit;
pub mod source;
pub mod wavepacket;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense complex matrix (small blocks, gate matrices).
pub type CMatrix = nalgebra::DMatrix<C64>;
