//! Simulation of the quantum δ-kicked harmonic oscillator.
//!
//! Two independent propagation routes are provided:
//!
//! - [`fock`]: the Floquet operator realized as a dense matrix in a truncated
//!   number-state basis, with observables (mean energy, Husimi Q function) and
//!   quasienergy spectra.
//! - [`lattice`]: states written as superpositions of coherent states on a
//!   regular phase-space lattice, evolved by an exact one-kick recurrence on
//!   the lattice coefficients, plus closed-form solutions at quantum resonance.
//!
//! [`model`] holds the parameter reduction and resonance classification,
//! [`specfun`] the Bessel and displacement-operator kernels everything else is
//! built on. [`verify`] wires the cross-checks between the two routes into a
//! reusable suite.

pub mod error;
pub mod fock;
pub mod io;
pub mod lattice;
pub mod model;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
