//! Conditional spin-squeezing dynamics of cavity-coupled atomic ensembles
//! under continuous homodyne monitoring.
//!
//! The crate is organized around the pipeline of a monitored-ensemble
//! experiment:
//!
//! * [`hilbert`] / [`operators`] — Dicke-sector and truncated-Fock spaces,
//!   collective spin and boson operators, dispersive Hamiltonians, and
//!   spin-coherent initial states.
//! * [`dynamics`] — stochastic Schrödinger / master equation integrators
//!   (Euler–Maruyama, Milstein, drift-implicit Milstein), homodyne
//!   photocurrent generation, and single-trajectory records.
//! * [`squeezing`] — covariance analysis in the co-rotating mean-spin frame,
//!   the metrological squeezing parameter, ensemble statistics, optimal-point
//!   extraction and power-law fits.
//! * [`theory`] — closed-form reference curves (dephasing moments,
//!   conditional and trajectory-averaged squeezing, feedback benchmarks,
//!   regime diagnostics, experimental design estimates).
//!
//! Everything here is `no_std` (with `alloc`); IO, parallel ensemble
//! orchestration and the command line live in the companion `squeeze-cli`
//! crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod moments;
pub mod operators;
pub mod rng;
pub mod sparse;
pub mod squeezing;
pub mod state;
pub mod theory;

pub use error::Error;
