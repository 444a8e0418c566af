//! Numerical verification of geometric inequalities for a single bosonic mode:
//! truncated Fock-space states, phase-space convolution, heat, attenuator,
//! amplifier and quantum Ornstein-Uhlenbeck semigroups, divergence-based
//! Fisher information, Gaussian closed forms and the classical pure-death
//! process.

pub mod classical;
pub mod cli;
pub mod error;
pub mod fisher;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod semigroups;
pub mod verify;

pub use error::{Error, Result};
