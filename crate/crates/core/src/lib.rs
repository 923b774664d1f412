// Negated float comparisons are used so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Mean-zero periodic traveling waves of the Intermediate Long Wave equation
//!
//! ```text
//! u_t + 2 u u_x − (M_δ u)_x = 0,    (M_δ g)^(n) = θ_δ(n) ĝ(n)
//! ```
//!
//! The crate constructs the exact elliptic-function waves, checks their
//! spectral and linear stability through the Hamiltonian-Krein index, and
//! integrates the equation pseudospectrally to observe orbital stability.

pub mod error;
pub mod evolve;
pub mod fourier;
pub mod krein;
pub mod linop;
pub mod specfun;
pub mod wave;

#[cfg(test)]
pub(crate) mod oracle;

pub use error::{IlwError, Result};
