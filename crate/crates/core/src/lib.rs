//! Phase-space calculus for bosonic Gaussian states.
//!
//! Covariance matrices follow the convention in which the vacuum is the
//! identity, with canonical coordinates ordered `(x₁, p₁, …, x_n, p_n)`.
//! Every Gaussian-level quantity has a brute-force counterpart in [`fock`],
//! a truncated number-basis backend used as an independent check and to run
//! the non-Gaussian protocol steps.

pub mod channels;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod fock;
pub mod io;
pub mod linalg;
pub mod protocols;
pub mod random;
pub mod symplectic;

pub use error::{Error, Result};
pub use symplectic::{
    CovarianceMatrix, GaussianState, QuadraticHamiltonian, SymplecticForm, SymplecticMatrix,
};
