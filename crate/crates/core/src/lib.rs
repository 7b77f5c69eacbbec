//! Quantum and classical expansion of bistochastic tuples and regular graphs.
//!
//! * [`numlin`]: dense complex matrices, Jacobi SVD, Schatten norms, Haar sampling.
//! * [`channels`]: bistochastic tuples, restrictions `P_V B (Id − P_V)` and the
//!   Schatten, dimension and quantum expansion ratios.
//! * [`search`]: minimization of those ratios over subspaces.
//! * [`graphs`]: regular multigraphs, permutation decomposition, exact edge
//!   expansion, shortest-path metrics and the exact ℓ_1 cut oracle.
//! * [`embedlab`]: ℓ_p / S_p embedding ratios, estimators and distortion.
//! * [`verify`]: the inequality checkers and randomized sweeps.

pub mod channels;
pub mod embedlab;
pub mod error;
pub mod graphs;
pub mod numlin;
pub mod rng;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
