//! Tensor-network tools for finite-dimensional quantum states.
//!
//! - [`tensor`]: dense complex tensors, contraction, wire tensors.
//! - [`decomposition`]: SVD, Schmidt form, matrix product states.
//! - [`invariant`]: local-unitary invariants labeled by permutation tuples.
//! - [`entropy`]: Rényi and von Neumann entropies and their polynomial relations.
//! - [`state`]: state files, random states and unitaries, partial traces.
//! - [`cli`]: the `luinv` command-line front end.

pub mod cli;
pub mod decomposition;
pub mod entropy;
pub mod error;
pub mod invariant;
pub mod linalg;
pub mod state;
pub mod tensor;

pub use error::{Error, Result};
pub use tensor::{Tensor, C64};
