//! Numerical toolkit for generalized matrix transposition: kernel-lifted
//! transposes of matrices and channels, compatibility predicates, witness
//! and falsifier constructions for perfect tensors, and a family of
//! optimization-backed information measures with their inequality checks.
//!
//! Everything is sized for desk-scale experiments (dimensions 2 to 16,
//! hard cap 64) and is deterministic given a seed.

// Dense numeric kernels: indexed loops follow the written-out algebra.
#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod error;
pub mod exec;
pub mod gentrans;
pub mod io;
pub mod matcore;
pub mod measures;
pub mod sampling;
pub mod selftest;
pub mod tensors;

pub use error::{Error, Result};
pub use matcore::ComplexMatrix;
