//! Toolkit for building stabilizer codes out of small code tensors.
//!
//! A code tensor ("lego") is a stabilizer state on a handful of legs. Gluing
//! legs together (tracing) yields larger stabilizer states, and designating
//! dangling legs as physical or logical turns the glued state back into a
//! code. The crate provides the check-matrix algebra for tracing, extraction
//! of stabilizers/logicals/constraints from a built network, distance and
//! erasure analysis, symbolic operator pushing, a catalog of standard blocks
//! and lattice builders, and a small maximum-likelihood decoder.

pub mod analysis;
pub mod decoder;
pub mod duality;
pub mod fieldvec;
pub mod legos;
pub mod netfile;
pub mod network;
pub mod pushing;
pub mod symplectic;
#[doc(hidden)]
pub mod testutil;
pub mod trace;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
