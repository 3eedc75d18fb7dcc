//! Rényi-α entanglement of assistance for small multi-qubit systems.
//!
//! The crate evaluates concurrence, concurrence of assistance, Rényi-α entropy
//! and entanglement, optimizes pure-state decompositions (max-roof and
//! convex-roof), scans the auxiliary functions behind the subadditivity lemma
//! for `f_α`, and checks polygamy inequalities with verdicts that respect the
//! one-sided nature of optimizer results.

pub mod campaign;
pub mod error;
pub mod lemma;
pub mod linalg;
pub mod measures;
pub mod polygamy;
pub mod roof;
pub mod states;

pub use error::{Error, Result};
