//! Finite-model verification and search for majority and Mal'tsev
//! conditions.
//!
//! - [`structures`]: finite sets, relations, relational structures, powers
//!   and restrictions, homomorphism checks.
//! - [`matrix`]: extended term matrices and strict closedness of relations.
//! - [`relobjects`]: Mal'tsev and majority objects among `k`-ary relational
//!   structures, and the Mal'tsev coreflection.
//! - [`algebra`]: finite algebras, term builders, clone and polymorphism
//!   search, congruence lattices, commutative majority algebras.
//! - [`demos`]: executable reproductions of every desk-scale claim.
//! - [`cli`]: the command-line surface used by the `majority` binary.

pub mod algebra;
pub mod cli;
pub mod demos;
pub mod error;
pub mod matrix;
pub mod relobjects;
pub mod structures;
mod text;
pub mod witness;

pub use error::{Error, Result};
pub use witness::{Verdict, Witness, WitnessKind};
