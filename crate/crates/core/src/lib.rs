//! Symbolic Milnor-Witt K-theory of Q, its completions and the residue
//! fields F_p.
//!
//! Elements are formal expressions in the generators `[a]` and `eta`
//! ([`MwExpr`]); equality is decided through a faithful pair of invariants
//! (the Milnor K-theory image and the Witt-ring image). On top of that the
//! crate provides residue maps, Milnor-Witt Hilbert symbols and the Moore
//! reciprocity check, ideles in section coordinates, and the transfer-image
//! criterion for quadratic extensions.

pub mod arith;
pub mod error;
pub mod gen;
pub mod hasse;
pub mod idele;
pub mod localsym;
pub mod mwcore;
pub mod quadform;

pub use arith::{Factorization, Place, Rational};
pub use error::{MwError, Result};
pub use mwcore::{MwExpr, MwNormalForm, ResidueClass};

