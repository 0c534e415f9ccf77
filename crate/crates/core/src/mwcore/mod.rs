//! Milnor-Witt K-theory of Q: expressions, normal forms, residues and lifts.
//!
//! Equality is decided by the pair (Milnor image, Witt image), which is
//! faithful; the derived coordinates `(s_inf, residues)` come for free.

mod expr;
mod integral;
mod lift;
mod normal_form;
mod residue;

pub use expr::{Monomial, MwExpr};
pub use integral::{in_kmw_z, in_kmw_zs, in_plus, ord_tilde, OrdValue};
pub use lift::from_invariants;
pub use normal_form::{
    eq, is_zero, milnor_image, normal_form, witt_image, MilnorNF, MwNormalForm, WittNF,
};
pub use residue::{residue, ResidueClass, ResiduePayload};
