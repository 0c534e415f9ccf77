use std::collections::BTreeSet;

use crate::arith::Place;
use crate::error::{MwError, Result};
use crate::quadform::GWFp;

use super::expr::MwExpr;
use super::normal_form::{normal_form, witt_image};
use super::residue::{residue, ResiduePayload};

fn require_positive_degree(e: &MwExpr) -> Result<()> {
    if e.degree() >= 1 {
        Ok(())
    } else {
        Err(MwError::DegreeMismatch {
            expected: 1,
            found: e.degree(),
        })
    }
}

/// Membership in `K_n^MW(Z)`: every residue vanishes.
pub fn in_kmw_z(e: &MwExpr) -> Result<bool> {
    require_positive_degree(e)?;
    Ok(normal_form(e)?.residues.is_empty())
}

/// Membership in `K_n^MW(Z[1/S])`: residues vanish outside `s`.
pub fn in_kmw_zs(e: &MwExpr, s: &BTreeSet<u64>) -> Result<bool> {
    require_positive_degree(e)?;
    Ok(normal_form(e)?.residues.keys().all(|p| s.contains(p)))
}

/// Kernel of the signature: the real coordinate vanishes.
pub fn in_plus(e: &MwExpr) -> Result<bool> {
    require_positive_degree(e)?;
    Ok(witt_image(e)?.signature() == 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrdValue {
    Real(i64),
    Finite(GWFp),
}

/// Valuation on `K_1^MW(Q)` at a place.
pub fn ord_tilde(e: &MwExpr, v: Place) -> Result<OrdValue> {
    if e.degree() != 1 {
        return Err(MwError::DegreeMismatch {
            expected: 1,
            found: e.degree(),
        });
    }
    match v {
        Place::Real => Ok(OrdValue::Real(witt_image(e)?.signature() / 2)),
        Place::Finite(p) => match residue(e, p)?.payload {
            ResiduePayload::GW(x) => Ok(OrdValue::Finite(x)),
            _ => unreachable!("degree-1 residues land in GW"),
        },
    }
}
