use crate::arith::{int, least_nonresidue, mod_inv, mul_mod};
use crate::error::{MwError, Result};
use crate::quadform::SquareClassFp;

use super::expr::MwExpr;
use super::normal_form::{normal_form, MwNormalForm};
use super::residue::{ResidueClass, ResiduePayload};

fn residue_at(nf: &MwNormalForm, p: u64) -> ResidueClass {
    nf.residues
        .get(&p)
        .cloned()
        .unwrap_or_else(|| ResidueClass::zero(p, nf.degree - 1))
}

fn largest_mismatch(target: &MwNormalForm, current: &MwNormalForm) -> Option<u64> {
    target
        .residues
        .keys()
        .chain(current.residues.keys())
        .copied()
        .filter(|&p| residue_at(target, p) != residue_at(current, p))
        .max()
}

fn inconsistent(what: &str) -> MwError {
    MwError::InconsistentInvariants(what.into())
}

// Correction at p built from [p]-leading symbols; only touches p and smaller primes.
fn correction(p: u64, want: &ResidueClass, have: &ResidueClass) -> Result<MwExpr> {
    match (&want.payload, &have.payload) {
        (ResiduePayload::Unit(w), ResiduePayload::Unit(h)) => {
            let inv = mod_inv(*h, p).ok_or_else(|| inconsistent("residue not a unit"))?;
            let r = mul_mod(*w % p, inv, p);
            if r == 0 {
                return Err(inconsistent("residue not a unit"));
            }
            MwExpr::symbol(vec![int(p as i64), int(r as i64)])
        }
        (ResiduePayload::GW(w), ResiduePayload::GW(h)) => {
            let mut out = MwExpr::symbol(vec![int(p as i64)])?.scale(w.rank - h.rank);
            let det = |x: Option<SquareClassFp>| x.unwrap_or(SquareClassFp::Square);
            if !det(w.disc).mul(det(h.disc)).is_square() {
                let n0 = least_nonresidue(p) as i64;
                out = out.try_add(&MwExpr::term(1, 1, vec![int(p as i64), int(n0)])?)?;
            }
            Ok(out)
        }
        _ => Err(inconsistent("residue type does not match degree")),
    }
}

/// An expression with the given normal form, for degrees 1 and 2.
///
/// Residues are fixed from the largest prime down, then the real coordinate
/// is adjusted by a multiple of `[-1]^n`.
pub fn from_invariants(nf: &MwNormalForm) -> Result<MwExpr> {
    let n = nf.degree;
    if n != 1 && n != 2 {
        return Err(MwError::UnsupportedDegree(n));
    }
    let mut expr = MwExpr::zero(n);
    let mut current = normal_form(&expr)?;
    while let Some(p) = largest_mismatch(nf, &current) {
        let want = residue_at(nf, p);
        if want.p != p || want.degree != n - 1 {
            return Err(inconsistent("residue keyed at the wrong prime or degree"));
        }
        let step = correction(p, &want, &residue_at(&current, p))?;
        if step.is_empty() {
            return Err(inconsistent("residue cannot be realized"));
        }
        expr = expr.try_add(&step)?;
        current = normal_form(&expr)?;
        if residue_at(&current, p) != want {
            return Err(inconsistent("residue cannot be realized"));
        }
    }
    let target_s = nf.s_inf.ok_or_else(|| inconsistent("missing s_inf"))?;
    let have_s = current.s_inf.unwrap_or(0);
    let minus_one = MwExpr::symbol(vec![int(-1); n as usize])?;
    expr = expr.try_add(&minus_one.scale(target_s - have_s))?;
    if &normal_form(&expr)? != nf {
        return Err(inconsistent("invariants are not those of any element"));
    }
    Ok(expr)
}
