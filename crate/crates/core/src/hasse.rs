//! The transfer-image criterion in degree 2 for quadratic extensions `Q(sqrt d)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::arith::{factorize, int, is_prime, legendre, Place};
use crate::error::{MwError, Result};
use crate::localsym::{h_v_mw, BValue};
use crate::mwcore::MwExpr;

/// `L = Q(sqrt d)` for a squarefree `d` other than 0 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadExt {
    d: i64,
}

impl QuadExt {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !factorize(&int(d))?.exponents().values().all(|&e| e == 1) {
            return Err(MwError::InvalidExtension(d));
        }
        Ok(QuadExt { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }
}

/// Real places of Q that become complex in `L`.
pub fn sigma_set(l: &QuadExt) -> BTreeSet<Place> {
    if l.d < 0 {
        BTreeSet::from([Place::Real])
    } else {
        BTreeSet::new()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

/// Decomposition of an odd prime; `places` lists `(residue degree, ramification index)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitInfo {
    pub p: u64,
    pub kind: SplitKind,
    pub places: Vec<(u32, u32)>,
}

fn check_odd_prime(p: u64) -> Result<()> {
    if p == 2 {
        Err(MwError::DyadicUnsupported)
    } else if !is_prime(p) {
        Err(MwError::NotPrime(p))
    } else {
        Ok(())
    }
}

pub fn splitting_type(p: u64, l: &QuadExt) -> Result<SplitInfo> {
    check_odd_prime(p)?;
    let (kind, places) = match legendre(&BigInt::from(l.d), p)? {
        1 => (SplitKind::Split, vec![(1, 1), (1, 1)]),
        -1 => (SplitKind::Inert, vec![(2, 1)]),
        _ => (SplitKind::Ramified, vec![(1, 2)]),
    };
    Ok(SplitInfo { p, kind, places })
}

/// A comparison map `B_w -> B_v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplier {
    Zero,
    Identity,
    /// Multiplication by `n_w / m_v` (`#mu(L_w) / #mu(Q_p)`).
    Scale(u64),
}

// Q_3(sqrt d) = Q_3(sqrt -3) exactly when d = 3d' with d' = 2 mod 3.
fn contains_cube_roots_of_unity(p: u64, l: &QuadExt) -> bool {
    p == 3 && l.d % 3 == 0 && (l.d / 3).rem_euclid(3) == 2
}

/// One multiplier per place `w` of `L` above `v`.
pub fn b_wv(v: Place, l: &QuadExt) -> Result<Vec<Multiplier>> {
    let p = match v {
        Place::Real if l.d < 0 => return Ok(vec![Multiplier::Zero]),
        Place::Real => return Ok(vec![Multiplier::Identity, Multiplier::Identity]),
        Place::Finite(p) => p,
    };
    let info = splitting_type(p, l)?;
    let extra = if contains_cube_roots_of_unity(p, l) { 3 } else { 1 };
    Ok(info
        .places
        .iter()
        .map(|&(f, _)| Multiplier::Scale((p.pow(f) - 1) / (p - 1) * extra))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferDecision {
    pub in_image: bool,
    /// `h_v` at every place of `Sigma_{L/Q}`.
    pub certificate: BTreeMap<Place, i64>,
}

/// Decides whether a degree-2 element lies in the image of the transfer from `L`:
/// exactly when its real symbol vanishes at every complexified real place.
pub fn transfer_image_test(e: &MwExpr, l: &QuadExt) -> Result<TransferDecision> {
    if e.degree() != 2 {
        return Err(MwError::DegreeMismatch {
            expected: 2,
            found: e.degree(),
        });
    }
    let mut certificate = BTreeMap::new();
    for v in sigma_set(l) {
        if let BValue::Integer(k) = h_v_mw(e, v)? {
            certificate.insert(v, k);
        }
    }
    Ok(TransferDecision {
        in_image: certificate.values().all(|&k| k == 0),
        certificate,
    })
}
