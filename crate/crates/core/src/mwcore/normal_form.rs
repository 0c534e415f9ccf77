use std::collections::BTreeMap;

use crate::arith::{legendre_u64, mod_pow, mul_mod, tame_fact, Factorization};
use crate::error::{MwError, Result};
use crate::quadform::{pfister_entries, FormInvariants, WittClass};

use super::expr::{FactoredTerm, MwExpr};
use super::residue::{residue_factored, ResidueClass};

/// Image in Milnor K-theory (eta killed), in a faithful normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MilnorNF {
    /// Degrees below zero.
    Zero,
    /// Degree 0: `K_0^M = Z`.
    Integer(i64),
    /// Degree 1: an element of `Q^x`.
    Unit(Factorization),
    /// Degree 2: the real bit and the tame symbols at odd primes (nontrivial ones only).
    K2 { real_bit: u8, tame: BTreeMap<u64, u64> },
    /// Degree 3 and above: `K_n^M(Q) = Z/2`, detected at the real place.
    Sign(u8),
}

impl MilnorNF {
    pub fn zero(degree: i64) -> Self {
        match degree {
            d if d < 0 => MilnorNF::Zero,
            0 => MilnorNF::Integer(0),
            1 => MilnorNF::Unit(Factorization::one()),
            2 => MilnorNF::K2 {
                real_bit: 0,
                tame: BTreeMap::new(),
            },
            _ => MilnorNF::Sign(0),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            MilnorNF::Zero => true,
            MilnorNF::Integer(n) => *n == 0,
            MilnorNF::Unit(u) => u.is_one(),
            MilnorNF::K2 { real_bit, tame } => *real_bit == 0 && tame.is_empty(),
            MilnorNF::Sign(b) => *b == 0,
        }
    }

    /// Group law in `K_n^M(Q)`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (MilnorNF::Zero, MilnorNF::Zero) => MilnorNF::Zero,
            (MilnorNF::Integer(a), MilnorNF::Integer(b)) => MilnorNF::Integer(a + b),
            (MilnorNF::Unit(a), MilnorNF::Unit(b)) => MilnorNF::Unit(a.mul(b)),
            (
                MilnorNF::K2 {
                    real_bit: r1,
                    tame: t1,
                },
                MilnorNF::K2 {
                    real_bit: r2,
                    tame: t2,
                },
            ) => {
                let mut tame = t1.clone();
                for (&p, &v) in t2 {
                    let slot = tame.entry(p).or_insert(1);
                    *slot = mul_mod(*slot, v, p);
                }
                tame.retain(|_, v| *v != 1);
                MilnorNF::K2 {
                    real_bit: r1 ^ r2,
                    tame,
                }
            }
            (MilnorNF::Sign(a), MilnorNF::Sign(b)) => MilnorNF::Sign(a ^ b),
            _ => return Err(MwError::InconsistentInvariants("milnor degree mismatch".into())),
        })
    }
}

/// Image in the Witt ring (the `eta`-inverted side of the pullback square).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WittNF {
    degree: i64,
    class: WittClass,
    /// Grothendieck-Witt rank, degree 0 only.
    rank: Option<i64>,
}

impl WittNF {
    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn class(&self) -> &WittClass {
        &self.class
    }

    pub fn signature(&self) -> i64 {
        self.class.signature()
    }

    pub fn rank(&self) -> Option<i64> {
        self.rank
    }

    /// Signed discriminant; carried only in degrees `<= 1`.
    pub fn signed_disc(&self) -> Option<&Factorization> {
        (self.degree <= 1).then(|| self.class.signed_disc())
    }

    /// Primes with normalized Hasse bit -1; carried only in degrees `<= 2`.
    pub fn hasse(&self) -> Option<BTreeMap<u64, i8>> {
        (self.degree <= 2).then(|| {
            self.class
                .hasse_primes()
                .iter()
                .map(|&p| (p, -1))
                .collect()
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.class.is_zero() && self.rank.unwrap_or(0) == 0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(MwError::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(WittNF {
            degree: self.degree,
            class: self.class.add(&other.class),
            rank: self.rank.zip(other.rank).map(|(a, b)| a + b),
        })
    }
}

/// The faithful invariant pair plus the derived coordinates `(s_inf, residues)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MwNormalForm {
    pub degree: i64,
    pub milnor: MilnorNF,
    pub witt: WittNF,
    /// `sigma / 2^n`, degrees `n >= 1` only.
    pub s_inf: Option<i64>,
    /// Nontrivial residues, degrees `n >= 1` only.
    pub residues: BTreeMap<u64, ResidueClass>,
}

impl MwNormalForm {
    pub fn is_zero(&self) -> bool {
        self.milnor.is_trivial() && self.witt.is_trivial()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let witt = self.witt.add(&other.witt)?;
        let milnor = self.milnor.add(&other.milnor)?;
        let mut residues = self.residues.clone();
        for (&p, r) in &other.residues {
            let sum = match residues.get(&p) {
                Some(q) => q.add(r)?,
                None => r.clone(),
            };
            residues.insert(p, sum);
        }
        residues.retain(|_, r| !r.is_trivial());
        Ok(MwNormalForm {
            degree: self.degree,
            milnor,
            s_inf: self.s_inf.zip(other.s_inf).map(|(a, b)| a + b),
            witt,
            residues,
        })
    }

    /// Both halves agree modulo `I^{n+1}`, as the pullback square requires.
    pub fn check_compatibility(&self) -> bool {
        let class = &self.witt.class;
        let n = self.degree;
        if n >= 1 && !class.in_power(n.min(64) as u32) {
            return false;
        }
        match &self.milnor {
            MilnorNF::Zero => n < 0,
            MilnorNF::Integer(r) => {
                n == 0 && r.rem_euclid(2) as u8 == class.rank_parity() && self.witt.rank == Some(*r)
            }
            MilnorNF::Unit(u) => n == 1 && &u.square_free() == class.signed_disc(),
            MilnorNF::K2 { real_bit, tame } => {
                if n != 2 {
                    return false;
                }
                let odd_primes = tame.keys().chain(class.hasse_primes().iter()).filter(|&&p| p != 2);
                let tame_ok = odd_primes.into_iter().all(|&p| {
                    let t = tame.get(&p).copied().unwrap_or(1);
                    legendre_u64(t, p) == class.hasse_at(p)
                });
                tame_ok && (class.signature() / 4).rem_euclid(2) as u8 == *real_bit
            }
            MilnorNF::Sign(bit) => {
                n >= 3 && (class.signature() >> n.min(62)).rem_euclid(2) as u8 == *bit
            }
        }
    }
}

fn pure_terms(terms: &[FactoredTerm]) -> impl Iterator<Item = &FactoredTerm> {
    terms.iter().filter(|t| t.eta == 0)
}

pub(crate) fn milnor_factored(degree: i64, terms: &[FactoredTerm]) -> MilnorNF {
    match degree {
        d if d < 0 => MilnorNF::Zero,
        0 => MilnorNF::Integer(pure_terms(terms).map(|t| t.coef).sum()),
        1 => MilnorNF::Unit(
            pure_terms(terms).fold(Factorization::one(), |acc, t| acc.mul(&t.entries[0].pow(t.coef))),
        ),
        2 => {
            let mut real_bit = 0u8;
            let mut tame: BTreeMap<u64, u64> = BTreeMap::new();
            for t in pure_terms(terms) {
                let (a, b) = (&t.entries[0], &t.entries[1]);
                if a.is_negative() && b.is_negative() {
                    real_bit ^= (t.coef.rem_euclid(2)) as u8;
                }
                let primes: std::collections::BTreeSet<u64> =
                    a.primes().chain(b.primes()).filter(|&p| p != 2).collect();
                for p in primes {
                    let v = tame_fact(a, b, p);
                    let e = t.coef.rem_euclid(p as i64 - 1) as u64;
                    let slot = tame.entry(p).or_insert(1);
                    *slot = mul_mod(*slot, mod_pow(v, e, p), p);
                }
            }
            tame.retain(|_, v| *v != 1);
            MilnorNF::K2 { real_bit, tame }
        }
        _ => MilnorNF::Sign(
            pure_terms(terms)
                .filter(|t| t.entries.iter().all(Factorization::is_negative))
                .map(|t| t.coef.rem_euclid(2) as u8)
                .fold(0, |a, b| a ^ b),
        ),
    }
}

/// Witt class of the Pfister form `<<a_1, ..., a_k>>`.
pub(crate) fn pfister_class(entries: &[Factorization]) -> Result<WittClass> {
    if entries.len() <= 2 {
        return Ok(WittClass::of_entries(&pfister_entries(entries)));
    }
    // I^3(Q) embeds into W(R), so the class is a multiple of <<-1,-1,-1>>
    if entries.len() > 62 {
        return Err(MwError::UnsupportedDegree(entries.len() as i64));
    }
    if entries.iter().all(Factorization::is_negative) {
        let base = WittClass::of_invariants(&FormInvariants::of_entry(&Factorization::one()).times(8));
        Ok(base.times(1i64 << (entries.len() - 3)))
    } else {
        Ok(WittClass::zero())
    }
}

pub(crate) fn witt_factored(degree: i64, terms: &[FactoredTerm]) -> Result<WittNF> {
    let mut class = WittClass::zero();
    for t in terms {
        // term c eta^m [a_1..a_k] maps to c (-1)^m <<a>> in degree >= 1, c (-1)^k <<a>> otherwise
        let flips = if degree >= 1 { t.eta as usize } else { t.entries.len() };
        let sign = if flips % 2 == 0 { 1 } else { -1 };
        class = class.add(&pfister_class(&t.entries)?.times(sign * t.coef));
    }
    let rank = (degree == 0).then(|| pure_terms(terms).map(|t| t.coef).sum());
    Ok(WittNF {
        degree,
        class,
        rank,
    })
}

pub fn milnor_image(e: &MwExpr) -> Result<MilnorNF> {
    Ok(milnor_factored(e.degree(), &e.factored()?))
}

/// Image under `eta -> 1`, `[a] -> <a> - 1`, signed so that `[a_1..a_n] -> <<a_1..a_n>>`.
pub fn witt_image(e: &MwExpr) -> Result<WittNF> {
    witt_factored(e.degree(), &e.factored()?)
}

pub fn normal_form(e: &MwExpr) -> Result<MwNormalForm> {
    let n = e.degree();
    let terms = e.factored()?;
    let milnor = milnor_factored(n, &terms);
    let witt = witt_factored(n, &terms)?;
    let mut s_inf = None;
    let mut residues = BTreeMap::new();
    if n >= 1 {
        s_inf = Some(if n >= 63 { 0 } else { witt.signature() >> n });
        for p in e.primes()? {
            let r = residue_factored(n, &terms, p)?;
            if !r.is_trivial() {
                residues.insert(p, r);
            }
        }
    }
    let nf = MwNormalForm {
        degree: n,
        milnor,
        witt,
        s_inf,
        residues,
    };
    debug_assert!(nf.check_compatibility(), "incompatible normal form for {e}");
    Ok(nf)
}

pub fn is_zero(e: &MwExpr) -> Result<bool> {
    Ok(normal_form(e)?.is_zero())
}

pub fn eq(e1: &MwExpr, e2: &MwExpr) -> Result<bool> {
    is_zero(&e1.try_sub(e2)?)
}
