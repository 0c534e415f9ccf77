//! Residue maps `K_n^MW(Q) -> K_{n-1}^MW(F_p)` for the uniformizer `p`.
//!
//! Each entry `u p^e` is expanded in `K_*^MW(Q_p)` into monomials
//! `eta^c [p]^{0|1} [u_1]...[u_j]` with `[p]` moved to the front, after which
//! `eta^c [p][u_1..u_j]` maps to `eta^c [u_1..u_j]` and all other monomials die.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{is_prime, mod_pow, mul_mod, Factorization};
use crate::error::{MwError, Result};
use crate::quadform::{GWFp, SquareClassFp, WFp};

use super::expr::{FactoredTerm, MwExpr};

/// An element of `K_m^MW(F_p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ResiduePayload {
    /// `m >= 2`.
    Trivial,
    /// `m = 1`: least positive residue in `F_p^x`.
    Unit(u64),
    /// `m = 0`.
    GW(GWFp),
    /// `m < 0`.
    W(WFp),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    pub p: u64,
    pub degree: i64,
    pub payload: ResiduePayload,
}

impl ResidueClass {
    pub fn zero(p: u64, degree: i64) -> Self {
        let payload = match degree {
            d if d >= 2 => ResiduePayload::Trivial,
            1 => ResiduePayload::Unit(1),
            0 => ResiduePayload::GW(GWFp::zero(p)),
            _ => ResiduePayload::W(WFp::zero(p)),
        };
        ResidueClass { p, degree, payload }
    }

    pub fn is_trivial(&self) -> bool {
        match &self.payload {
            ResiduePayload::Trivial => true,
            ResiduePayload::Unit(u) => *u == 1,
            ResiduePayload::GW(x) => x.is_zero(),
            ResiduePayload::W(x) => x.is_zero(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.p != other.p {
            return Err(MwError::PlaceMismatch {
                left: crate::arith::Place::Finite(self.p),
                right: crate::arith::Place::Finite(other.p),
            });
        }
        let payload = match (&self.payload, &other.payload) {
            (ResiduePayload::Trivial, ResiduePayload::Trivial) => ResiduePayload::Trivial,
            (ResiduePayload::Unit(a), ResiduePayload::Unit(b)) => {
                ResiduePayload::Unit(mul_mod(*a, *b, self.p))
            }
            (ResiduePayload::GW(a), ResiduePayload::GW(b)) => ResiduePayload::GW(a.add(b)?),
            (ResiduePayload::W(a), ResiduePayload::W(b)) => ResiduePayload::W(a.add(b)?),
            _ => {
                return Err(MwError::DegreeMismatch {
                    expected: self.degree,
                    found: other.degree,
                })
            }
        };
        Ok(ResidueClass {
            p: self.p,
            degree: self.degree,
            payload,
        })
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            ResiduePayload::Trivial => write!(f, "0"),
            ResiduePayload::Unit(u) => write!(f, "{u} mod {}", self.p),
            ResiduePayload::GW(x) => match x.disc {
                Some(d) => write!(f, "GW(F_{}): rank {}, det {:?}", self.p, x.rank, d),
                None => write!(f, "GW(F_{}): rank {}", self.p, x.rank),
            },
            ResiduePayload::W(x) => match x.disc {
                Some(d) => write!(f, "W(F_{}): rank {} mod 2, disc {:?}", self.p, x.rank_parity, d),
                None => write!(f, "W(F_{}): rank {} mod 2", self.p, x.rank_parity),
            },
        }
    }
}

/// `eta^eta [p]^{pi} [units...]` in `K_*^MW(Q_p)`, units stored by residue.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct LocalMono {
    eta: u32,
    pi: bool,
    units: Vec<u64>,
}

#[derive(Clone, Debug, Default)]
struct LocalPoly {
    terms: BTreeMap<LocalMono, i64>,
}

impl LocalPoly {
    fn one() -> Self {
        let mut poly = Self::default();
        poly.push(
            LocalMono {
                eta: 0,
                pi: false,
                units: vec![],
            },
            1,
        );
        poly
    }

    fn push(&mut self, mono: LocalMono, coef: i64) {
        // [1] = 0 in K_1^MW(F_p), and no rewriting step removes a unit factor
        if coef == 0 || mono.units.contains(&1) {
            return;
        }
        let slot = self.terms.entry(mono.clone()).or_insert(0);
        *slot += coef;
        if *slot == 0 {
            self.terms.remove(&mono);
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.push(m.clone(), c);
        }
        out
    }

    fn scale(&self, k: i64) -> Self {
        let mut out = Self::default();
        for (m, &c) in &self.terms {
            out.push(m.clone(), c * k);
        }
        out
    }

    fn eta_times(&self) -> Self {
        let mut out = Self::default();
        for (m, &c) in &self.terms {
            let mut m = m.clone();
            m.eta += 1;
            out.push(m, c);
        }
        out
    }

    fn mul(&self, other: &Self, minus_one: u64) -> Self {
        let mut out = Self::default();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                for (m, c) in mono_mul(a, b, minus_one).terms {
                    out.push(m, c * ca * cb);
                }
            }
        }
        out
    }
}

// Multiplying by eps = -<-1> = -1 - eta[-1] on the right.
fn times_eps(mono: LocalMono, minus_one: u64) -> LocalPoly {
    let mut out = LocalPoly::default();
    out.push(mono.clone(), -1);
    let mut m = mono;
    m.eta += 1;
    m.units.push(minus_one);
    out.push(m, -1);
    out
}

fn mono_mul(a: &LocalMono, b: &LocalMono, minus_one: u64) -> LocalPoly {
    let mut units = a.units.clone();
    units.extend(b.units.iter().copied());
    let mut mono = LocalMono {
        eta: a.eta + b.eta,
        pi: a.pi || b.pi,
        units,
    };
    let mut out = LocalPoly::default();
    if !b.pi {
        out.push(mono, 1);
        return out;
    }
    if a.pi {
        // [p][p] = [p][-1]; the -1 goes in front of the units of a
        mono.units.insert(0, minus_one);
    }
    // U[p] = eps^{|U|} [p] U, with eps^2 = 1
    if a.units.len().is_multiple_of(2) {
        out.push(mono, 1);
        out
    } else {
        times_eps(mono, minus_one)
    }
}

fn unit_poly(u: u64) -> LocalPoly {
    let mut out = LocalPoly::default();
    out.push(
        LocalMono {
            eta: 0,
            pi: false,
            units: vec![u],
        },
        1,
    );
    out
}

fn pi_poly() -> LocalPoly {
    let mut out = LocalPoly::default();
    out.push(
        LocalMono {
            eta: 0,
            pi: true,
            units: vec![],
        },
        1,
    );
    out
}

// Expansion of [p^e].
fn pi_power(e: i64, minus_one: u64) -> LocalPoly {
    let pi = pi_poly();
    if e == 0 {
        return LocalPoly::default();
    }
    // [1/a] = -[a] - eta[a][a]
    let step = if e > 0 {
        pi.clone()
    } else {
        pi.scale(-1)
            .add(&pi.mul(&unit_poly(minus_one), minus_one).eta_times().scale(-1))
    };
    // [x y] = [x] + [y] + eta[x][y]
    let mut acc = step.clone();
    for _ in 1..e.unsigned_abs() {
        acc = acc
            .add(&step)
            .add(&acc.mul(&step, minus_one).eta_times());
    }
    acc
}

// Expansion of [u p^e] = [u] + [p^e] + eta[u][p^e].
fn entry_poly(a: &Factorization, p: u64) -> LocalPoly {
    let minus_one = p - 1;
    let e = a.valuation(p);
    let u = unit_poly(a.unit_residue(p, p));
    let pe = pi_power(e, minus_one);
    u.add(&pe).add(&u.mul(&pe, minus_one).eta_times())
}

fn boundary(degree: i64, poly: &LocalPoly, p: u64) -> ResidueClass {
    let m = degree - 1;
    let mut out = ResidueClass::zero(p, m);
    let surviving = poly.terms.iter().filter(|(mono, _)| mono.pi);
    match m {
        d if d >= 2 => {}
        1 => {
            let mut u = 1;
            for (mono, &c) in surviving.filter(|(mono, _)| mono.eta == 0) {
                let w = mono.units[0];
                let e = c.rem_euclid(p as i64 - 1) as u64;
                u = mul_mod(u, mod_pow(w, e, p), p);
            }
            out.payload = ResiduePayload::Unit(u);
        }
        0 => {
            let mut rank = 0;
            let mut disc = SquareClassFp::Square;
            for (mono, &c) in surviving {
                match mono.units.len() {
                    0 => rank += c,
                    1 => disc = disc.mul(SquareClassFp::of_residue(mono.units[0], p).pow(c)),
                    _ => {}
                }
            }
            out.payload = ResiduePayload::GW(GWFp::new(p, rank, disc));
        }
        _ => {
            // eta^c [w] -> <w> - <1>, eta^c -> <1>, longer products lie in I^2(F_p) = 0
            let mut entries: Vec<u64> = Vec::new();
            for (mono, &c) in surviving {
                let sign_entry = |w: u64| if c > 0 { w } else { p - w };
                let parts: Vec<u64> = match mono.units.len() {
                    0 => vec![sign_entry(1 % p.max(2))],
                    1 => vec![sign_entry(mono.units[0]), sign_entry(p - 1)],
                    _ => vec![],
                };
                // W(F_p) has exponent dividing 4
                for _ in 0..c.unsigned_abs() % 4 {
                    entries.extend(parts.iter().copied());
                }
            }
            out.payload = ResiduePayload::W(WFp::from_entries(p, &entries));
        }
    }
    out
}

pub(crate) fn residue_factored(degree: i64, terms: &[FactoredTerm], p: u64) -> Result<ResidueClass> {
    if !is_prime(p) {
        return Err(MwError::NotPrime(p));
    }
    let minus_one = p - 1;
    let mut total = LocalPoly::default();
    for t in terms {
        if !t.entries.iter().any(|a| a.valuation(p) != 0) {
            continue;
        }
        let mut poly = LocalPoly::one();
        for a in &t.entries {
            poly = poly.mul(&entry_poly(a, p), minus_one);
            if poly.terms.is_empty() {
                break;
            }
        }
        for _ in 0..t.eta {
            poly = poly.eta_times();
        }
        total = total.add(&poly.scale(t.coef));
    }
    Ok(boundary(degree, &total, p))
}

/// Residue at `p` with respect to the uniformizer `p`.
pub fn residue(e: &MwExpr, p: u64) -> Result<ResidueClass> {
    residue_factored(e.degree(), &e.factored()?, p)
}
