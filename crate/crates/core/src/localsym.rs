//! Local Milnor-Witt Hilbert symbols, the Moore reciprocity check, and
//! section-coordinate arithmetic in `K_1^MW(Q_v)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{hilbert_fact, mod_pow, mul_mod, tame_fact, Place, Rational};
use crate::error::{MwError, Result};
use crate::mwcore::{witt_image, MwExpr};

/// A value in `B_v`: `Z` at the real place, `F_p^x` at odd p, `{+1, -1}` at 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BValue {
    Integer(i64),
    Unit { p: u64, value: u64 },
    Sign(i8),
}

impl BValue {
    pub fn identity(v: Place) -> Self {
        match v {
            Place::Real => BValue::Integer(0),
            Place::Finite(2) => BValue::Sign(1),
            Place::Finite(p) => BValue::Unit { p, value: 1 },
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, BValue::Integer(0) | BValue::Unit { value: 1, .. } | BValue::Sign(1))
    }
}

impl fmt::Display for BValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BValue::Integer(k) => write!(f, "{k}"),
            BValue::Unit { p, value } => write!(f, "{value} mod {p}"),
            BValue::Sign(s) => write!(f, "{s}"),
        }
    }
}

/// Reduction `B_v -> mu(Q_v)`: mod 2 at the real place (as a sign), identity elsewhere.
pub fn q_v(b: BValue) -> BValue {
    match b {
        BValue::Integer(k) => BValue::Sign(if k.rem_euclid(2) == 0 { 1 } else { -1 }),
        other => other,
    }
}

fn require_degree(e: &MwExpr, n: i64) -> Result<()> {
    if e.degree() == n {
        Ok(())
    } else {
        Err(MwError::DegreeMismatch {
            expected: n,
            found: e.degree(),
        })
    }
}

/// The local Milnor-Witt Hilbert symbol of a degree-2 element at `v`.
///
/// Terms carrying `eta` land in `I^3(Q_p) = 0` at finite places and are skipped there.
pub fn h_v_mw(e: &MwExpr, v: Place) -> Result<BValue> {
    require_degree(e, 2)?;
    let p = match v {
        Place::Real => return Ok(BValue::Integer(witt_image(e)?.signature() / 4)),
        Place::Finite(p) => p,
    };
    let mut unit = 1u64;
    let mut sign = 1i8;
    for (mono, c) in e.terms().filter(|(m, _)| m.eta == 0) {
        let a = crate::arith::factorize(&mono.entries[0])?;
        let b = crate::arith::factorize(&mono.entries[1])?;
        if p == 2 {
            if c.rem_euclid(2) == 1 {
                sign *= hilbert_fact(&a, &b, v);
            }
        } else {
            let t = tame_fact(&a, &b, p);
            unit = mul_mod(unit, mod_pow(t, c.rem_euclid(p as i64 - 1) as u64, p), p);
        }
    }
    Ok(if p == 2 {
        BValue::Sign(sign)
    } else {
        BValue::Unit { p, value: unit }
    })
}

/// Places where `h_v_mw` can be nontrivial: the real place, 2, and odd primes of the entries.
pub fn relevant_places(e: &MwExpr) -> Result<BTreeSet<Place>> {
    if e.is_empty() {
        return Ok(BTreeSet::new());
    }
    let mut places = BTreeSet::from([Place::Real, Place::Finite(2)]);
    places.extend(e.primes()?.into_iter().map(Place::Finite));
    Ok(places)
}

/// The vector of local symbols at every place where it can be nontrivial.
pub fn h_mw(e: &MwExpr) -> Result<BTreeMap<Place, BValue>> {
    require_degree(e, 2)?;
    relevant_places(e)?
        .into_iter()
        .map(|v| Ok((v, h_v_mw(e, v)?)))
        .collect()
}

/// `h_v_mw(x * y)` for degree-1 `x`, `y`.
pub fn mw_hilbert(x: &MwExpr, y: &MwExpr, v: Place) -> Result<BValue> {
    require_degree(x, 1)?;
    require_degree(y, 1)?;
    h_v_mw(&x.mul(y), v)
}

/// `prod_v zeta_v^{m_v / 2}` for a finite-support vector in `prod mu(Q_v)`.
pub fn moore_pi(values: &BTreeMap<Place, BValue>) -> i8 {
    values
        .values()
        .map(|b| match *b {
            BValue::Sign(s) => s,
            BValue::Integer(k) => if k.rem_euclid(2) == 0 { 1 } else { -1 },
            BValue::Unit { p, value } => {
                if mod_pow(value, (p - 1) / 2, p) == 1 {
                    1
                } else {
                    -1
                }
            }
        })
        .product()
}

pub fn in_wild_kernel(e: &MwExpr) -> Result<bool> {
    Ok(h_mw(e)?.values().all(BValue::is_trivial))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreReport {
    pub symbols: BTreeMap<Place, BValue>,
    pub reduced: BTreeMap<Place, BValue>,
    pub product: i8,
}

impl MooreReport {
    pub fn passed(&self) -> bool {
        self.product == 1
    }
}

/// Checks `pi(q(h^MW(e))) = 1`.
pub fn moore_check(e: &MwExpr) -> Result<MooreReport> {
    let symbols = h_mw(e)?;
    let reduced: BTreeMap<Place, BValue> = symbols.iter().map(|(&v, &b)| (v, q_v(b))).collect();
    let product = moore_pi(&reduced);
    Ok(MooreReport {
        symbols,
        reduced,
        product,
    })
}

/// An element of `K_1^MW(Q_v)` in section coordinates `[u] + t g_v`, where `g_v`
/// generates `I^2(Q_v)` (the class of signature 4 at the real place).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct K1Local {
    place: Place,
    u: Rational,
    twist: i64,
}

impl K1Local {
    pub fn new(u: Rational, twist: i64, place: Place) -> Result<Self> {
        if u.is_zero() {
            return Err(MwError::ZeroInput);
        }
        let twist = if place.is_real() { twist } else { twist.rem_euclid(2) };
        Ok(K1Local { place, u, twist })
    }

    pub fn identity(place: Place) -> Self {
        K1Local {
            place,
            u: Rational::one(),
            twist: 0,
        }
    }

    pub fn place(&self) -> Place {
        self.place
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    fn check_place(&self, other: &Self) -> Result<()> {
        if self.place == other.place {
            Ok(())
        } else {
            Err(MwError::PlaceMismatch {
                left: self.place,
                right: other.place,
            })
        }
    }

    /// `(u1, t1) + (u2, t2) = (u1 u2, t1 + t2 + c(u1, u2))`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_place(other)?;
        let c = cocycle(&self.u, &other.u, self.place)?;
        K1Local::new(&self.u * &other.u, self.twist + other.twist + c, self.place)
    }

    /// Coordinatewise equality (twists already reduced mod 2 at finite places).
    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        self.check_place(other)?;
        Ok(self == other)
    }

    /// The element as an expression over Q: `[u]` plus `twist` copies of the generator.
    pub fn to_expr(&self) -> Result<MwExpr> {
        let mut e = MwExpr::symbol(vec![self.u.clone()])?;
        e = e.try_add(&i2_generator(self.place)?.scale(self.twist))?;
        Ok(e)
    }
}

/// A degree-1 element over Q whose image generates `I^2(Q_v)`.
///
/// Real place: `-eta[-1][-1]` (signature 4). At 2: `-eta[-1][-1]` (Hasse bit of `<<-1,-1>>`).
/// At odd p: `-eta[p][n]` with `n` the least nonresidue.
pub fn i2_generator(v: Place) -> Result<MwExpr> {
    let minus_one = -Rational::one();
    let (a, b) = match v {
        Place::Real | Place::Finite(2) => (minus_one.clone(), minus_one),
        Place::Finite(p) => (
            Rational::from_integer(p.into()),
            Rational::from_integer(crate::arith::least_nonresidue(p).into()),
        ),
    };
    MwExpr::term(-1, 1, vec![a, b])
}

/// `[u1] + [u2] - [u1 u2] = -eta[u1][u2]`, read as a multiple of the local `I^2` generator.
pub fn cocycle(u1: &Rational, u2: &Rational, v: Place) -> Result<i64> {
    let defect = MwExpr::term(-1, 1, vec![u1.clone(), u2.clone()])?;
    let class = witt_image(&defect)?;
    Ok(match v {
        Place::Real => class.signature() / 4,
        Place::Finite(p) => (class.class().hasse_at(p) == -1) as i64,
    })
}
