use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{factorize, int, Factorization, Rational};
use crate::error::{MwError, Result};

/// `eta^eta [a_1] ... [a_k]`, of degree `k - eta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub eta: u32,
    pub entries: Vec<Rational>,
}

impl Monomial {
    pub fn degree(&self) -> i64 {
        self.entries.len() as i64 - self.eta as i64
    }
}

/// A homogeneous integer combination of monomials in `eta` and symbols `[a]`.
///
/// No relations are applied; two expressions compare equal as formal sums only.
/// Use [`super::eq`] for equality in Milnor-Witt K-theory.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MwExpr {
    degree: i64,
    terms: BTreeMap<Monomial, i64>,
}

/// A term with factored entries, as consumed by the invariant maps.
#[derive(Clone, Debug)]
pub(crate) struct FactoredTerm {
    pub coef: i64,
    pub eta: u32,
    pub entries: Vec<Factorization>,
}

impl MwExpr {
    pub fn zero(degree: i64) -> Self {
        MwExpr {
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The integer `c` in degree 0.
    pub fn constant(c: i64) -> Self {
        Self::zero(0).with_term(
            c,
            Monomial {
                eta: 0,
                entries: vec![],
            },
        )
    }

    /// `[a_1, ..., a_n]`.
    pub fn symbol(entries: Vec<Rational>) -> Result<Self> {
        Self::term(1, 0, entries)
    }

    pub fn symbol_ints(entries: &[i64]) -> Result<Self> {
        Self::symbol(entries.iter().map(|&a| int(a)).collect())
    }

    pub fn eta() -> Self {
        Self::eta_power(1)
    }

    pub fn eta_power(m: u32) -> Self {
        Self::zero(-(m as i64)).with_term(
            1,
            Monomial {
                eta: m,
                entries: vec![],
            },
        )
    }

    /// `c * eta^m [entries]`.
    pub fn term(coef: i64, eta: u32, entries: Vec<Rational>) -> Result<Self> {
        if entries.iter().any(Zero::is_zero) {
            return Err(MwError::ZeroEntry);
        }
        let mono = Monomial { eta, entries };
        Ok(Self::zero(mono.degree()).with_term(coef, mono))
    }

    /// Builds an expression of the given degree from `(coef, eta, entries)` triples.
    pub fn from_terms(
        degree: i64,
        terms: impl IntoIterator<Item = (i64, u32, Vec<Rational>)>,
    ) -> Result<Self> {
        let mut out = Self::zero(degree);
        for (coef, eta, entries) in terms {
            out = out.try_add(&Self::term(coef, eta, entries)?)?;
        }
        Ok(out)
    }

    /// `<a> = 1 + eta[a]`.
    pub fn angle(a: Rational) -> Result<Self> {
        Self::constant(1).try_add(&Self::term(1, 1, vec![a])?)
    }

    /// `h = 2 + eta[-1]`.
    pub fn hyperbolic() -> Self {
        Self::constant(2)
            .try_add(&Self::term(1, 1, vec![-Rational::one()]).expect("nonzero entry"))
            .expect("degree 0")
    }

    fn with_term(mut self, coef: i64, mono: Monomial) -> Self {
        if coef != 0 {
            let slot = self.terms.entry(mono).or_insert(0);
            *slot += coef;
            if *slot == 0 {
                self.terms.retain(|_, c| *c != 0);
            }
        }
        self
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True when there are no terms; this is formal emptiness, not vanishing.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_degree(&self, other: &Self) -> Result<()> {
        if self.degree == other.degree {
            Ok(())
        } else {
            Err(MwError::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_degree(other)?;
        Ok(other
            .terms
            .iter()
            .fold(self.clone(), |acc, (m, &c)| acc.with_term(c, m.clone())))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return Self::zero(self.degree);
        }
        MwExpr {
            degree: self.degree,
            terms: self.terms.iter().map(|(m, &k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn eta_mul(&self) -> Self {
        self.mul(&Self::eta())
    }

    /// Product: entry lists concatenate, eta powers and coefficients multiply.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                let mut entries = m1.entries.clone();
                entries.extend(m2.entries.iter().cloned());
                out = out.with_term(
                    c1 * c2,
                    Monomial {
                        eta: m1.eta + m2.eta,
                        entries,
                    },
                );
            }
        }
        out
    }

    /// All distinct entries appearing in any term.
    pub fn entries(&self) -> impl Iterator<Item = &Rational> {
        self.terms.keys().flat_map(|m| m.entries.iter())
    }

    pub(crate) fn factored(&self) -> Result<Vec<FactoredTerm>> {
        let mut cache: BTreeMap<&Rational, Factorization> = BTreeMap::new();
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, &coef) in &self.terms {
            let mut entries = Vec::with_capacity(m.entries.len());
            for a in &m.entries {
                let f = match cache.get(a) {
                    Some(f) => f.clone(),
                    None => {
                        let f = factorize(a)?;
                        cache.insert(a, f.clone());
                        f
                    }
                };
                entries.push(f);
            }
            out.push(FactoredTerm {
                coef,
                eta: m.eta,
                entries,
            });
        }
        Ok(out)
    }

    /// Primes dividing the numerator or denominator of some entry.
    pub fn primes(&self) -> Result<Vec<u64>> {
        let mut primes: Vec<u64> = self
            .factored()?
            .iter()
            .flat_map(|t| t.entries.iter().flat_map(|f| f.primes().collect::<Vec<_>>()))
            .collect();
        primes.sort_unstable();
        primes.dedup();
        Ok(primes)
    }
}

impl fmt::Display for MwExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for _ in 0..m.eta {
                factors.push("eta".into());
            }
            if !m.entries.is_empty() {
                let list: Vec<String> = m
                    .entries
                    .iter()
                    .map(crate::arith::render_rational)
                    .collect();
                factors.push(format!("[{}]", list.join(",")));
            }
            let abs = c.unsigned_abs();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        let s = MwExpr::symbol_ints(&[2, 3]).unwrap();
        assert_eq!(s.degree(), 2);
        assert_eq!(s.num_terms(), 1);
        assert_eq!(MwExpr::symbol_ints(&[2]).unwrap().eta_mul().degree(), 0);
        assert_eq!(MwExpr::hyperbolic().degree(), 0);
    }

    #[test]
    fn angle_times_symbol_expands() {
        let lhs = MwExpr::angle(int(2))
            .unwrap()
            .mul(&MwExpr::symbol_ints(&[3]).unwrap());
        let rhs = MwExpr::from_terms(1, [(1, 0, vec![int(3)]), (1, 1, vec![int(2), int(3)])]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn errors() {
        let a = MwExpr::symbol_ints(&[2]).unwrap();
        let b = MwExpr::symbol_ints(&[3, 5]).unwrap();
        assert_eq!(
            a.try_add(&b),
            Err(MwError::DegreeMismatch {
                expected: 1,
                found: 2
            })
        );
        assert_eq!(MwExpr::symbol_ints(&[0]), Err(MwError::ZeroEntry));
    }

    #[test]
    fn cancellation_prunes_terms() {
        let a = MwExpr::symbol_ints(&[2]).unwrap();
        assert!(a.try_sub(&a).unwrap().is_empty());
        assert!(a.scale(0).is_empty());
    }

    #[test]
    fn display() {
        let e = MwExpr::from_terms(1, [(1, 0, vec![int(6)]), (-1, 1, vec![int(2), int(3)])]).unwrap();
        assert_eq!(e.to_string(), "[6] - eta*[2,3]");
        assert_eq!(MwExpr::zero(2).to_string(), "0");
        assert_eq!(MwExpr::hyperbolic().to_string(), "2 + eta*[-1]");
    }
}
