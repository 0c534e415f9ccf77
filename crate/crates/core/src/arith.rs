//! Exact arithmetic over Q: factorization, square classes and the classical
//! local symbols (Legendre, tame, Hilbert).
//!
//! Everything downstream works on [`Factorization`]s rather than on raw
//! rationals, so products of many entries never have to be re-factored.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{MwError, Result};

pub type Rational = BigRational;

/// Default bound on the decimal length of integers handed to trial division.
pub const DEFAULT_MAX_FACTOR_DIGITS: usize = 18;

// Primes are stored as u64; nothing longer than this ever fits.
const HARD_DIGIT_LIMIT: usize = 19;

static MAX_FACTOR_DIGITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_FACTOR_DIGITS);

/// Sets the process-wide digit cap for factorization (clamped to 19).
pub fn set_max_factor_digits(digits: usize) {
    MAX_FACTOR_DIGITS.store(digits.min(HARD_DIGIT_LIMIT), Ordering::Relaxed);
}

pub fn max_factor_digits() -> usize {
    MAX_FACTOR_DIGITS.load(Ordering::Relaxed)
}

/// A place of Q: the real place or a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    /// Checked constructor for a finite place.
    pub fn finite(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(MwError::NotPrime(p))
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::Real => None,
            Place::Finite(p) => Some(*p),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Place::Real)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "real" | "oo" | "∞" => Ok(Place::Real),
            other => {
                let p: u64 = other
                    .parse()
                    .map_err(|_| format!("invalid place {other:?}"))?;
                Place::finite(p).map_err(|e| e.to_string())
            }
        }
    }
}

/// Signed prime factorization `sign * prod p^e` of a nonzero rational.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factorization {
    negative: bool,
    exponents: BTreeMap<u64, i64>,
}

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn minus_one() -> Self {
        Factorization {
            negative: true,
            exponents: BTreeMap::new(),
        }
    }

    pub fn prime(p: u64) -> Self {
        Factorization {
            negative: false,
            exponents: BTreeMap::from([(p, 1)]),
        }
    }

    pub fn from_parts(negative: bool, exponents: BTreeMap<u64, i64>) -> Self {
        let exponents = exponents.into_iter().filter(|(_, e)| *e != 0).collect();
        Factorization {
            negative,
            exponents,
        }
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    pub fn valuation(&self, p: u64) -> i64 {
        self.exponents.get(&p).copied().unwrap_or(0)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.exponents.keys().copied()
    }

    pub fn is_one(&self) -> bool {
        !self.negative && self.exponents.is_empty()
    }

    /// True when the value is a square in Q^x.
    pub fn is_square(&self) -> bool {
        !self.negative && self.exponents.values().all(|e| e % 2 == 0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exponents = self.exponents.clone();
        for (&p, &e) in &other.exponents {
            let slot = exponents.entry(p).or_insert(0);
            *slot += e;
            if *slot == 0 {
                exponents.remove(&p);
            }
        }
        Factorization {
            negative: self.negative ^ other.negative,
            exponents,
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return Self::one();
        }
        Factorization {
            negative: self.negative && k % 2 != 0,
            exponents: self.exponents.iter().map(|(&p, &e)| (p, e * k)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn neg(&self) -> Self {
        Factorization {
            negative: !self.negative,
            exponents: self.exponents.clone(),
        }
    }

    /// The squarefree integer in the same square class.
    pub fn square_free(&self) -> Self {
        Factorization {
            negative: self.negative,
            exponents: self
                .exponents
                .iter()
                .filter(|(_, e)| *e % 2 != 0)
                .map(|(&p, _)| (p, 1))
                .collect(),
        }
    }

    pub fn to_rational(&self) -> Rational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (&p, &e) in &self.exponents {
            let pp = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
            if e > 0 {
                num *= pp;
            } else {
                den *= pp;
            }
        }
        if self.negative {
            num = -num;
        }
        Rational::new(num, den)
    }

    /// Integer value; only meaningful when no exponent is negative.
    pub fn to_integer(&self) -> BigInt {
        self.to_rational().to_integer()
    }

    /// Reduction of the p-unit part `x / p^{v_p(x)}` modulo `modulus`.
    ///
    /// `modulus` must be coprime to every prime of `self` other than `p`
    /// (in practice `modulus` is `p` itself, or 8 when `p = 2`).
    pub fn unit_residue(&self, p: u64, modulus: u64) -> u64 {
        let mut acc: u64 = if self.negative { modulus - 1 } else { 1 } % modulus;
        for (&q, &e) in &self.exponents {
            if q == p {
                continue;
            }
            let base = q % modulus;
            let factor = if e >= 0 {
                mod_pow(base, e as u64, modulus)
            } else {
                let inv = mod_inv(base, modulus).expect("modulus coprime to unit primes");
                mod_pow(inv, e.unsigned_abs(), modulus)
            };
            acc = mul_mod(acc, factor, modulus);
        }
        acc
    }

    /// `|x|_p = p^{-v_p(x)}` as an exact rational.
    pub fn p_adic_abs(&self, p: u64) -> Rational {
        let v = self.valuation(p);
        let pp = num_traits::pow(BigInt::from(p), v.unsigned_abs() as usize);
        if v >= 0 {
            Rational::new(BigInt::one(), pp)
        } else {
            Rational::from_integer(pp)
        }
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_rational(&self.to_rational()))
    }
}

/// Canonical text form: `num/den`, with `/den` omitted when it is 1.
pub fn render_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn factorize_magnitude(n: &BigInt) -> Result<BTreeMap<u64, i64>> {
    let digits = n.abs().to_string().len();
    let limit = max_factor_digits();
    if digits > limit {
        return Err(MwError::FactorizationOverflow { digits, limit });
    }
    let m = n
        .abs()
        .to_u64()
        .ok_or(MwError::FactorizationOverflow { digits, limit })?;
    Ok(factor_u64(m))
}

/// Signed factorization of a nonzero rational.
pub fn factorize(x: &Rational) -> Result<Factorization> {
    if x.is_zero() {
        return Err(MwError::ZeroInput);
    }
    let mut exponents = factorize_magnitude(x.numer())?;
    for (p, e) in factorize_magnitude(x.denom())? {
        *exponents.entry(p).or_insert(0) -= e;
    }
    Ok(Factorization::from_parts(x.is_negative(), exponents))
}

/// The squarefree integer `d` with `x / d` a rational square.
pub fn square_class(x: &Rational) -> Result<BigInt> {
    Ok(factorize(x)?.square_free().to_integer())
}

/// Legendre symbol `(a / p)` for an odd prime `p`.
pub fn legendre(a: &BigInt, p: u64) -> Result<i8> {
    if p == 2 || !is_prime(p) {
        return Err(MwError::NotOddPrime(p));
    }
    let r = a
        .mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue below p");
    Ok(legendre_u64(r, p))
}

/// Legendre symbol of a residue `a mod p` (p an odd prime), by Euler's criterion.
pub fn legendre_u64(a: u64, p: u64) -> i8 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if mod_pow(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Whether a nonzero residue is a square in F_p. Everything is a square in F_2.
pub fn is_square_mod(a: u64, p: u64) -> bool {
    p == 2 || legendre_u64(a, p) == 1
}

/// Smallest positive quadratic nonresidue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&a| legendre_u64(a, p) == -1)
        .expect("odd primes have nonresidues")
}

/// Tame symbol at `p`: the class of `(-1)^{v(a)v(b)} a^{v(b)} b^{-v(a)}` in F_p^x,
/// as its least positive residue.
pub fn tame_symbol(a: &Rational, b: &Rational, p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(MwError::NotPrime(p));
    }
    Ok(tame_fact(&factorize(a)?, &factorize(b)?, p))
}

pub fn tame_fact(a: &Factorization, b: &Factorization, p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let va = a.valuation(p);
    let vb = b.valuation(p);
    let ua = a.unit_residue(p, p);
    let ub = b.unit_residue(p, p);
    let mut value = mul_mod(signed_pow(ua, vb, p), signed_pow(ub, -va, p), p);
    if (va * vb).rem_euclid(2) == 1 {
        value = (p - value) % p;
    }
    value
}

/// Classical Hilbert symbol `(a, b)_v` in {+1, -1}.
pub fn hilbert_classical(a: &Rational, b: &Rational, v: Place) -> Result<i8> {
    if let Place::Finite(p) = v {
        if !is_prime(p) {
            return Err(MwError::NotPrime(p));
        }
    }
    Ok(hilbert_fact(&factorize(a)?, &factorize(b)?, v))
}

pub fn hilbert_fact(a: &Factorization, b: &Factorization, v: Place) -> i8 {
    match v {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let alpha = a.valuation(2).rem_euclid(2) as u64;
            let beta = b.valuation(2).rem_euclid(2) as u64;
            let u = a.unit_residue(2, 8);
            let w = b.unit_residue(2, 8);
            let exponent = epsilon(u) * epsilon(w) + alpha * omega(w) + beta * omega(u);
            if exponent.is_multiple_of(2) {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let alpha = a.valuation(p).rem_euclid(2) as u64;
            let beta = b.valuation(p).rem_euclid(2) as u64;
            let mut sign = 1i8;
            if alpha * beta == 1 && (p - 1) / 2 % 2 == 1 {
                sign = -sign;
            }
            if beta == 1 {
                sign *= legendre_u64(a.unit_residue(p, p), p);
            }
            if alpha == 1 {
                sign *= legendre_u64(b.unit_residue(p, p), p);
            }
            sign
        }
    }
}

// (u - 1)/2 mod 2 for an odd residue u mod 8
fn epsilon(u: u64) -> u64 {
    ((u - 1) / 2) % 2
}

// (u^2 - 1)/8 mod 2 for an odd residue u mod 8
fn omega(u: u64) -> u64 {
    ((u * u - 1) / 8) % 2
}

/// Order of the group of roots of unity of Q_v.
pub fn mu_order(v: Place) -> u64 {
    match v {
        Place::Real | Place::Finite(2) => 2,
        Place::Finite(p) => p - 1,
    }
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo `m`, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let eg = (a as i128 % m as i128).extended_gcd(&(m as i128));
    if eg.gcd != 1 {
        return None;
    }
    Some(eg.x.rem_euclid(m as i128) as u64)
}

/// `base^exp mod p` for a possibly negative exponent (base invertible mod p).
pub fn signed_pow(base: u64, exp: i64, p: u64) -> u64 {
    if exp >= 0 {
        mod_pow(base, exp as u64, p)
    } else {
        let inv = mod_inv(base, p).expect("unit residue is invertible");
        mod_pow(inv, exp.unsigned_abs(), p)
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial division, stopping early once the cofactor is prime.
fn factor_u64(mut n: u64) -> BTreeMap<u64, i64> {
    let mut out = BTreeMap::new();
    for p in [2u64, 3] {
        while n.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
    }
    let mut d = 5u64;
    while n > 1 && !is_prime(n) && (d as u128) * (d as u128) <= n as u128 {
        for q in [d, d + 2] {
            while n.is_multiple_of(q) {
                *out.entry(q).or_insert(0) += 1;
                n /= q;
            }
        }
        d += 6;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    out
}

/// All primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(n: i64, d: i64) -> Factorization {
        factorize(&rational(n, d)).unwrap()
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(fact(1, 1), Factorization::one());
        let f = fact(-12, 1);
        assert!(f.is_negative());
        assert_eq!(f.exponents(), &BTreeMap::from([(2, 2), (3, 1)]));
        let f = fact(10, 9);
        assert_eq!(f.exponents(), &BTreeMap::from([(2, 1), (3, -2), (5, 1)]));
        assert_eq!(f.to_rational(), rational(10, 9));
        assert_eq!(factorize(&int(0)), Err(MwError::ZeroInput));
    }

    #[test]
    fn factorization_overflow_is_an_error() {
        let big = Rational::from_integer("12345678901234567890123".parse().unwrap());
        assert!(matches!(
            factorize(&big),
            Err(MwError::FactorizationOverflow { .. })
        ));
    }

    #[test]
    fn large_prime_cofactor() {
        // 2 * 1000000007
        let f = fact(2_000_000_014, 1);
        assert_eq!(f.exponents(), &BTreeMap::from([(2, 1), (1_000_000_007, 1)]));
    }

    #[test]
    fn square_class_examples() {
        assert_eq!(square_class(&int(4)).unwrap(), BigInt::from(1));
        assert_eq!(square_class(&int(-18)).unwrap(), BigInt::from(-2));
        assert_eq!(square_class(&rational(50, 27)).unwrap(), BigInt::from(6));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(&BigInt::from(1), 7).unwrap(), 1);
        assert_eq!(legendre(&BigInt::from(2), 7).unwrap(), 1);
        assert_eq!(legendre(&BigInt::from(3), 5).unwrap(), -1);
        assert_eq!(legendre(&BigInt::from(10), 5).unwrap(), 0);
        assert_eq!(legendre(&BigInt::from(-1), 2), Err(MwError::NotOddPrime(2)));
        assert_eq!(legendre(&BigInt::from(-1), 9), Err(MwError::NotOddPrime(9)));
    }

    #[test]
    fn legendre_matches_brute_force_squares() {
        for p in primes_up_to(60).into_iter().skip(1) {
            let squares: Vec<u64> = (1..p).map(|x| x * x % p).collect();
            for a in 1..p {
                let expected = if squares.contains(&a) { 1 } else { -1 };
                assert_eq!(legendre_u64(a, p), expected, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn tame_symbol_examples() {
        assert_eq!(tame_symbol(&int(2), &int(3), 5).unwrap(), 1);
        assert_eq!(tame_symbol(&int(5), &int(2), 5).unwrap(), 3);
        assert_eq!(tame_symbol(&int(10), &int(15), 5).unwrap(), 1);
        assert_eq!(tame_symbol(&int(10), &int(15), 6), Err(MwError::NotPrime(6)));
    }

    // Oracle: (a, b)_2 = 1 iff a x^2 + b y^2 = z^2 has a primitive solution mod 2^k
    // for large enough k; for entries of valuation 0 or 1, k = 5 suffices.
    fn hilbert_2_brute(a: i64, b: i64) -> i8 {
        let m = 32i64;
        for x in 0..m {
            for y in 0..m {
                for z in 0..m {
                    if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                        continue;
                    }
                    if (a * x * x + b * y * y - z * z).rem_euclid(m) == 0 {
                        return 1;
                    }
                }
            }
        }
        -1
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_classical(&int(-1), &int(-1), Place::Real).unwrap(), -1);
        assert_eq!(hilbert_classical(&int(-1), &int(-1), Place::Finite(2)).unwrap(), -1);
        assert_eq!(hilbert_classical(&int(5), &int(5), Place::Finite(5)).unwrap(), 1);
    }

    #[test]
    fn dyadic_hilbert_matches_brute_force() {
        let reps = [1i64, 3, 5, 7, 2, 6, 10, 14, -1, -2];
        for &a in &reps {
            for &b in &reps {
                let got = hilbert_classical(&int(a), &int(b), Place::Finite(2)).unwrap();
                assert_eq!(got, hilbert_2_brute(a, b), "({a},{b})_2");
            }
        }
    }

    #[test]
    fn mu_orders() {
        assert_eq!(mu_order(Place::Real), 2);
        assert_eq!(mu_order(Place::Finite(2)), 2);
        assert_eq!(mu_order(Place::Finite(7)), 6);
    }

    #[test]
    fn place_parsing() {
        assert_eq!("inf".parse::<Place>().unwrap(), Place::Real);
        assert_eq!("7".parse::<Place>().unwrap(), Place::Finite(7));
        assert!("8".parse::<Place>().is_err());
        assert_eq!(Place::Real.to_string(), "inf");
    }
}
