//! Diagonal quadratic forms over Q and their local-global invariants.
//!
//! Hasse invariants use the convention `eps(q) = prod_{i<j} (a_i, a_j)_p`.
//! Witt classes are handled through [`WittClass`], a canonical invariant
//! tuple that is additive under orthogonal sum and never needs entries.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{
    factorize, hilbert_fact, is_prime, is_square_mod, least_nonresidue, Factorization, Place,
    Rational,
};
use crate::error::{MwError, Result};

/// A diagonal form `<a_1, ..., a_n>` with nonzero rational entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiagForm {
    entries: Vec<Rational>,
}

impl DiagForm {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.iter().any(Zero::is_zero) {
            return Err(MwError::ZeroInput);
        }
        Ok(DiagForm { entries })
    }

    pub fn from_ints(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&a| crate::arith::int(a)).collect())
    }

    /// The zero form (empty list of entries).
    pub fn zero() -> Self {
        DiagForm::default()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn signature(&self) -> i64 {
        self.entries
            .iter()
            .map(|a| if a.is_positive() { 1 } else { -1 })
            .sum()
    }

    pub fn orthogonal_sum(&self, other: &DiagForm) -> DiagForm {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        DiagForm { entries }
    }

    pub fn negated(&self) -> DiagForm {
        DiagForm {
            entries: self.entries.iter().map(|a| -a).collect(),
        }
    }

    pub fn tensor(&self, other: &DiagForm) -> DiagForm {
        let entries = self
            .entries
            .iter()
            .flat_map(|a| other.entries.iter().map(move |b| a * b))
            .collect();
        DiagForm { entries }
    }

    fn factored(&self) -> Result<Vec<Factorization>> {
        self.entries.iter().map(factorize).collect()
    }
}

/// The Pfister form `<<a_1, ..., a_k>> = (x)_i <1, -a_i>`; `<<>> = <1>`.
pub fn pfister(entries: &[Rational]) -> Result<DiagForm> {
    let mut form = DiagForm::from_ints(&[1])?;
    for a in entries {
        if a.is_zero() {
            return Err(MwError::ZeroInput);
        }
        form = form.tensor(&DiagForm::new(vec![crate::arith::int(1), -a])?);
    }
    Ok(form)
}

/// Entries of `<<a_1, ..., a_k>>` as factorizations (subset products of the `-a_i`).
pub fn pfister_entries(entries: &[Factorization]) -> Vec<Factorization> {
    let mut out = vec![Factorization::one()];
    for a in entries {
        let minus_a = a.neg();
        let extra: Vec<Factorization> = out.iter().map(|x| x.mul(&minus_a)).collect();
        out.extend(extra);
    }
    out
}

// Primes p where (a, b)_p = -1; only p | 2ab can contribute.
fn hilbert_defect(a: &Factorization, b: &Factorization) -> BTreeSet<u64> {
    let mut candidates: BTreeSet<u64> = a.primes().chain(b.primes()).collect();
    candidates.insert(2);
    candidates
        .into_iter()
        .filter(|&p| hilbert_fact(a, b, Place::Finite(p)) == -1)
        .collect()
}

fn symmetric_difference(a: &BTreeSet<u64>, b: &BTreeSet<u64>) -> BTreeSet<u64> {
    a.symmetric_difference(b).copied().collect()
}

/// Isometry invariants of a (genuine) diagonal form: rank, determinant class,
/// the finite set of primes with Hasse invariant -1, and the signature.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormInvariants {
    rank: u64,
    det: Factorization,
    hasse: BTreeSet<u64>,
    signature: i64,
}

impl FormInvariants {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn of_entry(x: &Factorization) -> Self {
        FormInvariants {
            rank: 1,
            det: x.square_free(),
            hasse: BTreeSet::new(),
            signature: x.sign() as i64,
        }
    }

    pub fn of_entries<'a>(entries: impl IntoIterator<Item = &'a Factorization>) -> Self {
        entries
            .into_iter()
            .fold(Self::zero(), |acc, x| acc.oplus(&Self::of_entry(x)))
    }

    pub fn of_form(q: &DiagForm) -> Result<Self> {
        Ok(Self::of_entries(&q.factored()?))
    }

    /// The hyperbolic plane `<1, -1>`.
    pub fn hyperbolic_plane() -> Self {
        FormInvariants {
            rank: 2,
            det: Factorization::minus_one(),
            hasse: BTreeSet::new(),
            signature: 0,
        }
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn det(&self) -> &Factorization {
        &self.det
    }

    pub fn signature(&self) -> i64 {
        self.signature
    }

    pub fn hasse_primes(&self) -> &BTreeSet<u64> {
        &self.hasse
    }

    pub fn hasse_at(&self, p: u64) -> i8 {
        if self.hasse.contains(&p) {
            -1
        } else {
            1
        }
    }

    /// `(-1)^{n(n-1)/2} det`.
    pub fn signed_disc(&self) -> Factorization {
        if (self.rank * self.rank.wrapping_sub(1) / 2) % 2 == 1 {
            self.det.neg()
        } else {
            self.det.clone()
        }
    }

    /// Orthogonal sum: `eps(q + q') = eps(q) eps(q') (det q, det q')`.
    pub fn oplus(&self, other: &Self) -> Self {
        let cross = hilbert_defect(&self.det, &other.det);
        let hasse = symmetric_difference(&symmetric_difference(&self.hasse, &other.hasse), &cross);
        FormInvariants {
            rank: self.rank + other.rank,
            det: self.det.mul(&other.det).square_free(),
            hasse,
            signature: self.signature + other.signature,
        }
    }

    /// Invariants of `-q` (all entries negated).
    pub fn negated(&self) -> Self {
        let n = self.rank;
        let mut hasse = self.hasse.clone();
        let minus_one = Factorization::minus_one();
        if (n * n.wrapping_sub(1) / 2) % 2 == 1 {
            hasse = symmetric_difference(&hasse, &hilbert_defect(&minus_one, &minus_one));
        }
        if n.is_multiple_of(2) {
            hasse = symmetric_difference(&hasse, &hilbert_defect(&minus_one, &self.det));
        }
        let det = if n % 2 == 1 {
            self.det.neg()
        } else {
            self.det.clone()
        };
        FormInvariants {
            rank: n,
            det,
            hasse,
            signature: -self.signature,
        }
    }

    pub fn plus_hyperbolic(&self) -> Self {
        self.oplus(&Self::hyperbolic_plane())
    }

    /// `k`-fold orthogonal sum.
    pub fn times(&self, k: u64) -> Self {
        let mut acc = Self::zero();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.oplus(&base);
            }
            base = base.oplus(&base);
            k >>= 1;
        }
        acc
    }

    fn split_of_rank(rank: u64) -> Self {
        Self::hyperbolic_plane().times(rank / 2)
    }
}

/// Complete invariants of a diagonal form over Q, in the reporting format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalInvariants {
    pub rank: usize,
    pub det_class: BigInt,
    pub signed_disc: BigInt,
    /// Only primes with Hasse invariant -1 are listed.
    pub hasse: BTreeMap<u64, i8>,
    pub signature: i64,
}

impl From<&FormInvariants> for LocalInvariants {
    fn from(inv: &FormInvariants) -> Self {
        LocalInvariants {
            rank: inv.rank as usize,
            det_class: inv.det.to_integer(),
            signed_disc: inv.signed_disc().to_integer(),
            hasse: inv.hasse.iter().map(|&p| (p, -1)).collect(),
            signature: inv.signature,
        }
    }
}

pub fn invariants(q: &DiagForm) -> Result<LocalInvariants> {
    Ok(LocalInvariants::from(&FormInvariants::of_form(q)?))
}

fn matches_split_form(inv: &FormInvariants) -> bool {
    let split = FormInvariants::split_of_rank(inv.rank);
    inv.hasse == split.hasse
}

/// Witt triviality over Q, decided by invariants (Hasse-Minkowski).
pub fn is_hyperbolic(q: &DiagForm) -> Result<bool> {
    let inv = FormInvariants::of_form(q)?;
    Ok(inv.rank % 2 == 0
        && inv.signed_disc().is_one()
        && inv.signature == 0
        && matches_split_form(&inv))
}

pub fn witt_equal(q1: &DiagForm, q2: &DiagForm) -> Result<bool> {
    is_hyperbolic(&q1.orthogonal_sum(&q2.negated()))
}

/// Membership of the Witt class of `q` in `I^n(Q)`.
pub fn in_power_i(q: &DiagForm, n: u32) -> Result<bool> {
    let inv = FormInvariants::of_form(q)?;
    Ok(invariants_in_power(&inv, n))
}

fn invariants_in_power(inv: &FormInvariants, n: u32) -> bool {
    if n == 0 {
        return true;
    }
    if !inv.rank.is_multiple_of(2) {
        return false;
    }
    if n == 1 {
        return true;
    }
    if !inv.signed_disc().is_one() {
        return false;
    }
    if n == 2 {
        return true;
    }
    if !matches_split_form(inv) || inv.signature.rem_euclid(8) != 0 {
        return false;
    }
    n == 3 || inv.signature.rem_euclid(1i64 << n.min(62)) == 0
}

/// A class in the Witt ring W(Q).
///
/// Stored as the invariants of a representative padded with hyperbolic planes
/// to rank 0 or 1 mod 8; the Hasse set of such a representative depends only
/// on the Witt class, so the tuple is canonical and `==` is Witt equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WittClass {
    inner: FormInvariants,
}

impl WittClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn of_invariants(inv: &FormInvariants) -> Self {
        let mut inv = inv.clone();
        while inv.rank % 8 > 1 {
            inv = inv.plus_hyperbolic();
        }
        inv.rank %= 8;
        WittClass { inner: inv }
    }

    pub fn of_form(q: &DiagForm) -> Result<Self> {
        Ok(Self::of_invariants(&FormInvariants::of_form(q)?))
    }

    pub fn of_entries<'a>(entries: impl IntoIterator<Item = &'a Factorization>) -> Self {
        Self::of_invariants(&FormInvariants::of_entries(entries))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::of_invariants(&self.inner.oplus(&other.inner))
    }

    pub fn neg(&self) -> Self {
        Self::of_invariants(&self.inner.negated())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Integer multiple `k * x`.
    pub fn times(&self, k: i64) -> Self {
        let base = if k < 0 { self.neg() } else { self.clone() };
        Self::of_invariants(&base.inner.times(k.unsigned_abs()))
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    pub fn rank_parity(&self) -> u8 {
        self.inner.rank as u8
    }

    pub fn signature(&self) -> i64 {
        self.inner.signature
    }

    /// Signed discriminant as a squarefree factorization.
    pub fn signed_disc(&self) -> &Factorization {
        // representative has rank 0 or 1, where the sign factor is +1
        &self.inner.det
    }

    /// Primes where the normalized Hasse invariant is -1.
    pub fn hasse_primes(&self) -> &BTreeSet<u64> {
        &self.inner.hasse
    }

    pub fn hasse_at(&self, p: u64) -> i8 {
        self.inner.hasse_at(p)
    }

    pub fn in_power(&self, n: u32) -> bool {
        invariants_in_power(&self.inner, n)
    }

    /// Class of the localization in `I^2(Q_p) = Z/2`, for classes in `I^2(Q)`.
    pub fn local_i2_bit(&self, p: u64) -> u8 {
        (self.hasse_at(p) == -1) as u8
    }
}

/// Square class of a nonzero element of F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SquareClassFp {
    Square,
    Nonsquare,
}

impl SquareClassFp {
    pub fn of_residue(a: u64, p: u64) -> Self {
        if is_square_mod(a % p, p) {
            SquareClassFp::Square
        } else {
            SquareClassFp::Nonsquare
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self == other {
            SquareClassFp::Square
        } else {
            SquareClassFp::Nonsquare
        }
    }

    pub fn pow(self, k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            SquareClassFp::Square
        } else {
            self
        }
    }

    pub fn is_square(self) -> bool {
        self == SquareClassFp::Square
    }
}

fn check_same_prime(p: u64, q: u64) -> Result<()> {
    if p == q {
        Ok(())
    } else {
        Err(MwError::PlaceMismatch {
            left: Place::Finite(p),
            right: Place::Finite(q),
        })
    }
}

/// An element of GW(F_p): rank and determinant class (no determinant for p = 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GWFp {
    pub p: u64,
    pub rank: i64,
    pub disc: Option<SquareClassFp>,
}

impl GWFp {
    pub fn new(p: u64, rank: i64, disc: SquareClassFp) -> Self {
        GWFp {
            p,
            rank,
            disc: (p != 2).then_some(disc),
        }
    }

    pub fn zero(p: u64) -> Self {
        Self::new(p, 0, SquareClassFp::Square)
    }

    /// The diagonal form with the given nonzero residues.
    pub fn from_entries(p: u64, entries: &[u64]) -> Self {
        let disc = entries
            .iter()
            .fold(SquareClassFp::Square, |d, &a| d.mul(SquareClassFp::of_residue(a, p)));
        Self::new(p, entries.len() as i64, disc)
    }

    fn disc_or_square(&self) -> SquareClassFp {
        self.disc.unwrap_or(SquareClassFp::Square)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_prime(self.p, other.p)?;
        Ok(Self::new(
            self.p,
            self.rank + other.rank,
            self.disc_or_square().mul(other.disc_or_square()),
        ))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, -self.rank, self.disc_or_square())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Tensor product: `det(x y) = det(x)^{rk y} det(y)^{rk x}`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_same_prime(self.p, other.p)?;
        let disc = self
            .disc_or_square()
            .pow(other.rank)
            .mul(other.disc_or_square().pow(self.rank));
        Ok(Self::new(self.p, self.rank * other.rank, disc))
    }

    pub fn try_eq(&self, other: &Self) -> Result<bool> {
        check_same_prime(self.p, other.p)?;
        Ok(self == other)
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.disc_or_square().is_square()
    }
}

/// An element of W(F_p): rank parity and signed discriminant (none for p = 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WFp {
    pub p: u64,
    pub rank_parity: u8,
    pub disc: Option<SquareClassFp>,
}

impl WFp {
    pub fn zero(p: u64) -> Self {
        WFp {
            p,
            rank_parity: 0,
            disc: (p != 2).then_some(SquareClassFp::Square),
        }
    }

    pub fn from_entries(p: u64, entries: &[u64]) -> Self {
        entries.iter().fold(Self::zero(p), |acc, &a| {
            acc.add(&Self::of_entry(p, a)).expect("same prime")
        })
    }

    fn of_entry(p: u64, a: u64) -> Self {
        WFp {
            p,
            rank_parity: 1,
            disc: (p != 2).then_some(SquareClassFp::of_residue(a, p)),
        }
    }

    /// `d(q + q') = d(q) d(q') (-1)^{rk q rk q'}` for signed discriminants.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_prime(self.p, other.p)?;
        let disc = match (self.disc, other.disc) {
            (Some(a), Some(b)) => {
                let mut d = a.mul(b);
                if self.rank_parity == 1 && other.rank_parity == 1 {
                    d = d.mul(SquareClassFp::of_residue(self.p - 1, self.p));
                }
                Some(d)
            }
            _ => None,
        };
        Ok(WFp {
            p: self.p,
            rank_parity: self.rank_parity ^ other.rank_parity,
            disc,
        })
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::zero(self.p)
    }
}

/// A Witt class over Q_p: rank parity, local square class of the signed
/// discriminant, and the (normalized) Hasse invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WQp {
    pub p: u64,
    pub rank_parity: u8,
    /// Representative of the square class: one of `{1, u, p, up}` with `u` the
    /// least positive nonresidue (odd p), or of `{1, 3, 5, 7, 2, 6, 10, 14}` (p = 2).
    pub disc: u64,
    pub hasse: i8,
}

/// Representative of the local square class of `x` in Q_p^x / (Q_p^x)^2.
pub fn local_square_class(x: &Factorization, p: u64) -> u64 {
    let odd_valuation = x.valuation(p).rem_euclid(2) == 1;
    let unit = if p == 2 {
        x.unit_residue(2, 8)
    } else if is_square_mod(x.unit_residue(p, p), p) {
        1
    } else {
        least_nonresidue(p)
    };
    if odd_valuation {
        unit * p
    } else {
        unit
    }
}

pub fn wqp_class(q: &DiagForm, p: u64) -> Result<WQp> {
    if !is_prime(p) {
        return Err(MwError::NotPrime(p));
    }
    let class = WittClass::of_form(q)?;
    Ok(WQp {
        p,
        rank_parity: class.rank_parity(),
        disc: local_square_class(class.signed_disc(), p),
        hasse: class.hasse_at(p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, primes_up_to};

    fn form(entries: &[i64]) -> DiagForm {
        DiagForm::from_ints(entries).unwrap()
    }

    // Brute-force Hasse invariant straight from the definition.
    fn hasse_brute(q: &DiagForm, p: u64) -> i8 {
        let f = q.factored().unwrap();
        let mut acc = 1;
        for i in 0..f.len() {
            for j in i + 1..f.len() {
                acc *= hilbert_fact(&f[i], &f[j], Place::Finite(p));
            }
        }
        acc
    }

    #[test]
    fn pfister_examples() {
        assert_eq!(pfister(&[int(-1)]).unwrap(), form(&[1, 1]));
        assert_eq!(pfister(&[int(-1), int(-1)]).unwrap(), form(&[1, 1, 1, 1]));
        assert_eq!(pfister(&[]).unwrap(), form(&[1]));
        assert!(is_hyperbolic(&pfister(&[int(3), int(-2)]).unwrap()).unwrap());
        assert_eq!(pfister(&[int(0)]), Err(MwError::ZeroInput));
    }

    #[test]
    fn invariants_examples() {
        let inv = invariants(&DiagForm::zero()).unwrap();
        assert_eq!(inv.rank, 0);
        assert_eq!(inv.det_class, BigInt::from(1));
        assert!(inv.hasse.is_empty());
        assert_eq!(inv.signature, 0);

        let inv = invariants(&form(&[1, 1, 1, 1])).unwrap();
        assert_eq!((inv.rank, inv.signature), (4, 4));
        assert_eq!(inv.det_class, BigInt::from(1));
        assert!(inv.hasse.is_empty());

        let inv = invariants(&form(&[1, -2, -3, 6])).unwrap();
        assert_eq!(inv.hasse, BTreeMap::from([(3, -1)]));
        assert_eq!(inv.signature, 0);
    }

    #[test]
    fn hyperbolic_examples() {
        assert!(is_hyperbolic(&form(&[1, -1])).unwrap());
        assert!(!is_hyperbolic(&form(&[1, 1])).unwrap());
        assert!(is_hyperbolic(&form(&[1, 1, -2, -2])).unwrap());
        // <<2, 3>> is anisotropic over Q_3
        assert!(!is_hyperbolic(&form(&[1, -2, -3, 6])).unwrap());
    }

    // Isotropy oracle for <1, 1, -2, -2>: a nontrivial zero with small integer
    // coordinates, and a hyperbolic complement, witness Witt triviality.
    #[test]
    fn hyperbolic_example_has_isotropic_vector() {
        let coeffs = [1i64, 1, -2, -2];
        let found = (-4i64..=4)
            .flat_map(|a| (-4i64..=4).map(move |b| (a, b)))
            .flat_map(|(a, b)| (-4i64..=4).map(move |c| (a, b, c)))
            .flat_map(|(a, b, c)| (-4i64..=4).map(move |d| [a, b, c, d]))
            .any(|v| {
                v.iter().any(|&x| x != 0)
                    && v.iter().zip(coeffs).map(|(x, a)| a * x * x).sum::<i64>() == 0
            });
        assert!(found);
    }

    // <2, 3, -1, -6> has no primitive zero mod 9, so it is anisotropic over Q_3.
    #[test]
    fn anisotropic_at_three_is_not_hyperbolic() {
        let coeffs = [2i64, 3, -1, -6];
        let primitive_zero = (0..9i64.pow(4)).any(|n| {
            let v = [n % 9, n / 9 % 9, n / 81 % 9, n / 729];
            v.iter().any(|x| x % 3 != 0)
                && v.iter().zip(coeffs).map(|(x, a)| a * x * x).sum::<i64>().rem_euclid(9) == 0
        });
        assert!(!primitive_zero);
        assert!(!is_hyperbolic(&form(&coeffs)).unwrap());
    }

    #[test]
    fn witt_equal_examples() {
        assert!(witt_equal(&form(&[1]), &form(&[1])).unwrap());
        assert!(witt_equal(&form(&[1, 1]), &form(&[2, 2])).unwrap());
        assert!(!witt_equal(&form(&[1, 1]), &form(&[1, -1])).unwrap());
    }

    #[test]
    fn power_of_fundamental_ideal() {
        let p2 = pfister(&[int(-1), int(-1)]).unwrap();
        assert!(in_power_i(&p2, 2).unwrap());
        assert!(!in_power_i(&form(&[1, 1]), 2).unwrap());
        let p3 = pfister(&[int(-1), int(-1), int(-1)]).unwrap();
        assert!(in_power_i(&p3, 3).unwrap());
        assert_eq!(p3.signature(), 8);
        assert!(!in_power_i(&p2, 3).unwrap());
        assert!(in_power_i(&form(&[]), 5).unwrap());
    }

    #[test]
    fn additivity_rule_matches_brute_force() {
        let samples: [&[i64]; 6] = [&[1, -2], &[3, 5, -7], &[-1, -1, -1], &[6], &[10, -15, 2], &[]];
        for a in samples {
            for b in samples {
                let q = form(a).orthogonal_sum(&form(b));
                let inv = FormInvariants::of_form(&form(a))
                    .unwrap()
                    .oplus(&FormInvariants::of_form(&form(b)).unwrap());
                for p in [2u64, 3, 5, 7] {
                    assert_eq!(inv.hasse_at(p), hasse_brute(&q, p), "{a:?} + {b:?} at {p}");
                }
            }
        }
    }

    #[test]
    fn negation_matches_entrywise_negation() {
        let samples: [&[i64]; 5] = [&[1, -2], &[3, 5, -7], &[-1, -1, -1, 2], &[6], &[10, -15, 2, 3, 7]];
        for a in samples {
            let direct = FormInvariants::of_form(&form(a).negated()).unwrap();
            assert_eq!(FormInvariants::of_form(&form(a)).unwrap().negated(), direct, "{a:?}");
        }
    }

    #[test]
    fn witt_class_is_invariant_under_hyperbolic_padding_and_squares() {
        let q = form(&[3, -5, 7]);
        let base = WittClass::of_form(&q).unwrap();
        let mut padded = q.clone();
        for _ in 0..5 {
            padded = padded.orthogonal_sum(&form(&[1, -1]));
            assert_eq!(WittClass::of_form(&padded).unwrap(), base);
        }
        assert_eq!(WittClass::of_form(&form(&[12, -20, 63])).unwrap(), base);
        assert!(base.add(&base.neg()).is_zero());
        assert_eq!(base.times(3), base.add(&base).add(&base));
    }

    #[test]
    fn gw_fp_examples() {
        use SquareClassFp::*;
        let a = GWFp::new(7, 1, Square);
        assert_eq!(a.add(&a).unwrap(), GWFp::new(7, 2, Square));
        let b = GWFp::new(7, 1, Nonsquare);
        assert_eq!(b.add(&b).unwrap(), GWFp::new(7, 2, Square));
        assert_eq!(b.mul(&GWFp::new(7, 2, Square)).unwrap(), GWFp::new(7, 2, Square));
        assert!(matches!(a.add(&GWFp::zero(5)), Err(MwError::PlaceMismatch { .. })));
        assert_eq!(GWFp::new(2, 3, Nonsquare).disc, None);
    }

    // Oracle for the tensor rule: <u> (x) <1, u'> over F_7 by entrywise products.
    #[test]
    fn gw_fp_product_matches_diagonal_brute_force() {
        let p = 7;
        for u in 1..p {
            for u2 in 1..p {
                let x = GWFp::from_entries(p, &[u]);
                let y = GWFp::from_entries(p, &[1, u2]);
                let direct = GWFp::from_entries(p, &[u % p, u * u2 % p]);
                assert_eq!(x.mul(&y).unwrap(), direct);
            }
        }
    }

    #[test]
    fn wqp_examples() {
        let c = wqp_class(&form(&[1, -1]), 3).unwrap();
        assert_eq!((c.rank_parity, c.disc, c.hasse), (0, 1, 1));
        let c = wqp_class(&form(&[1, 1]), 3).unwrap();
        // class of -1 in Q_3 is the nonresidue class, represented by 2
        assert_eq!((c.rank_parity, c.disc, c.hasse), (0, 2, 1));
        let c = wqp_class(&form(&[2]), 2).unwrap();
        assert_eq!((c.rank_parity, c.disc, c.hasse), (1, 2, 1));
    }

    fn enumerate_forms(reps: &[i64], max_dim: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_dim {
            let mut next = Vec::new();
            for f in &frontier {
                for &r in reps {
                    if f.last().is_none_or(|&l| l <= r) {
                        let mut g: Vec<i64> = f.clone();
                        g.push(r);
                        next.push(g);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    #[test]
    fn local_witt_group_orders() {
        for p in primes_up_to(13).into_iter().skip(1) {
            let u = least_nonresidue(p) as i64;
            let p_i = p as i64;
            let reps = [1, u, p_i, u * p_i];
            let classes: BTreeSet<WQp> = enumerate_forms(&reps, 4)
                .iter()
                .map(|f| wqp_class(&form(f), p).unwrap())
                .collect();
            assert_eq!(classes.len(), 16, "W(Q_{p})");

            let residues: BTreeSet<WFp> = enumerate_forms(&[1, u], 4)
                .iter()
                .map(|f| {
                    let e: Vec<u64> = f.iter().map(|&a| a as u64).collect();
                    WFp::from_entries(p, &e)
                })
                .collect();
            assert_eq!(residues.len(), 4, "W(F_{p})");
        }
        let classes: BTreeSet<WQp> = enumerate_forms(&[1, 3, 5, 7, 2, 6, 10, 14], 4)
            .iter()
            .map(|f| wqp_class(&form(f), 2).unwrap())
            .collect();
        assert_eq!(classes.len(), 32);
    }
}
