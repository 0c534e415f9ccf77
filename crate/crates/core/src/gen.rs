//! Seeded random inputs for property checks and the self-test.

use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::arith::{rational, Rational};
use crate::mwcore::MwExpr;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A nonzero rational with small numerator and denominator.
pub fn rational_nonzero<R: Rng>(rng: &mut R) -> Rational {
    let num = rng.gen_range(1..=60i64) * if rng.gen_bool(0.3) { -1 } else { 1 };
    let den = if rng.gen_bool(0.3) { rng.gen_range(1..=12i64) } else { 1 };
    rational(num, den)
}

/// A rational outside `{0, 1}`.
pub fn rational_not_zero_one<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let a = rational_nonzero(rng);
        if !a.is_one() {
            return a;
        }
    }
}

/// A nonzero integer coprime to `p`.
pub fn unit_at<R: Rng>(rng: &mut R, p: u64) -> i64 {
    loop {
        let u = rng.gen_range(1..=500i64) * if rng.gen_bool(0.5) { -1 } else { 1 };
        if u.rem_euclid(p as i64) != 0 {
            return u;
        }
    }
}

/// A random homogeneous expression of the given degree with up to `max_terms` terms.
pub fn expr<R: Rng>(rng: &mut R, degree: i64, max_terms: usize) -> MwExpr {
    let mut out = MwExpr::zero(degree);
    for _ in 0..rng.gen_range(1..=max_terms.max(1)) {
        let min_eta = (-degree).max(0) as u32;
        let eta = min_eta + rng.gen_range(0..=1u32);
        let k = (degree + eta as i64) as usize;
        let entries = (0..k).map(|_| rational_nonzero(rng)).collect();
        let coef = match rng.gen_range(0..6) {
            0 => -2,
            1 | 2 => -1,
            3 | 4 => 1,
            _ => 2,
        };
        let term = MwExpr::term(coef, eta, entries).expect("nonzero entries");
        out = out.try_add(&term).expect("same degree");
    }
    out
}

/// A random symbol `[a_1, ..., a_n]`.
pub fn symbol<R: Rng>(rng: &mut R, n: usize) -> MwExpr {
    MwExpr::symbol((0..n).map(|_| rational_nonzero(rng)).collect()).expect("nonzero entries")
}

/// Seeded convenience wrapper.
pub fn exprs(seed: u64, degree: i64, count: usize, max_terms: usize) -> Vec<MwExpr> {
    let mut r = StdRng::seed_from_u64(seed);
    (0..count).map(|_| expr(&mut r, degree, max_terms)).collect()
}
