//! Seeded invariant checks behind `mwk selftest`. At the default size of 100
//! the sample counts match the acceptance suite.

use std::collections::BTreeSet;

use mwk_core::arith::{hilbert_classical, int, least_nonresidue, legendre, mod_pow, primes_up_to};
use mwk_core::gen;
use mwk_core::hasse::{transfer_image_test, QuadExt};
use mwk_core::idele::{diagonal, MwIdele};
use mwk_core::localsym::{h_v_mw, in_wild_kernel, moore_check, mw_hilbert, q_v, BValue, K1Local};
use mwk_core::mwcore::{eq, from_invariants, in_kmw_z, in_plus, is_zero, normal_form};
use mwk_core::quadform::{wqp_class, DiagForm, WFp, WQp};
use mwk_core::{MwExpr, Place, Rational};
use num_bigint::BigInt;
use num_traits::One;
use rand::rngs::StdRng;
use rand::Rng;
use serde_json::{json, Map, Value};

type Check = Result<usize, String>;

trait Ctx<T> {
    fn ctx(self) -> Result<T, String>;
}

impl<T> Ctx<T> for mwk_core::Result<T> {
    fn ctx(self) -> Result<T, String> {
        self.map_err(|e| e.to_string())
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn sym(entries: Vec<Rational>) -> Result<MwExpr, String> {
    MwExpr::symbol(entries).ctx()
}

fn minus_one_squared() -> MwExpr {
    MwExpr::symbol_ints(&[-1, -1]).expect("nonzero entries")
}

fn relations(rng: &mut StdRng, size: usize) -> Check {
    let n = 5 * size;
    for _ in 0..n {
        let a = gen::rational_not_zero_one(rng);
        let b = gen::rational_nonzero(rng);
        let steinberg = sym(vec![a.clone(), int(1) - &a])?;
        ensure!(is_zero(&steinberg).ctx()?, "[a][1-a] is nonzero for a = {a}");
        let rel = sym(vec![&a * &b])?
            .try_sub(&sym(vec![a.clone()])?)
            .and_then(|e| e.try_sub(&sym(vec![b.clone()]).expect("nonzero")))
            .and_then(|e| e.try_sub(&MwExpr::term(1, 1, vec![a.clone(), b.clone()])?))
            .ctx()?;
        ensure!(is_zero(&rel).ctx()?, "[ab] relation fails for {a}, {b}");
        let degree = rng.gen_range(-1..=3);
        let x = gen::expr(rng, degree, 2);
        let h = MwExpr::hyperbolic().mul(&MwExpr::eta()).mul(&x);
        ensure!(is_zero(&h).ctx()?, "h*eta*x is nonzero for x = {x}");
    }
    Ok(n)
}

fn reciprocity() -> Check {
    let odd: Vec<u64> = primes_up_to(199).into_iter().skip(1).collect();
    let mut n = 0;
    for (i, &q) in odd.iter().enumerate() {
        for &r in &odd[i + 1..] {
            let e = MwExpr::symbol_ints(&[q as i64, r as i64]).ctx()?;
            ensure!(moore_check(&e).ctx()?.passed(), "product formula fails for [{q}, {r}]");
            let lhs = legendre(&BigInt::from(q), r).ctx()? * legendre(&BigInt::from(r), q).ctx()?;
            let rhs = if ((q - 1) * (r - 1) / 4) % 2 == 0 { 1 } else { -1 };
            ensure!(lhs == rhs, "reciprocity fails for {q}, {r}");
            n += 1;
        }
    }
    Ok(n)
}

fn round_trip(rng: &mut StdRng, size: usize) -> Check {
    for degree in [1, 2] {
        for _ in 0..2 * size {
            let e1 = gen::expr(rng, degree, 3);
            let e2 = gen::expr(rng, degree, 3);
            let n1 = normal_form(&e1).ctx()?;
            let lifted = from_invariants(&n1).ctx()?;
            ensure!(eq(&lifted, &e1).ctx()?, "{e1} lifts to {lifted}");
            let sum = normal_form(&e1.try_add(&e2).ctx()?).ctx()?;
            ensure!(n1.add(&normal_form(&e2).ctx()?).ctx()? == sum, "normal form not additive on {e1}, {e2}");
        }
    }
    Ok(4 * size)
}

fn integral_splitting(rng: &mut StdRng, size: usize) -> Check {
    let g = minus_one_squared();
    let nf = normal_form(&g).ctx()?;
    ensure!(nf.s_inf == Some(1) && nf.residues.is_empty(), "normal form of [-1,-1]");
    for _ in 0..size {
        let e = gen::expr(rng, 2, 3);
        let nf = normal_form(&e).ctx()?;
        let s = nf.s_inf.expect("positive degree");
        let finite = from_invariants(&nf).ctx()?.try_sub(&g.scale(s)).ctx()?;
        let member = e.try_sub(&finite).ctx()?;
        ensure!(in_kmw_z(&member).ctx()?, "{member} is not integral");
        let s = normal_form(&member).ctx()?.s_inf.expect("positive degree");
        ensure!(in_plus(&member.try_sub(&g.scale(s)).ctx()?).ctx()?, "{member} does not split");
        for other in [s - 1, s + 1] {
            ensure!(!in_plus(&member.try_sub(&g.scale(other)).ctx()?).ctx()?, "{member} splits twice");
        }
    }
    Ok(size)
}

fn forms(reps: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..4 {
        let mut next = Vec::new();
        for f in &frontier {
            for &r in reps.iter().filter(|&&r| f.last().is_none_or(|&l| l <= r)) {
                let mut g = f.clone();
                g.push(r);
                next.push(g);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn wqp_count(reps: &[i64], p: u64) -> Result<usize, String> {
    let mut classes = BTreeSet::<WQp>::new();
    for f in forms(reps) {
        classes.insert(wqp_class(&DiagForm::from_ints(&f).ctx()?, p).ctx()?);
    }
    Ok(classes.len())
}

fn witt_orders() -> Check {
    for p in [3u64, 5, 7, 11, 13] {
        let u = least_nonresidue(p) as i64;
        let pi = p as i64;
        let wf: BTreeSet<WFp> = forms(&[1, u])
            .iter()
            .map(|f| WFp::from_entries(p, &f.iter().map(|&a| a as u64).collect::<Vec<_>>()))
            .collect();
        ensure!(wf.len() == 4, "|W(F_{p})| = {}", wf.len());
        let n = wqp_count(&[1, u, pi, u * pi], p)?;
        ensure!(n == 16, "|W(Q_{p})| = {n}");
    }
    let n = wqp_count(&[1, 3, 5, 7, 2, 6, 10, 14], 2)?;
    ensure!(n == 32, "|W(Q_2)| = {n}");
    Ok(6)
}

fn integral_at(u: &Rational, t: i64, p: u64) -> Result<bool, String> {
    let x = K1Local::new(u.clone(), t, Place::Finite(p)).ctx()?;
    MwIdele::identity().with(x).is_integral_at(p).ctx()
}

fn twist_bits(rng: &mut StdRng, size: usize) -> Check {
    let mut n = 0;
    for p in primes_up_to(50).into_iter().skip(1) {
        for _ in 0..size {
            let u = int(gen::unit_at(rng, p));
            let mut k = 0;
            for t in 0..2 {
                k += integral_at(&u, t, p)? as usize;
            }
            ensure!(k == 1, "{k} integral twists for {u} at {p}");
            n += 1;
        }
    }
    let mut seen = BTreeSet::new();
    for _ in 0..size {
        let u = int(gen::unit_at(rng, 2));
        for t in 0..2 {
            if integral_at(&u, t, 2)? {
                seen.insert(t);
            }
        }
    }
    ensure!(seen.len() == 2, "integral twists at 2: {seen:?}");
    Ok(n + size)
}

fn product_formula(rng: &mut StdRng, size: usize) -> Check {
    for _ in 0..size {
        let e = gen::expr(rng, 1, 3);
        let d = diagonal(&e).ctx()?;
        ensure!(d.vol().ctx()?.is_one(), "vol(diagonal({e})) != 1");
        if !is_zero(&e).ctx()? {
            ensure!(!d.is_identity(), "diagonal({e}) is the identity");
        }
    }
    Ok(size)
}

fn parity(rng: &mut StdRng, size: usize) -> Check {
    for _ in 0..size {
        let a = gen::rational_nonzero(rng);
        let b = gen::rational_nonzero(rng);
        let d = diagonal(&MwExpr::term(-1, 1, vec![a.clone(), b.clone()]).ctx()?).ctx()?;
        ensure!(d.parity().ctx()? == 0, "<<{a}, {b}>> has odd parity");
    }
    let single = MwIdele::identity().with(K1Local::new(int(1), 1, Place::Finite(2)).ctx()?);
    ensure!(single.parity().ctx()? == 1, "single insertion at 2 has even parity");
    Ok(size + 1)
}

fn commuting_square(rng: &mut StdRng, size: usize) -> Check {
    let mut places = vec![Place::Real];
    places.extend(primes_up_to(50).into_iter().map(Place::Finite));
    for _ in 0..2 * size {
        let a = gen::rational_nonzero(rng);
        let b = gen::rational_nonzero(rng);
        let (x, y) = (sym(vec![a.clone()])?, sym(vec![b.clone()])?);
        for &v in &places {
            let reduced = match q_v(mw_hilbert(&x, &y, v).ctx()?) {
                BValue::Sign(s) => s,
                BValue::Unit { p, value } => {
                    if mod_pow(value, (p - 1) / 2, p) == 1 {
                        1
                    } else {
                        -1
                    }
                }
                BValue::Integer(k) => return Err(format!("unreduced value {k} at {v}")),
            };
            ensure!(reduced == hilbert_classical(&a, &b, v).ctx()?, "({a}, {b}) at {v}");
        }
    }
    Ok(2 * size)
}

fn wild_kernel(rng: &mut StdRng, size: usize) -> Check {
    for _ in 0..size {
        let e = gen::expr(rng, 2, 3);
        ensure!(in_wild_kernel(&e).ctx()? == is_zero(&e).ctx()?, "wild kernel test disagrees on {e}");
    }
    Ok(size)
}

fn transfer(rng: &mut StdRng, size: usize) -> Check {
    let imaginary = QuadExt::new(-5).ctx()?;
    let real = QuadExt::new(14).ctx()?;
    let accept = |e: &MwExpr, l: &QuadExt| transfer_image_test(e, l).map(|r| r.in_image).ctx();
    let r = transfer_image_test(&minus_one_squared(), &imaginary).ctx()?;
    ensure!(!r.in_image && r.certificate.get(&Place::Real) == Some(&1), "[-1,-1] for d = -5");
    ensure!(accept(&MwExpr::symbol_ints(&[2, 3]).ctx()?, &imaginary)?, "[2,3] for d = -5");
    let g = minus_one_squared();
    let n = size / 2;
    for _ in 0..n {
        let e = gen::expr(rng, 2, 3);
        ensure!(accept(&e, &real)?, "{e} rejected for d = 14");
        let fix = |e: MwExpr| -> Result<MwExpr, String> {
            let s = match h_v_mw(&e, Place::Real).ctx()? {
                BValue::Integer(s) => s,
                other => return Err(format!("{other:?}")),
            };
            e.try_sub(&g.scale(s)).ctx()
        };
        let x = fix(e)?;
        let y = fix(gen::expr(rng, 2, 3))?;
        ensure!(accept(&x.try_add(&y).ctx()?, &imaginary)?, "accepted set not closed on {x}, {y}");
    }
    Ok(2 + 2 * n)
}

/// Runs every check; returns the JSON report and whether all passed.
pub fn run(seed: u64, size: usize) -> (Value, bool) {
    let mut rng = gen::rng(seed);
    let checks: Vec<(&str, Check)> = vec![
        ("relations", relations(&mut rng, size)),
        ("reciprocity", reciprocity()),
        ("round_trip", round_trip(&mut rng, size)),
        ("integral_splitting", integral_splitting(&mut rng, size)),
        ("witt_orders", witt_orders()),
        ("twist_bits", twist_bits(&mut rng, size)),
        ("product_formula", product_formula(&mut rng, size)),
        ("parity", parity(&mut rng, size)),
        ("commuting_square", commuting_square(&mut rng, size)),
        ("wild_kernel", wild_kernel(&mut rng, size)),
        ("transfer", transfer(&mut rng, size)),
    ];
    let all = checks.iter().all(|(_, c)| c.is_ok());
    let report: Map<String, Value> = checks
        .into_iter()
        .map(|(name, c)| {
            let v = match c {
                Ok(cases) => json!({ "passed": true, "cases": cases }),
                Err(why) => json!({ "passed": false, "failure": why }),
            };
            (name.to_string(), v)
        })
        .collect();
    (json!({ "seed": seed, "size": size, "passed": all, "checks": report }), all)
}
