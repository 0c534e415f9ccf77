use mwk_core::arith::{factorize, int, rational, tame_symbol, Rational};
use mwk_core::gen;
use mwk_core::mwcore::{
    eq, from_invariants, is_zero, milnor_image, normal_form, residue, witt_image, MilnorNF,
    MwExpr, ResiduePayload,
};
use mwk_core::quadform::{SquareClassFp, WFp};
use num_traits::One;
use rand::Rng;

fn sym(entries: Vec<Rational>) -> MwExpr {
    MwExpr::symbol(entries).unwrap()
}

fn term(c: i64, eta: u32, entries: Vec<Rational>) -> MwExpr {
    MwExpr::term(c, eta, entries).unwrap()
}

fn add(a: &MwExpr, b: &MwExpr) -> MwExpr {
    a.try_add(b).unwrap()
}

fn sub(a: &MwExpr, b: &MwExpr) -> MwExpr {
    a.try_sub(b).unwrap()
}

#[test]
fn defining_relations_vanish() {
    let mut rng = gen::rng(11);
    for _ in 0..200 {
        let a = gen::rational_not_zero_one(&mut rng);
        let b = gen::rational_nonzero(&mut rng);
        let steinberg = sym(vec![a.clone(), int(1) - &a]);
        assert!(is_zero(&steinberg).unwrap(), "[a][1-a] for a = {a}");

        let ab = &a * &b;
        let rel = sub(
            &sub(&sub(&sym(vec![ab]), &sym(vec![a.clone()])), &sym(vec![b.clone()])),
            &term(1, 1, vec![a.clone(), b.clone()]),
        );
        assert!(is_zero(&rel).unwrap(), "[ab] relation for {a}, {b}");

        let commute = sub(&sym(vec![a.clone()]).eta_mul(), &MwExpr::eta().mul(&sym(vec![a.clone()])));
        assert!(is_zero(&commute).unwrap());

        let n = rng.gen_range(0..=3);
        let x = gen::expr(&mut rng, n, 2);
        let hyp = MwExpr::hyperbolic().mul(&MwExpr::eta()).mul(&x);
        assert!(is_zero(&hyp).unwrap(), "(2 + eta[-1]) eta x for x = {x}");
    }
}

#[test]
fn known_identities_hold_under_the_invariant_pair() {
    let mut rng = gen::rng(12);
    let minus_one = -Rational::one();
    for _ in 0..150 {
        let a = gen::rational_nonzero(&mut rng);
        let b = gen::rational_nonzero(&mut rng);
        let angle_a = MwExpr::angle(a.clone()).unwrap();

        // [1/a] = -<a>[a]
        let inv = sym(vec![a.recip()]);
        assert!(eq(&inv, &angle_a.mul(&sym(vec![a.clone()])).neg()).unwrap(), "{a}");

        // [a][a] = [-1][a] = [a][-1]
        let aa = sym(vec![a.clone(), a.clone()]);
        assert!(eq(&aa, &sym(vec![minus_one.clone(), a.clone()])).unwrap());
        assert!(eq(&aa, &sym(vec![a.clone(), minus_one.clone()])).unwrap());

        // [a][b] = -<-1>[b][a]
        let swapped = MwExpr::angle(minus_one.clone())
            .unwrap()
            .mul(&sym(vec![b.clone(), a.clone()]))
            .neg();
        assert!(eq(&sym(vec![a.clone(), b.clone()]), &swapped).unwrap());

        // <a><b> = <ab> and <a^2> = 1
        let lhs = angle_a.mul(&MwExpr::angle(b.clone()).unwrap());
        assert!(eq(&lhs, &MwExpr::angle(&a * &b).unwrap()).unwrap());
        assert!(eq(&MwExpr::angle(&a * &a).unwrap(), &MwExpr::constant(1)).unwrap());
    }
}

#[test]
fn nontrivial_elements_are_detected() {
    assert!(!is_zero(&sym(vec![int(-1), int(-1)])).unwrap());
    assert!(!is_zero(&sym(vec![int(5), int(2)])).unwrap());
    assert!(!is_zero(&term(1, 1, vec![int(-1), int(-1)])).unwrap());
    assert!(!is_zero(&term(2, 0, vec![int(3)])).unwrap());
    // [a^2] = 2[a] + eta[a][a], which is not 0
    assert!(!is_zero(&sym(vec![int(4)])).unwrap());
    assert!(!is_zero(&MwExpr::eta()).unwrap());
}

// W(F_p)-class of sum of coef * <w> given as (coef, residue) pairs.
fn wfp_of(p: u64, parts: &[(i64, u64)]) -> WFp {
    let mut entries = Vec::new();
    for &(c, w) in parts {
        let w = if c > 0 { w } else { (p - w % p) % p };
        for _ in 0..c.unsigned_abs() {
            entries.push(if p == 2 { 1 } else { w });
        }
    }
    WFp::from_entries(p, &entries)
}

// Second residue of the unsigned Witt image: <u p^odd> -> <u mod p>.
fn second_residue_oracle(e: &MwExpr, p: u64) -> WFp {
    let mut parts = Vec::new();
    for (mono, c) in e.terms() {
        let k = mono.entries.len();
        for mask in 0u32..(1 << k) {
            let mut prod = Rational::one();
            for (i, a) in mono.entries.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    prod *= a;
                }
            }
            let sign = if (k - mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
            let f = factorize(&prod).unwrap();
            if f.valuation(p).rem_euclid(2) == 1 {
                parts.push((sign * c, f.unit_residue(p, p)));
            }
        }
    }
    wfp_of(p, &parts)
}

fn milnor_valuation(e: &MwExpr, p: u64) -> i64 {
    match milnor_image(e).unwrap() {
        MilnorNF::Unit(u) => u.valuation(p),
        other => panic!("unexpected {other:?}"),
    }
}

fn inverse_tame_product(e: &MwExpr, p: u64) -> u64 {
    let mut acc = 1u64;
    for (mono, c) in e.terms().filter(|(m, _)| m.eta == 0) {
        let t = tame_symbol(&mono.entries[0], &mono.entries[1], p).unwrap();
        let t_inv = mwk_core::arith::mod_inv(t, p).unwrap();
        acc = acc * mwk_core::arith::mod_pow(t_inv, c.rem_euclid(p as i64 - 1) as u64, p) % p;
    }
    acc
}

#[test]
fn residue_agrees_with_independent_oracles() {
    let mut rng = gen::rng(13);
    for round in 0..300 {
        let n = rng.gen_range(-2..=3);
        let e = gen::expr(&mut rng, n, 3);
        let mut primes = e.primes().unwrap();
        primes.extend([2, 3, 5]);
        for p in primes {
            let r = residue(&e, p).unwrap();
            assert_eq!(r.degree, n - 1);
            match (&r.payload, n - 1) {
                (ResiduePayload::Trivial, m) => assert!(m >= 2),
                (ResiduePayload::Unit(u), 1) => {
                    if p != 2 {
                        assert_eq!(*u, inverse_tame_product(&e, p), "round {round}: {e} at {p}");
                    } else {
                        assert_eq!(*u, 1);
                    }
                }
                (ResiduePayload::GW(x), 0) => {
                    assert_eq!(x.rank, milnor_valuation(&e, p), "rank: {e} at {p}");
                    let r2 = x.rank.rem_euclid(2) as u8;
                    let mut projected = WFp::zero(p);
                    projected.rank_parity = r2;
                    if let Some(d) = x.disc {
                        // signed discriminant = (-1)^{r(r-1)/2} det
                        let sign = if (x.rank * (x.rank - 1) / 2).rem_euclid(2) == 1 {
                            SquareClassFp::of_residue(p - 1, p)
                        } else {
                            SquareClassFp::Square
                        };
                        projected.disc = Some(d.mul(sign));
                    }
                    assert_eq!(projected, second_residue_oracle(&e, p), "W part: {e} at {p}");
                }
                (ResiduePayload::W(x), m) if m < 0 => {
                    assert_eq!(*x, second_residue_oracle(&e, p), "{e} at {p}");
                }
                (payload, m) => panic!("payload {payload:?} in degree {m}"),
            }
        }
    }
}

#[test]
fn residue_examples() {
    let r = residue(&sym(vec![int(5), int(2)]), 5).unwrap();
    assert_eq!(r.payload, ResiduePayload::Unit(2));
    let r = residue(&sym(vec![int(3), int(7)]), 5).unwrap();
    assert!(r.is_trivial());
    let r = residue(&sym(vec![int(2)]), 2).unwrap();
    match r.payload {
        ResiduePayload::GW(x) => assert_eq!((x.rank, x.disc), (1, None)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn normal_form_is_additive_and_compatible() {
    let mut rng = gen::rng(14);
    for _ in 0..150 {
        let n = rng.gen_range(-1..=3);
        let e1 = gen::expr(&mut rng, n, 3);
        let e2 = gen::expr(&mut rng, n, 3);
        let n1 = normal_form(&e1).unwrap();
        let n2 = normal_form(&e2).unwrap();
        let sum = normal_form(&add(&e1, &e2)).unwrap();
        assert!(n1.check_compatibility() && n2.check_compatibility());
        assert_eq!(n1.add(&n2).unwrap(), sum, "{e1} + {e2}");
    }
}

#[test]
fn lifting_round_trips() {
    let mut rng = gen::rng(15);
    for _ in 0..100 {
        let n = rng.gen_range(1..=2);
        let e = gen::expr(&mut rng, n, 3);
        let nf = normal_form(&e).unwrap();
        let lifted = from_invariants(&nf).unwrap();
        assert!(eq(&lifted, &e).unwrap(), "{e} lifted to {lifted}");
    }
}

#[test]
fn real_part_splits_off() {
    let mut rng = gen::rng(16);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let e = gen::expr(&mut rng, n, 3);
        let s = normal_form(&e).unwrap().s_inf.unwrap();
        let minus_ones = sym(vec![-Rational::one(); n as usize]);
        let rest = sub(&e, &minus_ones.scale(s));
        assert_eq!(witt_image(&rest).unwrap().signature(), 0, "{e}");
    }
}

// e minus a lift of its residues: an element of K_2^MW(Z) with the same s_inf.
fn integral_part(e: &MwExpr) -> MwExpr {
    let nf = normal_form(e).unwrap();
    let s = nf.s_inf.unwrap();
    let finite = sub(
        &from_invariants(&nf).unwrap(),
        &sym(vec![int(-1), int(-1)]).scale(s),
    );
    let member = sub(e, &finite);
    assert_eq!(normal_form(&member).unwrap().s_inf, Some(s));
    member
}

#[test]
fn integral_k2_is_generated_by_minus_one_squared() {
    let nf = normal_form(&sym(vec![int(-1), int(-1)])).unwrap();
    assert_eq!(nf.s_inf, Some(1));
    assert!(nf.residues.is_empty());
    assert_eq!(
        nf.milnor,
        MilnorNF::K2 {
            real_bit: 1,
            tame: Default::default()
        }
    );

    let mut rng = gen::rng(17);
    let generator = sym(vec![int(-1), int(-1)]);
    for _ in 0..60 {
        let e = gen::expr(&mut rng, 2, 3);
        let member = integral_part(&e);
        assert!(mwk_core::mwcore::in_kmw_z(&member).unwrap());
        let s = normal_form(&member).unwrap().s_inf.unwrap();

        // unique splitting e = e_plus + s [-1,-1] with e_plus in the signature kernel
        let plus = sub(&member, &generator.scale(s));
        assert!(mwk_core::mwcore::in_plus(&plus).unwrap());
        assert!(is_zero(&plus).unwrap());
        for other in [s - 1, s + 1] {
            let wrong = sub(&member, &generator.scale(other));
            assert!(!mwk_core::mwcore::in_plus(&wrong).unwrap());
        }

        // the Milnor image lands in K_2(Z) = {0, {-1,-1}}, with kernel the even multiples
        match milnor_image(&member).unwrap() {
            MilnorNF::K2 { real_bit, tame } => {
                assert!(tame.is_empty());
                assert_eq!(real_bit as i64, s.rem_euclid(2));
            }
            other => panic!("{other:?}"),
        }
    }
    let twice = generator.scale(2);
    assert!(milnor_image(&twice).unwrap() == MilnorNF::K2 { real_bit: 0, tame: Default::default() });
    assert!(!is_zero(&twice).unwrap());
}

#[test]
fn degree_one_milnor_image_is_product() {
    let e = add(&sym(vec![rational(2, 3)]), &term(-2, 0, vec![int(-5)]));
    let expected = factorize(&rational(2, 75)).unwrap();
    assert_eq!(milnor_image(&e).unwrap(), MilnorNF::Unit(expected));
}
