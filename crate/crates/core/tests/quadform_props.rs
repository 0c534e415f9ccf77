use mwk_core::arith::{int, rational, Rational};
use mwk_core::quadform::{in_power_i, is_hyperbolic, pfister, witt_equal, DiagForm};
use num_traits::{One, Signed};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (1i64..=60, any::<bool>(), 1i64..=12).prop_map(|(n, neg, d)| rational(if neg { -n } else { n }, d))
}

fn form(max_rank: usize) -> impl Strategy<Value = DiagForm> {
    prop::collection::vec(rat(), 0..=max_rank).prop_map(|e| DiagForm::new(e).unwrap())
}

fn hyperbolic_plane() -> DiagForm {
    DiagForm::new(vec![int(1), int(-1)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pfister_steinberg_forms_are_hyperbolic(a in rat()) {
        prop_assume!(!a.is_one());
        let q = pfister(&[a.clone(), int(1) - &a]).unwrap();
        prop_assert!(is_hyperbolic(&q).unwrap(), "<<{}, 1 - {}>>", a, a);
    }

    #[test]
    fn fundamental_ideal_powers_are_nested(q in form(8)) {
        for n in 1..=4 {
            if in_power_i(&q, n).unwrap() {
                prop_assert!(in_power_i(&q, n - 1).unwrap(), "I^{} but not I^{}", n, n - 1);
            }
        }
    }

    #[test]
    fn pfister_signature(entries in prop::collection::vec(rat(), 1..=3)) {
        let q = pfister(&entries).unwrap();
        let expected = if entries.iter().all(Signed::is_negative) { 1 << entries.len() } else { 0 };
        prop_assert_eq!(q.signature(), expected);
    }

    #[test]
    fn witt_equality_is_an_equivalence(q1 in form(4), q2 in form(4), q3 in form(4)) {
        prop_assert!(witt_equal(&q1, &q1).unwrap());
        prop_assert_eq!(witt_equal(&q1, &q2).unwrap(), witt_equal(&q2, &q1).unwrap());
        if witt_equal(&q1, &q2).unwrap() && witt_equal(&q2, &q3).unwrap() {
            prop_assert!(witt_equal(&q1, &q3).unwrap());
        }
    }

    #[test]
    fn witt_equality_ignores_squares_and_hyperbolic_planes(q in form(5), squares in prop::collection::vec(rat(), 5)) {
        let scaled: Vec<Rational> = q
            .entries()
            .iter()
            .zip(&squares)
            .map(|(a, s)| a * s * s)
            .collect();
        let scaled = DiagForm::new(scaled).unwrap();
        prop_assert!(witt_equal(&q, &scaled).unwrap());
        prop_assert!(witt_equal(&q, &q.orthogonal_sum(&hyperbolic_plane())).unwrap());
        prop_assert!(is_hyperbolic(&q.orthogonal_sum(&q.negated())).unwrap());
    }
}
