mod common;

use proptest::prelude::*;
use qborel::qscalar::rat;
use qborel::rewrite::apply_move;
use qborel::{OperatorSum, QScalar, TransformScript};

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scalar_ring_laws(seed in seeds()) {
        let mut r = common::rng(seed);
        let (a, b, c) = (common::scalar(&mut r), common::scalar(&mut r), common::scalar(&mut r));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, QScalar::zero());
        prop_assert_eq!((&a * &b).star(), &a.star() * &b.star());
    }

    #[test]
    fn scalar_text_round_trip(seed in seeds()) {
        let a = common::scalar(&mut common::rng(seed));
        prop_assert_eq!(a.to_string().parse::<QScalar>().unwrap(), a);
    }

    #[test]
    fn exact_division(seed in seeds()) {
        let mut r = common::rng(seed);
        let (a, b) = (common::scalar(&mut r), common::scalar(&mut r));
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
    }

    #[test]
    fn sum_text_round_trip(seed in seeds()) {
        let s = common::space_b();
        let x = common::sum(&mut common::rng(seed), &s, 4);
        prop_assert_eq!(OperatorSum::parse(&s, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn product_is_associative(seed in seeds()) {
        prop_assert!(common::associativity(seed));
    }

    #[test]
    fn star_is_an_anti_automorphism(seed in seeds()) {
        prop_assert!(common::star_anti(seed));
    }

    #[test]
    fn moves_are_homomorphisms(seed in seeds()) {
        prop_assert!(common::move_homomorphism(seed));
    }

    #[test]
    fn expand_then_absorb_is_identity(seed in seeds()) {
        prop_assert!(common::expand_absorb(seed));
    }

    #[test]
    fn linear_moves_invert(seed in seeds()) {
        let mut r = common::rng(seed);
        let s = common::space_a();
        let mv = common::linear_move(&mut r, &s);
        let script = TransformScript { schema: None, name: "m".into(), description: String::new(), moves: vec![mv] };
        let x = common::sum(&mut r, &s, 3);
        let there = qborel::apply_script(&script, &x).unwrap();
        prop_assert_eq!(qborel::apply_script(&script.inverse(&s).unwrap(), &there).unwrap(), x);
    }

    #[test]
    fn pentagon(seed in seeds()) {
        let x = common::pentagon_monomial(&mut common::rng(seed));
        let (lhs, rhs) = common::pentagon_sides(&x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn q_binomial_symmetry(n in 0u32..8, k in 0u32..8, den in 1i64..3) {
        prop_assume!(k <= n);
        let r = rat(1, den);
        prop_assert_eq!(QScalar::q_binomial(n, k, r), QScalar::q_binomial(n, n - k, r));
        prop_assert_eq!(QScalar::q_binomial(n, k, r).star(), QScalar::q_binomial(n, k, r));
    }
}

#[test]
fn gaussian_shift_commutes_with_product_on_mixed_scales() {
    let mut r = common::rng(3);
    let s = common::space_b();
    for _ in 0..50 {
        let mv = common::symplectic_move(&mut r, &s);
        let (x, y) = (common::sum(&mut r, &s, 2), common::sum(&mut r, &s, 2));
        let lhs = apply_move(&mv, &x.mul(&y).unwrap()).unwrap();
        assert_eq!(
            lhs,
            apply_move(&mv, &x)
                .unwrap()
                .mul(&apply_move(&mv, &y).unwrap())
                .unwrap(),
            "{mv:?}"
        );
    }
}

#[test]
fn random_cases_are_not_degenerate() {
    let mut changed = 0;
    for seed in 0..200 {
        let c = common::dilog_case(&mut common::rng(seed));
        if apply_move(&c.mv, &c.x).unwrap() != c.x {
            changed += 1;
        }
    }
    assert!(changed > 50, "{changed}");
    let swapped = (0..50).filter(|&seed| {
        let x = common::pentagon_monomial(&mut common::rng(seed));
        let (lhs, _) = common::pentagon_sides(&x).unwrap();
        let g = |a: &str| qborel::Move::Dilog {
            arg: a.into(),
            m: "1".into(),
            direction: qborel::Direction::StarRight,
        };
        let other = apply_move(
            &g(common::PENTAGON_U),
            &apply_move(&g(common::PENTAGON_V), &x).unwrap(),
        );
        other.map_or(true, |o| o != lhs)
    });
    assert!(swapped.count() > 10);
}
