use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn f2_f4() -> Tower {
    TowerSpec::FiniteField { p: 2, degrees: vec![1, 2] }.build().unwrap()
}

fn q_qt(levels: usize) -> Tower {
    TowerSpec::RationalFunction { levels }.build().unwrap()
}

#[test]
fn characteristic_two_cancellation() {
    let k = f2_f4();
    let w = k.w().unwrap();
    assert!((&w + &w).is_zero());
}

#[test]
fn t_times_inverse_is_one() {
    let k = q_qt(1);
    let t = k.t(1).unwrap();
    assert_eq!(arith(&t, &k.one().try_div(&t).unwrap(), ArithOp::Mul).unwrap(), k.one());
}

#[test]
fn w_squared_reduces_by_minimal_polynomial() {
    let k = f2_f4();
    let w = k.w().unwrap();
    assert_eq!(&w * &w, &w + &k.one());
    assert_eq!(k.parse("w^2").unwrap().to_string(), "w + 1");
}

#[test]
fn division_by_zero_is_an_error() {
    let k = f2_f4();
    assert_eq!(arith(&k.one(), &k.zero(), ArithOp::Div), Err(Error::DivisionByZero));
    let q = q_qt(1);
    assert_eq!(q.one().try_div(&q.zero()), Err(Error::DivisionByZero));
}

#[test]
fn membership_examples() {
    let k = f2_f4();
    assert!(k.one().membership_at_level(0));
    assert!(!k.w().unwrap().membership_at_level(0));
    assert!(k.w().unwrap().membership_at_level(1));
    let q = q_qt(1);
    assert!(q.t(1).unwrap().membership_at_level(1));
    assert!(!q.t(1).unwrap().membership_at_level(0));
    let q2 = q_qt(2);
    let x = q2.parse("(t1 + t2)/(t1 + t2)").unwrap();
    assert_eq!(x.level(), 0);
}

#[test]
fn independence_examples() {
    let k = f2_f4();
    assert!(k.linear_independent_over(&[k.one(), k.w().unwrap()], 0).unwrap());
    assert!(!k.linear_independent_over(&[k.one(), k.w().unwrap()], 1).unwrap());
    assert!(!k.linear_independent_over(&[k.one(), k.one()], 0).unwrap());
    assert!(k.linear_independent_over(&[], 0).unwrap());
    let q = q_qt(1);
    let t = q.t(1).unwrap();
    assert!(q.linear_independent_over(&[q.one(), t.clone(), &t * &t], 0).unwrap());
    assert!(!q.linear_independent_over(&[q.one(), t.clone()], 1).unwrap());
    assert!(!q.linear_independent_over(&[q.one(), q.one()], 1).unwrap());
    // 1/(t+1) and t/(t+1) are independent over Q, dependent with their sum 1
    let a = q.parse("1/(t1 + 1)").unwrap();
    let b = q.parse("t1/(t1 + 1)").unwrap();
    assert!(q.linear_independent_over(&[a.clone(), b.clone()], 0).unwrap());
    assert!(!q.linear_independent_over(&[a, b, q.one()], 0).unwrap());
}

#[test]
fn parse_format_roundtrip_examples() {
    let q = q_qt(2);
    for s in ["0", "-3/2", "t1^2 - 3/2*t2", "t1/(t2 + 1)", "(t1 + 1)/t2", "-t1/(t1*t2)"] {
        let a = q.parse(s).unwrap();
        assert_eq!(q.parse(&a.to_string()).unwrap(), a, "{s}");
    }
    assert!(q.parse("t3").is_err());
    assert!(q.parse("w").is_err());
    assert!(f2_f4().parse("t1").is_err());
}

#[test]
fn windows_reindex_levels() {
    let k = TowerSpec::FiniteField { p: 2, degrees: vec![1, 2, 4] }.build().unwrap();
    let g = k.level_generator(1).unwrap();
    assert_eq!(g.level(), 1);
    let upper = k.window(1, 2).unwrap();
    let g2 = upper.retag(&g).unwrap();
    assert_eq!(g2.level(), 0);
    let lower = k.window(0, 1).unwrap();
    assert!(lower.retag(&g).is_ok());
    assert!(lower.retag(&k.w().unwrap()).is_err());
    assert_eq!(upper.degree_over_base(1).unwrap(), 2);
    assert_eq!(k.degree_over_base(2).unwrap(), 4);
    assert_eq!(q_qt(1).degree_over_base(1), Err(Error::InfiniteDimension));
}

#[test]
fn constant_towers() {
    let k = TowerSpec::Constant { p: 3, levels: 2 }.build().unwrap();
    assert_eq!(k.level_count(), 3);
    assert_eq!(k.from_int(5).level(), 0);
    let q = TowerSpec::Constant { p: 0, levels: 1 }.build().unwrap();
    assert_eq!(q.parse("1/3 + 2/3").unwrap(), q.one());
    assert_eq!(q.degree_over_base(1).unwrap(), 1);
}

/// Brute-force dependence search over all `K_level` coefficient tuples.
fn brute_force_independent(k: &Tower, elems: &[TowerElement], level: usize) -> bool {
    let scalars = k.enumerate_level(level).unwrap();
    let n = elems.len();
    let total = scalars.len().pow(n as u32);
    for idx in 1..total {
        let mut rem = idx;
        let mut acc = k.zero();
        for a in elems {
            let c = &scalars[rem % scalars.len()];
            rem /= scalars.len();
            acc = &acc + &(c * a);
        }
        if acc.is_zero() {
            return false;
        }
    }
    true
}

#[test]
fn independence_matches_brute_force_on_small_towers() {
    let towers = [
        TowerSpec::FiniteField { p: 2, degrees: vec![1, 2] },
        TowerSpec::FiniteField { p: 2, degrees: vec![1, 2, 4] },
        TowerSpec::FiniteField { p: 3, degrees: vec![1, 2] },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in towers {
        let k = spec.build().unwrap();
        for level in 0..=k.top() {
            if k.enumerate_level(level).unwrap().len() > 16 {
                continue;
            }
            for _ in 0..40 {
                let n = rng.gen_range(1..=3);
                let elems: Vec<_> = (0..n).map(|_| k.random_element(k.top(), &mut rng)).collect();
                assert_eq!(
                    k.linear_independent_over(&elems, level).unwrap(),
                    brute_force_independent(&k, &elems, level),
                    "{spec:?} level {level} {elems:?}"
                );
            }
        }
    }
}

fn tower_for(kind: u8) -> Tower {
    match kind {
        0 => f2_f4(),
        1 => TowerSpec::FiniteField { p: 3, degrees: vec![1, 2] }.build().unwrap(),
        _ => q_qt(2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn membership_is_upward_closed(kind in 0u8..3, seed in any::<u64>()) {
        let k = tower_for(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = k.random_element(k.top(), &mut rng);
        for i in 0..=k.top() {
            if a.membership_at_level(i) {
                for j in i..=k.top() {
                    prop_assert!(a.membership_at_level(j));
                }
            }
        }
    }

    #[test]
    fn arithmetic_respects_levels(kind in 0u8..3, seed in any::<u64>(), la in 0usize..3, lb in 0usize..3) {
        let k = tower_for(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = k.random_element(la.min(k.top()), &mut rng);
        let b = k.random_element(lb.min(k.top()), &mut rng);
        let bound = a.level().max(b.level());
        prop_assert!((&a + &b).level() <= bound);
        prop_assert!((&a - &b).level() <= bound);
        prop_assert!((&a * &b).level() <= bound);
        if !b.is_zero() {
            prop_assert!(a.try_div(&b).unwrap().level() <= bound);
        }
    }

    #[test]
    fn canonical_forms_decide_equality(kind in 0u8..3, seed in any::<u64>()) {
        let k = tower_for(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = k.random_element(k.top(), &mut rng);
        let b = k.random_element(k.top(), &mut rng);
        let two = k.from_int(2);
        let lhs = (&a + &b).pow(2);
        let rhs = &(&(&a * &a) + &(&two * &(&a * &b))) + &(&b * &b);
        prop_assert_eq!(lhs.to_string(), rhs.to_string());
        prop_assert_eq!(lhs, rhs);
        if !a.is_zero() {
            prop_assert_eq!(&a.inv().unwrap() * &a, k.one());
        }
    }

    #[test]
    fn printed_elements_parse_back(kind in 0u8..3, seed in any::<u64>()) {
        let k = tower_for(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = k.random_element(k.top(), &mut rng);
        prop_assert_eq!(k.parse(&a.to_string()).unwrap(), a);
    }
}
