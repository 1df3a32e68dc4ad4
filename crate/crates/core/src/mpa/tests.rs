use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::quiver::{HereditaryChain, Quiver};
use crate::random::random_mpa;
use crate::tower::TowerSpec;

fn et() -> Quiver {
    Quiver::new(["1", "2"], [("f", "1", "1"), ("e", "1", "2")]).unwrap()
}

fn et_ctx(spec: TowerSpec) -> Ctx {
    let q = et();
    let chain = HereditaryChain::new(&q, vec![q.vertex_set_from_ids(&["2"]).unwrap(), q.all_vertices()]).unwrap();
    MixedContext::new(q, &chain, spec.build().unwrap()).unwrap()
}

fn f4() -> TowerSpec {
    TowerSpec::FiniteField { p: 2, degrees: vec![1, 2] }
}

fn path(ctx: &Ctx, ids: &[&str]) -> Path {
    ctx.quiver().path_from_ids(ids).unwrap()
}

#[test]
fn level_table_of_running_example() {
    let ctx = et_ctx(f4());
    assert_eq!(ctx.levels().levels(), &[0, 1]);
}

#[test]
fn make_element_enforces_levels() {
    let ctx = et_ctx(f4());
    let w = ctx.tower().w().unwrap();
    assert!(MpaElement::make(&ctx, [(path(&ctx, &["e"]), w.clone())]).is_ok());
    let err = MpaElement::make(&ctx, [(path(&ctx, &["f"]), w)]).unwrap_err();
    assert!(matches!(err, Error::LevelViolation { coefficient_level: 1, required_level: 0, .. }));
    assert!(MpaElement::make(&ctx, []).unwrap().is_zero());
}

#[test]
fn multiplication_examples() {
    let ctx = et_ctx(f4());
    let e = MpaElement::edge(&ctx, 1);
    let f = MpaElement::edge(&ctx, 0);
    assert_eq!(MpaElement::vertex(&ctx, 0).mul(&e).unwrap(), e);
    assert!(e.mul(&f).unwrap().is_zero());
    let we = e.scale(&ctx.tower().w().unwrap()).unwrap();
    let prod = f.mul(&we).unwrap();
    assert_eq!(prod.to_string(), "w * f.e");
    assert!(prod.is_valid());
}

#[test]
fn augmentation_examples() {
    let ctx = et_ctx(TowerSpec::RationalFunction { levels: 1 });
    let k = ctx.tower();
    let a = MpaElement::parse(&ctx, "3 * @1 + 5 * e").unwrap();
    assert_eq!(a.augmentation(), vec![k.from_int(3), k.zero()]);
    assert_eq!(MpaElement::zero(&ctx).augmentation(), vec![k.zero(), k.zero()]);
    let b = MpaElement::parse(&ctx, "t1 * @2").unwrap();
    assert_eq!(b.augmentation(), vec![k.zero(), k.t(1).unwrap()]);
    assert!(MpaElement::parse(&ctx, "t1 * @1").is_err());
}

#[test]
fn oracle_examples() {
    let ctx = et_ctx(f4());
    let w = ctx.tower().w().unwrap();
    assert!(oracle_membership(&ctx, &[(path(&ctx, &["e"]), w.clone())]).unwrap());
    assert!(!oracle_membership(&ctx, &[(path(&ctx, &["f"]), w.clone())]).unwrap());
    assert!(oracle_membership(&ctx, &[(path(&ctx, &["f", "e"]), w.clone())]).unwrap());
    assert!(!oracle_membership(&ctx, &[(Path::trivial(0), w.clone())]).unwrap());
    let one = ctx.tower().one();
    assert!(oracle_membership(&ctx, &[(path(&ctx, &["f", "f", "f"]), one.clone()), (Path::trivial(0), one)]).unwrap());
    let q = et_ctx(TowerSpec::RationalFunction { levels: 1 });
    assert_eq!(oracle_membership(&q, &[]), Err(Error::NeedsFiniteField));
}

#[test]
fn graded_dimension_examples() {
    let a2 = Quiver::new(["1", "2"], [("a", "1", "2")]).unwrap();
    let k = TowerSpec::Constant { p: 2, levels: 0 }.build().unwrap();
    let ctx = MixedContext::unmixed(a2, k).unwrap();
    assert_eq!(graded_dimension(&ctx, 0).unwrap(), 2);
    assert_eq!(graded_dimension(&ctx, 2).unwrap(), 0);
    let et = et_ctx(f4());
    assert_eq!(graded_dimension(&et, 1).unwrap(), 3);
    assert_eq!(graded_dimension(&et_ctx(TowerSpec::RationalFunction { levels: 1 }), 1), Err(Error::InfiniteDimension));
}

#[test]
fn text_roundtrip_examples() {
    let ctx = et_ctx(f4());
    let a = MpaElement::parse(&ctx, "@1 + (w+1) * e + f.f.e").unwrap();
    assert_eq!(a.to_string(), "1 * @1 + (w + 1) * e + 1 * f.f.e");
    assert_eq!(MpaElement::parse(&ctx, &a.to_string()).unwrap(), a);
    assert_eq!(MpaElement::zero(&ctx).to_string(), "0");
    assert!(MpaElement::parse(&ctx, "e.f").is_err());
    assert!(MpaElement::parse(&ctx, "~e").is_err());
}

fn small_quivers() -> Vec<Quiver> {
    vec![
        et(),
        Quiver::new(["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3")]).unwrap(),
        Quiver::new(["1", "2", "3", "4"], [("a", "1", "2"), ("b", "2", "1"), ("c", "2", "3"), ("d", "3", "4"), ("g", "4", "4")]).unwrap(),
        Quiver::new(["1"], [("a", "1", "1"), ("b", "1", "1")]).unwrap(),
    ]
}

/// Every (quiver, strict chain of length one, F_2 ⊆ F_4) context.
fn mixed_contexts() -> Vec<Ctx> {
    let mut out = Vec::new();
    for q in small_quivers() {
        let lattice = q.enumerate_lattice();
        for &h0 in &lattice.sets {
            if h0 == q.all_vertices() {
                continue;
            }
            let chain = HereditaryChain::new(&q, vec![h0, q.all_vertices()]).unwrap();
            out.push(MixedContext::new(q.clone(), &chain, f4().build().unwrap()).unwrap());
        }
    }
    out
}

#[test]
fn level_description_matches_recursive_oracle() {
    for ctx in mixed_contexts() {
        let scalars = ctx.tower().enumerate_level(1).unwrap();
        for p in ctx.quiver().paths_up_to(3) {
            for c in &scalars {
                let accepted = MpaElement::make(&ctx, [(p.clone(), c.clone())]).is_ok();
                let oracle = oracle_membership(&ctx, &[(p.clone(), c.clone())]).unwrap();
                assert_eq!(accepted, oracle, "{} with {c}", ctx.quiver().format_path(&p));
            }
        }
    }
}

#[test]
fn levels_are_antitone_along_edges() {
    for ctx in mixed_contexts() {
        assert!(ctx.levels().is_antitone(ctx.quiver()));
    }
}

fn random_ctx(kind: u8) -> Ctx {
    match kind {
        0 => et_ctx(f4()),
        1 => et_ctx(TowerSpec::RationalFunction { levels: 1 }),
        _ => {
            let q = Quiver::new(["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3"), ("c", "1", "1"), ("d", "2", "2")]).unwrap();
            let chain = HereditaryChain::new(
                &q,
                vec![q.vertex_set_from_ids(&["3"]).unwrap(), q.vertex_set_from_ids(&["2", "3"]).unwrap(), q.all_vertices()],
            )
            .unwrap();
            MixedContext::new(q, &chain, TowerSpec::FiniteField { p: 2, degrees: vec![1, 2, 4] }.build().unwrap()).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_under_ring_operations(kind in 0u8..3, seed in any::<u64>()) {
        let ctx = random_ctx(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mpa(&ctx, &mut rng, 3, 4);
        let b = random_mpa(&ctx, &mut rng, 3, 4);
        prop_assert!(a.add(&b).unwrap().is_valid());
        prop_assert!(a.mul(&b).unwrap().is_valid());
        let ab = a.mul(&b).unwrap();
        prop_assert!(MpaElement::make(&ctx, ab.terms().map(|(p, c)| (p.clone(), c.clone()))).is_ok());
    }

    #[test]
    fn ring_axioms(kind in 0u8..3, seed in any::<u64>()) {
        let ctx = random_ctx(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mpa(&ctx, &mut rng, 2, 3);
        let b = random_mpa(&ctx, &mut rng, 2, 3);
        let c = random_mpa(&ctx, &mut rng, 2, 3);
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().mul(&c).unwrap(), a.mul(&c).unwrap().add(&b.mul(&c).unwrap()).unwrap());
        let one = MpaElement::one(&ctx);
        prop_assert_eq!(one.mul(&a).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn augmentation_is_a_split_homomorphism(kind in 0u8..3, seed in any::<u64>()) {
        let ctx = random_ctx(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mpa(&ctx, &mut rng, 2, 4);
        let b = random_mpa(&ctx, &mut rng, 2, 4);
        let ea = a.augmentation();
        let eb = b.augmentation();
        let eab = a.mul(&b).unwrap().augmentation();
        for v in 0..ea.len() {
            prop_assert_eq!(&eab[v], &(&ea[v] * &eb[v]));
            prop_assert!(ea[v].membership_at_level(ctx.lev(v)));
        }
        let split = MpaElement::from_vertex_values(&ctx, &ea).unwrap();
        prop_assert_eq!(split.augmentation(), ea);
    }

    #[test]
    fn oracle_agrees_on_random_candidates(ci in 0usize..64, seed in any::<u64>()) {
        let all = mixed_contexts();
        let ctx = &all[ci % all.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let paths = ctx.quiver().paths_up_to(3);
        let n = rng.gen_range(1..=3);
        let terms: Vec<(Path, TowerElement)> = (0..n)
            .map(|_| (paths[rng.gen_range(0..paths.len())].clone(), ctx.tower().random_element(1, &mut rng)))
            .collect();
        let combined = MpaElement::unchecked(ctx, terms.clone());
        let candidate: Vec<_> = combined.terms().map(|(p, c)| (p.clone(), c.clone())).collect();
        prop_assert_eq!(
            MpaElement::make(ctx, candidate.clone()).is_ok(),
            oracle_membership(ctx, &candidate).unwrap()
        );
    }

    #[test]
    fn printed_elements_parse_back(kind in 0u8..3, seed in any::<u64>()) {
        let ctx = random_ctx(kind);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_mpa(&ctx, &mut rng, 3, 5);
        let s = a.to_string();
        let b = MpaElement::parse(&ctx, &s).unwrap();
        prop_assert_eq!(b.to_string(), s);
        prop_assert_eq!(b, a);
    }
}
