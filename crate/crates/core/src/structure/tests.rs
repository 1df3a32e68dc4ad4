use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::leavitt::SpecialEdgeChoice;
use crate::random::{random_lpa, random_mpa};
use crate::samples;

fn et() -> Ctx {
    samples::toeplitz().ctx().unwrap()
}

#[test]
fn cut_examples() {
    let ctx = et();
    let a = MpaElement::parse(&ctx, "f + w * e").unwrap();
    let cut = cut_mpa(&a, 1).unwrap();
    assert_eq!(cut.to_string(), "1 * f");
    assert_eq!(cut.ctx().quiver().vertex_ids(), &["1".to_string()]);
    assert_eq!(cut.ctx().tower().level_count(), 1);
    assert!(cut_mpa(&MpaElement::vertex(&ctx, 1), 1).unwrap().is_zero());
    assert!(matches!(cut_mpa(&a, 0), Err(Error::LevelOutOfRange(0))));
    assert!(matches!(cut_mpa(&a, 2), Err(Error::LevelOutOfRange(2))));

    // H_0 = ∅: cutting at 1 kills nothing.
    let c3 = samples::chain3().ctx().unwrap();
    let b = MpaElement::parse(&c3, "@1 + a.b").unwrap();
    let cut = cut_mpa(&b, 1).unwrap();
    assert_eq!(cut.to_string(), b.to_string());
    assert_eq!(cut.ctx().quiver(), c3.quiver());
}

#[test]
fn corner_examples() {
    let ctx = et();
    let r0 = ChainReindex::corner(&ctx, 0).unwrap();
    assert_eq!(r0.target.tower().level_count(), 1);
    assert_eq!(r0.target.levels().levels(), &[0]);
    // The only level of the corner is F_4.
    assert!(r0.target.tower().w().unwrap().membership_at_level(0));
    let a = MpaElement::parse(&ctx, "w * @2 + f").unwrap();
    assert_eq!(r0.apply_mpa(&a).unwrap().to_string(), "w * @2");
    assert!(corner_mpa(&MpaElement::parse(&ctx, "@1 + f + e").unwrap(), 0).unwrap().is_zero());

    let l = LpaElement::parse(&ctx, "w * @2 + e.~e + ~e").unwrap();
    assert_eq!(corner_lpa(&l, 0).unwrap().to_string(), "w * @2");
    // Corner at r is the identity.
    assert_eq!(corner_lpa(&l, 1).unwrap(), l);
}

#[test]
fn corner_path_identities() {
    let q = et().quiver().clone();
    assert!(check_corner_path_identities(&q, q.vertex_set_from_ids(&["2"]).unwrap(), 2).unwrap());
    assert!(check_corner_path_identities(&q, q.all_vertices(), 3).unwrap());
    let c3 = samples::chain3().quiver;
    assert!(check_corner_path_identities(&c3, c3.vertex_set_from_ids(&["2", "3"]).unwrap(), 3).unwrap());
    assert!(check_corner_path_identities(&q, q.vertex_set_from_ids(&["1"]).unwrap(), 2).is_err());
}

fn mixed_samples() -> Vec<samples::Sample> {
    samples::all().into_iter().filter(|s| s.chain.length() >= 1).collect()
}

#[test]
fn cuts_are_homomorphisms() {
    for s in mixed_samples() {
        let ctx = s.ctx().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 1..=s.chain.length() {
            let cut = ChainReindex::cut(&ctx, i).unwrap();
            assert_eq!(cut.apply_mpa(&MpaElement::one(&ctx)).unwrap(), MpaElement::one(&cut.target));
            assert_eq!(cut.apply_lpa(&LpaElement::one(&ctx)).unwrap(), LpaElement::one(&cut.target));
            for _ in 0..50 {
                let (a, b) = (random_mpa(&ctx, &mut rng, 3, 4), random_mpa(&ctx, &mut rng, 3, 4));
                let ab = cut.apply_mpa(&a.mul(&b).unwrap()).unwrap();
                assert_eq!(ab, cut.apply_mpa(&a).unwrap().mul(&cut.apply_mpa(&b).unwrap()).unwrap());
                let (x, y) = (random_lpa(&ctx, &mut rng, 2, 4), random_lpa(&ctx, &mut rng, 2, 4));
                let xy = cut.apply_lpa(&x.mul(&y).unwrap()).unwrap();
                assert_eq!(xy, cut.apply_lpa(&x).unwrap().mul(&cut.apply_lpa(&y).unwrap()).unwrap());
            }
        }
    }
}

#[test]
fn cuts_compose() {
    for s in mixed_samples() {
        let ctx = s.ctx().unwrap();
        let r = s.chain.length();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 1..=r {
            for k in 1..=r - i {
                for _ in 0..30 {
                    let a = random_mpa(&ctx, &mut rng, 3, 5);
                    assert_eq!(cut_mpa(&cut_mpa(&a, i).unwrap(), k).unwrap(), cut_mpa(&a, i + k).unwrap());
                    let x = random_lpa(&ctx, &mut rng, 2, 5);
                    assert_eq!(cut_lpa(&cut_lpa(&x, i).unwrap(), k).unwrap(), cut_lpa(&x, i + k).unwrap());
                }
            }
        }
    }
}

#[test]
fn corners_are_multiplicative() {
    for s in samples::all() {
        let ctx = s.ctx().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for i in 0..=s.chain.length() {
            let corner = ChainReindex::corner(&ctx, i).unwrap();
            let p_h = MpaElement::vertex_sum(&ctx, corner.set());
            assert_eq!(corner.apply_mpa(&p_h).unwrap(), MpaElement::one(&corner.target));
            let lp_h = LpaElement::vertex_sum(&ctx, corner.set());
            let choice = SpecialEdgeChoice::least(&ctx);
            let target_choice = SpecialEdgeChoice::least(&corner.target);
            for _ in 0..30 {
                let (a, b) = (random_mpa(&ctx, &mut rng, 3, 4), random_mpa(&ctx, &mut rng, 3, 4));
                let lhs = corner.apply_mpa(&a).unwrap().mul(&corner.apply_mpa(&b).unwrap()).unwrap();
                assert_eq!(lhs, corner.apply_mpa(&a.mul(&p_h).unwrap().mul(&b).unwrap()).unwrap());
                let (x, y) = (random_lpa(&ctx, &mut rng, 2, 4), random_lpa(&ctx, &mut rng, 2, 4));
                let lhs = corner.apply_lpa(&x).unwrap().mul(&corner.apply_lpa(&y).unwrap()).unwrap();
                assert_eq!(lhs, corner.apply_lpa(&x.mul(&lp_h).unwrap().mul(&y).unwrap()).unwrap());
                assert_eq!(corner.apply_lpa(&x.reduce(&choice)).unwrap(), corner.apply_lpa(&x).unwrap().reduce(&target_choice));
            }
        }
    }
}

#[test]
fn series_reindex_stays_valid() {
    for s in mixed_samples() {
        let ctx = s.ctx().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = TruncatedSeries::from_mpa(&random_mpa(&ctx, &mut rng, 4, 6), 3);
            for i in 1..=s.chain.length() {
                assert!(ChainReindex::cut(&ctx, i).unwrap().apply_series(&x).unwrap().is_mixed_valid());
            }
            for i in 0..=s.chain.length() {
                assert!(ChainReindex::corner(&ctx, i).unwrap().apply_series(&x).unwrap().is_mixed_valid());
            }
        }
    }
}

#[test]
fn reindexing_needs_a_strict_chain() {
    let ctx = et();
    let tail = samples::cycle_tail().ctx().unwrap();
    let h = tail.quiver().vertex_set_from_ids(&["3", "4"]).unwrap();
    // Quotient levels come from the non-strict family ∅, ∅, {1, 2}.
    let (quotient, _) = tail.quotient(h).unwrap();
    assert!(quotient.chain().is_none());
    assert!(matches!(ChainReindex::cut(&quotient, 1), Err(Error::InvalidChain(_))));
    let rose = samples::rose().ctx().unwrap();
    assert!(matches!(ChainReindex::cut(&rose, 1), Err(Error::LevelOutOfRange(1))));
    let other = samples::chain3().ctx().unwrap();
    let a = MpaElement::one(&other);
    assert_eq!(ChainReindex::cut(&ctx, 1).unwrap().apply_mpa(&a), Err(Error::ContextMismatch));
}
