use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::quiver::HereditaryChain;
use crate::random::random_lpa;
use crate::samples;
use crate::tower::{rank_mod_p, TowerSpec};

fn unmixed(vertices: &[&str], edges: &[(&str, &str, &str)], spec: TowerSpec) -> Ctx {
    let q = Quiver::new(vertices.iter().copied(), edges.iter().copied()).unwrap();
    MixedContext::unmixed(q, spec.build().unwrap()).unwrap()
}

fn f2() -> TowerSpec {
    TowerSpec::Constant { p: 2, levels: 0 }
}

fn rose3() -> Ctx {
    unmixed(&["v"], &[("a", "v", "v"), ("b", "v", "v"), ("c", "v", "v")], f2())
}

fn sample_ctx(s: &samples::Sample) -> Ctx {
    s.ctx().unwrap()
}

#[test]
fn ghost_real_contraction() {
    let ctx = sample_ctx(&samples::rose());
    let a = LpaElement::edge(&ctx, 0);
    let b = LpaElement::edge(&ctx, 1);
    let abar = LpaElement::ghost(&ctx, 0);
    assert!(abar.mul(&b).unwrap().is_zero());
    assert_eq!(abar.mul(&a).unwrap(), LpaElement::vertex(&ctx, 0));

    let ctx = rose3();
    let ab = LpaElement::parse(&ctx, "a.~b").unwrap();
    let bc = LpaElement::parse(&ctx, "b.~c").unwrap();
    assert_eq!(ab.mul(&bc).unwrap(), LpaElement::parse(&ctx, "a.~c").unwrap());
    // Partial contractions in both directions.
    let x = LpaElement::parse(&ctx, "a.~c.~b").unwrap();
    assert_eq!(x.mul(&LpaElement::parse(&ctx, "b").unwrap()).unwrap().to_string(), "1 * a.~c");
    assert_eq!(x.mul(&LpaElement::parse(&ctx, "b.c.a").unwrap()).unwrap().to_string(), "1 * a.a");
}

#[test]
fn rewriting_examples() {
    let ctx = sample_ctx(&samples::rose());
    let choice = SpecialEdgeChoice::least(&ctx);
    assert_eq!(choice.get(0), Some(0));
    let aa = LpaElement::parse(&ctx, "a.~a").unwrap();
    assert_eq!(aa.reduce(&choice), LpaElement::parse(&ctx, "@v - b.~b").unwrap());
    assert_eq!(LpaElement::vertex(&ctx, 0).reduce(&choice), LpaElement::vertex(&ctx, 0));
    let sum = LpaElement::parse(&ctx, "a.~a + b.~b").unwrap();
    assert_eq!(sum.reduce(&choice), LpaElement::vertex(&ctx, 0));
    // Deeper redexes unwind recursively.
    let deep = LpaElement::parse(&ctx, "b.a.~a.~b").unwrap().reduce(&choice);
    assert_eq!(deep, LpaElement::parse(&ctx, "b.~b - b.b.~b.~b").unwrap());
    assert!(deep.is_normal(&choice));
}

#[test]
fn relation_examples() {
    let ctx = sample_ctx(&samples::a2());
    let p1 = LpaElement::vertex(&ctx, 0);
    let p2 = LpaElement::vertex(&ctx, 1);
    assert!(p1.mul(&p2).unwrap().is_zero());
    let abar = LpaElement::ghost(&ctx, 0);
    assert_eq!(p2.mul(&abar).unwrap(), abar);
    for s in samples::all() {
        let ctx = sample_ctx(&s);
        for choice in SpecialEdgeChoice::all(&ctx) {
            let report = check_relations(&ctx, &choice);
            let failed: Vec<_> = report.iter().filter(|c| !c.holds).collect();
            assert!(failed.is_empty(), "{}: {failed:?}", s.name);
            assert!(report.iter().any(|c| c.relation == "V"));
            assert_eq!(report.iter().any(|c| c.relation == "CK1"), ctx.quiver().edge_count() > 0);
        }
    }
}

#[test]
fn mu_inverse_witnesses() {
    let rose = sample_ctx(&samples::rose());
    assert!(verify_mu_inverse(&rose, &SpecialEdgeChoice::least(&rose), 0).unwrap());
    let a2 = sample_ctx(&samples::a2());
    let choice = SpecialEdgeChoice::least(&a2);
    assert!(verify_mu_inverse(&a2, &choice, 0).unwrap());
    assert!(matches!(verify_mu_inverse(&a2, &choice, 1), Err(Error::Sink(v)) if v == "2"));
    for s in samples::all() {
        let ctx = sample_ctx(&s);
        let choice = SpecialEdgeChoice::least(&ctx);
        for v in ctx.quiver().emitters() {
            assert!(verify_mu_inverse(&ctx, &choice, v).unwrap(), "{} at {v}", s.name);
        }
    }
}

#[test]
fn quotient_map_examples() {
    let ctx = sample_ctx(&samples::toeplitz());
    let h = ctx.quiver().vertex_set_from_ids(&["2"]).unwrap();
    let f = LpaElement::parse(&ctx, "f").unwrap();
    assert_eq!(f.quotient_map(h).unwrap().to_string(), "1 * f");
    assert!(LpaElement::parse(&ctx, "e").unwrap().quotient_map(h).unwrap().is_zero());
    assert!(LpaElement::vertex(&ctx, 1).quotient_map(h).unwrap().is_zero());
    let x = LpaElement::parse(&ctx, "@1 + e.~e").unwrap();
    assert_eq!(x.quotient_map(h).unwrap().to_string(), "1 * @1");
    let not_saturated = unmixed(&["1", "2"], &[("a", "1", "2")], f2());
    let h = not_saturated.quiver().vertex_set_from_ids(&["2"]).unwrap();
    assert!(LpaElement::one(&not_saturated).quotient_map(h).is_err());
}

#[test]
fn special_edges_respect_levels() {
    let ctx = sample_ctx(&samples::toeplitz_swapped());
    let q = ctx.quiver();
    // `e` is declared first but ends one level up from its source.
    assert_eq!(SpecialEdgeChoice::least(&ctx).get(0), q.edge_by_id("f"));
    assert!(matches!(SpecialEdgeChoice::from_pairs(&ctx, &[("1", "e")]), Err(Error::InvalidChoice(_))));
    assert!(matches!(SpecialEdgeChoice::from_pairs(&ctx, &[("2", "e")]), Err(Error::InvalidChoice(_))));
    assert!(SpecialEdgeChoice::from_pairs(&ctx, &[("1", "f")]).is_ok());
    // With `e` special, t1·e·~e would rewrite to t1·@1, which is illegal.
    let x = LpaElement::parse(&ctx, "t1 * e.~e").unwrap();
    let reduced = x.reduce(&SpecialEdgeChoice::least(&ctx));
    assert_eq!(reduced, x);
    assert!(LpaElement::parse(&ctx, "t1 * @1").is_err());
}

#[test]
fn text_format() {
    let ctx = sample_ctx(&samples::toeplitz());
    let x = LpaElement::parse(&ctx, "(w + 1) * e.~e + f.f.~f + ~f + @2").unwrap();
    assert_eq!(x.to_string(), "1 * ~f + 1 * @2 + (w + 1) * e.~e + 1 * f.f.~f");
    assert_eq!(LpaElement::parse(&ctx, &x.to_string()).unwrap(), x);
    assert!(LpaElement::parse(&ctx, "~e.f").unwrap().is_zero());
    assert!(LpaElement::parse(&ctx, "w * f").is_err());
    assert_eq!(LpaElement::zero(&ctx).to_string(), "0");
}

/// Seeded trials over every sample.
fn for_each_sample(trials: usize, mut body: impl FnMut(&Ctx, &SpecialEdgeChoice, &mut ChaCha8Rng)) {
    for (k, s) in samples::all().into_iter().enumerate() {
        let ctx = sample_ctx(&s);
        let choice = SpecialEdgeChoice::least(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        for _ in 0..trials {
            body(&ctx, &choice, &mut rng);
        }
    }
}

#[test]
fn rewriting_is_confluent() {
    for_each_sample(1000, |ctx, choice, rng| {
        let x = random_lpa(ctx, rng, 3, 5);
        let nf = x.reduce(choice);
        assert!(nf.is_normal(choice));
        assert_eq!(x.reduce_random(choice, rng), nf);
    });
}

#[test]
fn reduce_is_idempotent_and_products_associate() {
    for_each_sample(100, |ctx, choice, rng| {
        let a = random_lpa(ctx, rng, 2, 3).reduce(choice);
        let b = random_lpa(ctx, rng, 2, 3).reduce(choice);
        let c = random_lpa(ctx, rng, 2, 3).reduce(choice);
        assert_eq!(a.reduce(choice), a);
        let left = a.mul(&b).unwrap().reduce(choice).mul(&c).unwrap().reduce(choice);
        let right = a.mul(&b.mul(&c).unwrap().reduce(choice)).unwrap().reduce(choice);
        assert_eq!(left, right);
    });
}

#[test]
fn levels_survive_products_and_rewriting() {
    for_each_sample(200, |ctx, choice, rng| {
        let a = random_lpa(ctx, rng, 3, 4);
        let b = random_lpa(ctx, rng, 3, 4);
        let ab = a.mul(&b).unwrap();
        assert!(ab.is_valid());
        assert!(ab.reduce(choice).is_valid());
        assert!(ab.reduce_random(choice, rng).is_valid());
    });
}

#[test]
fn quotient_map_is_a_homomorphism() {
    for (k, s) in samples::all().into_iter().enumerate() {
        let ctx = sample_ctx(&s);
        let choice = SpecialEdgeChoice::least(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
        for &h in &ctx.quiver().enumerate_lattice().sets {
            let (qctx, _) = ctx.quotient(h).unwrap();
            let qchoice = SpecialEdgeChoice::least(&qctx);
            assert!(check_relations(&qctx, &qchoice).iter().all(|c| c.holds), "{} / {h:?}", s.name);
            for _ in 0..30 {
                let a = random_lpa(&ctx, &mut rng, 2, 4);
                let b = random_lpa(&ctx, &mut rng, 2, 4);
                let phi = |x: &LpaElement| x.quotient_map(h).unwrap();
                assert_eq!(phi(&a.mul(&b).unwrap()), phi(&a).mul(&phi(&b)).unwrap());
                assert_eq!(phi(&a.reduce(&choice)).reduce(&qchoice), phi(&a).reduce(&qchoice));
            }
        }
    }
}

#[test]
fn graded_dimension_does_not_depend_on_the_choice() {
    for s in samples::all() {
        let ctx = sample_ctx(&s);
        let choices = SpecialEdgeChoice::all(&ctx);
        for n in 0..=3 {
            // Normal monomials counted per midpoint level.
            let per_level = |c: &SpecialEdgeChoice| {
                let mut counts = vec![0usize; ctx.tower().level_count()];
                for m in normal_monomials(&ctx, c, n) {
                    counts[ctx.lev(m.midpoint(ctx.quiver()))] += 1;
                }
                counts
            };
            let dims: Vec<Vec<usize>> = choices.iter().map(per_level).collect();
            if ctx.tower().is_finite_field() {
                let d = normal_dimension(&ctx, &choices[0], n).unwrap();
                assert!(choices.iter().all(|c| normal_dimension(&ctx, c, n).unwrap() == d));
            }
            assert!(dims.windows(2).all(|w| w[0] == w[1]), "{} n={n}: {dims:?}", s.name);
        }
    }
}

// Acyclic quivers over F_2: the algebra acts faithfully on the span of
// paths ending in sinks, `αβ̄ · γ = αγ'` when `γ = βγ'`.

struct SinkModule {
    basis: Vec<Path>,
}

impl SinkModule {
    fn new(q: &Quiver) -> Self {
        let basis = q.paths_up_to(q.vertex_count()).into_iter().filter(|p| q.is_sink(q.path_dst(p))).collect();
        SinkModule { basis }
    }

    fn matrix(&self, a: &LpaElement) -> Vec<u32> {
        let q = a.ctx().quiver();
        let n = self.basis.len();
        let mut m = vec![0u32; n * n];
        for (mono, c) in a.terms() {
            let c = c.prime_coordinates().unwrap()[0];
            for (j, g) in self.basis.iter().enumerate() {
                let Some(rest) = g.strip_prefix(&mono.ghost, q) else { continue };
                let image = q.concat(&mono.real, &rest).unwrap();
                let i = self.basis.iter().position(|b| *b == image).unwrap();
                m[i * n + j] = (m[i * n + j] + c) % 2;
            }
        }
        m
    }
}

fn acyclic_contexts() -> Vec<Ctx> {
    vec![
        unmixed(&["1", "2"], &[], f2()),
        unmixed(&["1", "2"], &[("a", "1", "2")], f2()),
        unmixed(&["1", "2", "3"], &[("a", "1", "2"), ("b", "2", "3")], f2()),
        unmixed(&["1", "2"], &[("a", "1", "2"), ("b", "1", "2")], f2()),
        unmixed(&["1", "2", "3", "4"], &[("a", "1", "2"), ("b", "1", "3"), ("c", "2", "4"), ("d", "3", "4")], f2()),
        unmixed(&["1", "2", "3"], &[("a", "1", "2"), ("b", "1", "3"), ("c", "2", "3"), ("d", "2", "3")], f2()),
    ]
}

#[test]
fn normal_monomials_match_representation_rank() {
    for ctx in acyclic_contexts() {
        let q = ctx.quiver();
        let module = SinkModule::new(q);
        let choice = SpecialEdgeChoice::least(&ctx);
        for n in 0..=3 {
            let paths = q.paths_up_to(n);
            let mut rows = Vec::new();
            for a in &paths {
                for b in paths.iter().filter(|b| q.path_dst(b) == q.path_dst(a)) {
                    let m = LpaMonomial::new(q, a.clone(), b.clone()).unwrap();
                    rows.push(module.matrix(&LpaElement::monomial(&ctx, m)));
                }
            }
            let expected = normal_monomials(&ctx, &choice, n).len();
            assert_eq!(rank_mod_p(rows, 2), expected, "{:?} n={n}", q.vertex_ids());
            // Normal monomials are themselves independent.
            let normal_rows = normal_monomials(&ctx, &choice, n)
                .into_iter()
                .map(|m| module.matrix(&LpaElement::monomial(&ctx, m)))
                .collect();
            assert_eq!(rank_mod_p(normal_rows, 2), expected);
        }
    }
}

#[test]
fn reduction_preserves_the_representation() {
    for (k, ctx) in acyclic_contexts().into_iter().enumerate() {
        let module = SinkModule::new(ctx.quiver());
        let mut rng = ChaCha8Rng::seed_from_u64(7 + k as u64);
        for choice in SpecialEdgeChoice::all(&ctx) {
            for _ in 0..50 {
                let x = random_lpa(&ctx, &mut rng, 2, 5);
                assert_eq!(module.matrix(&x), module.matrix(&x.reduce(&choice)));
            }
        }
    }
}

#[test]
fn path_algebra_embeds() {
    let s = samples::toeplitz();
    let ctx = sample_ctx(&s);
    let a = MpaElement::parse(&ctx, "w * e + f.f").unwrap();
    let b = MpaElement::parse(&ctx, "f + @2").unwrap();
    let la = LpaElement::from_mpa(&a);
    let lb = LpaElement::from_mpa(&b);
    assert_eq!(LpaElement::from_mpa(&a.mul(&b).unwrap()), la.mul(&lb).unwrap());
    assert_eq!(la.to_string(), "w * e + 1 * f.f");
}

#[test]
fn chains_can_start_empty() {
    let s = samples::chain3();
    assert_eq!(s.chain.sets()[0], crate::quiver::VertexSet::empty());
    let ctx = sample_ctx(&s);
    assert!(ctx.levels().levels().iter().all(|&l| l == 0));
    let _ = HereditaryChain::trivial(ctx.quiver());
}
