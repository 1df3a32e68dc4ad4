//! Seeded random elements for property checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::context::Ctx;
use crate::leavitt::{LpaElement, LpaMonomial};
use crate::mpa::MpaElement;
use crate::quiver::Path;

/// A valid element with up to `max_terms` terms on paths of length at
/// most `max_len`; each coefficient is drawn from the largest field the
/// level constraint allows.
pub fn random_mpa<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R, max_len: usize, max_terms: usize) -> MpaElement {
    let paths = ctx.quiver().paths_up_to(max_len);
    let n = rng.gen_range(0..=max_terms);
    let mut terms: Vec<(Path, _)> = Vec::new();
    for _ in 0..n {
        let Some(p) = paths.choose(rng).cloned() else { break };
        let c = ctx.tower().random_element(ctx.path_level(&p), rng);
        terms.push((p, c));
    }
    MpaElement::make(ctx, terms).expect("coefficients respect levels")
}

/// A valid Leavitt element built from monomials `αβ̄` with
/// `|α|, |β| ≤ max_len`.
pub fn random_lpa<R: Rng + ?Sized>(ctx: &Ctx, rng: &mut R, max_len: usize, max_terms: usize) -> LpaElement {
    let q = ctx.quiver();
    let paths = q.paths_up_to(max_len);
    let n = rng.gen_range(0..=max_terms);
    let mut terms = Vec::new();
    for _ in 0..n {
        let Some(a) = paths.choose(rng).cloned() else { break };
        let mid = q.path_dst(&a);
        let ends: Vec<&Path> = paths.iter().filter(|b| q.path_dst(b) == mid).collect();
        let b = (*ends.choose(rng).expect("the trivial path ends at the midpoint")).clone();
        let c = ctx.tower().random_element(ctx.lev(mid), rng);
        terms.push((LpaMonomial { real: a, ghost: b }, c));
    }
    LpaElement::make(ctx, terms).expect("coefficients respect levels")
}
