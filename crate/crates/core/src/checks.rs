//! Named property checks over one context, shared by the corpus runner,
//! the command line and the acceptance suite.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::Ctx;
use crate::error::{Error, Result};
use crate::leavitt::{check_relations, ck2_sum, verify_mu_inverse, LpaElement, SpecialEdgeChoice};
use crate::monoid;
use crate::mpa::{MpaElement, RecursionOracle};
use crate::quiver::{Path, Quiver, VertexSet};
use crate::random::{random_lpa, random_mpa};
use crate::series::{check_derivation_law, left_transduction_witnesses, mixed_closure_probe, LinearRep, Side, TruncatedSeries};
use crate::structure::ChainReindex;
use crate::tower::TowerElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Relations,
    Confluence,
    Levels,
    Oracle,
    SeriesIdentities,
    Derivation,
    Transduction,
    IdealLattice,
    QuotientHomomorphism,
    Reindex,
    MuInverse,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Relations,
        Check::Confluence,
        Check::Levels,
        Check::Oracle,
        Check::SeriesIdentities,
        Check::Derivation,
        Check::Transduction,
        Check::IdealLattice,
        Check::QuotientHomomorphism,
        Check::Reindex,
        Check::MuInverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Relations => "relations",
            Check::Confluence => "confluence",
            Check::Levels => "levels",
            Check::Oracle => "oracle",
            Check::SeriesIdentities => "series-identities",
            Check::Derivation => "derivation",
            Check::Transduction => "transduction",
            Check::IdealLattice => "ideal-lattice",
            Check::QuotientHomomorphism => "quotient-homomorphism",
            Check::Reindex => "reindex",
            Check::MuInverse => "mu-inverse",
        }
    }

    pub fn from_name(name: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Random trials used when none are requested.
    pub fn default_trials(self) -> usize {
        match self {
            Check::Confluence => 1000,
            Check::Levels | Check::Derivation => 500,
            Check::Reindex => 200,
            Check::QuotientHomomorphism | Check::Transduction | Check::Oracle => 50,
            _ => 0,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Fail,
    WitnessFound,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    /// Series truncation order.
    pub order: usize,
    /// Coordinate-sum bound for monoid searches; `12·|E⁰|` when absent.
    pub bound: Option<u64>,
    pub seed: u64,
    /// Overrides every check's default trial count.
    pub trials: Option<usize>,
    /// Longest path enumerated by the oracle check.
    pub oracle_len: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { order: 6, bound: None, seed: 0, trials: None, oracle_len: 4 }
    }
}

impl Settings {
    fn trials(&self, c: Check) -> usize {
        self.trials.unwrap_or_else(|| c.default_trials())
    }

    fn rng(&self, c: Check) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (c as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

/// A context with its special edges and linear representations.
#[derive(Debug, Clone)]
pub struct Subject {
    pub ctx: Ctx,
    pub choice: SpecialEdgeChoice,
    pub reps: Vec<LinearRep>,
}

impl Subject {
    pub fn new(ctx: Ctx) -> Self {
        let choice = SpecialEdgeChoice::least(&ctx);
        Subject { ctx, choice, reps: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: Check,
    pub outcome: Outcome,
    /// Number of instances examined.
    pub instances: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub detail: Vec<String>,
}

const MAX_DETAIL: usize = 5;

/// Accumulates instances and the first few failures.
struct Tally {
    instances: usize,
    failures: usize,
    detail: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { instances: 0, failures: 0, detail: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            if self.detail.len() < MAX_DETAIL {
                self.detail.push(what());
            }
        }
    }

    fn finish(self, check: Check) -> CheckReport {
        let outcome = if self.failures == 0 { Outcome::Pass } else { Outcome::Fail };
        let mut detail = self.detail;
        if self.failures > detail.len() {
            detail.push(format!("{} failures in total", self.failures));
        }
        CheckReport { check, outcome, instances: self.instances, detail }
    }
}

pub fn run_check(subject: &Subject, check: Check, settings: &Settings) -> CheckReport {
    let result = match check {
        Check::Relations => relations(subject),
        Check::Confluence => confluence(subject, settings),
        Check::Levels => levels(subject, settings),
        Check::Oracle => oracle(subject, settings),
        Check::SeriesIdentities => series_identities(subject, settings),
        Check::Derivation => derivation(subject, settings),
        Check::Transduction => transduction(subject, settings),
        Check::IdealLattice => ideal_lattice(subject, settings),
        Check::QuotientHomomorphism => quotient_homomorphism(subject, settings),
        Check::Reindex => reindex(subject, settings),
        Check::MuInverse => mu_inverse(subject),
    };
    match result {
        Ok(report) => report,
        Err(Error::NeedsFiniteField) => CheckReport {
            check,
            outcome: Outcome::Inconclusive,
            instances: 0,
            detail: vec!["needs a finite-field tower".into()],
        },
        Err(e) => CheckReport { check, outcome: Outcome::Fail, instances: 0, detail: vec![e.to_string()] },
    }
}

fn relations(s: &Subject) -> Result<CheckReport> {
    let mut t = Tally::new();
    for c in check_relations(&s.ctx, &s.choice) {
        t.record(c.holds, || format!("{}: {}", c.relation, c.instance));
    }
    Ok(t.finish(Check::Relations))
}

fn confluence(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let mut rng = settings.rng(Check::Confluence);
    let mut t = Tally::new();
    for _ in 0..settings.trials(Check::Confluence) {
        let x = random_lpa(&s.ctx, &mut rng, 3, 5);
        let nf = x.reduce(&s.choice);
        let other = x.reduce_random(&s.choice, &mut rng);
        t.record(nf.is_normal(&s.choice) && other == nf, || format!("{x}: {nf} vs {other}"));
    }
    Ok(t.finish(Check::Confluence))
}

fn levels(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let mut rng = settings.rng(Check::Levels);
    let mut t = Tally::new();
    for _ in 0..settings.trials(Check::Levels) {
        let (a, b) = (random_mpa(&s.ctx, &mut rng, 3, 4), random_mpa(&s.ctx, &mut rng, 3, 4));
        let (sum, prod) = (a.add(&b)?, a.mul(&b)?);
        t.record(sum.is_valid() && prod.is_valid(), || format!("path algebra: ({a}) * ({b})"));
        let (x, y) = (random_lpa(&s.ctx, &mut rng, 3, 4), random_lpa(&s.ctx, &mut rng, 3, 4));
        let xy = x.mul(&y)?;
        let ok = x.add(&y)?.is_valid()
            && xy.is_valid()
            && xy.reduce(&s.choice).is_valid()
            && xy.reduce_random(&s.choice, &mut rng).is_valid();
        t.record(ok, || format!("Leavitt: ({x}) * ({y})"));
    }
    Ok(t.finish(Check::Levels))
}

/// Every single-term candidate `c·α` with `|α| ≤ oracle_len` and `c` in the
/// top field, plus random multi-term candidates: the level description
/// accepts exactly what the recursive construction spans.
fn oracle(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let ctx = &s.ctx;
    let oracle = RecursionOracle::new(ctx, settings.oracle_len)?;
    let scalars = ctx.tower().enumerate_level(ctx.tower().top())?;
    let paths = ctx.quiver().paths_up_to(settings.oracle_len);
    let q = ctx.quiver();
    let mut t = Tally::new();
    for p in &paths {
        for c in &scalars {
            let accepted = MpaElement::make(ctx, [(p.clone(), c.clone())]).is_ok();
            t.record(accepted == oracle.contains(p, c), || format!("{c} * {}", q.format_path(p)));
        }
    }
    let mut rng = settings.rng(Check::Oracle);
    for _ in 0..settings.trials(Check::Oracle) {
        let n = rng.gen_range(1..=3);
        let mut terms: Vec<(Path, TowerElement)> = Vec::new();
        for _ in 0..n {
            let p = paths[rng.gen_range(0..paths.len())].clone();
            let c = scalars[rng.gen_range(0..scalars.len())].clone();
            match terms.iter_mut().find(|(q, _)| *q == p) {
                Some(slot) => slot.1 = &slot.1 + &c,
                None => terms.push((p, c)),
            }
        }
        let accepted = MpaElement::make(ctx, terms.clone()).is_ok();
        let expected = terms.iter().all(|(p, c)| oracle.contains(p, c));
        t.record(accepted == expected, || {
            terms.iter().map(|(p, c)| format!("{c} * {}", q.format_path(p))).collect::<Vec<_>>().join(" + ")
        });
    }
    Ok(t.finish(Check::Oracle))
}

fn hereditary_sets(q: &Quiver) -> Vec<VertexSet> {
    (0..1u64 << q.vertex_count()).map(VertexSet::from_bits).filter(|&h| q.is_hereditary(h)).collect()
}

fn series_identities(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    if s.reps.is_empty() {
        return Ok(CheckReport {
            check: Check::SeriesIdentities,
            outcome: Outcome::Inconclusive,
            instances: 0,
            detail: vec!["no linear representations".into()],
        });
    }
    let q = s.ctx.quiver();
    let mut t = Tally::new();
    for (k, rep) in s.reps.iter().enumerate() {
        for h in hereditary_sets(q) {
            let ids = || q.set_ids(h).join(",");
            // split_b itself fails when B₂B₁ ≠ 0.
            t.record(rep.split_b(h).is_ok(), || format!("rep {k}, H = {{{}}}: B2 B1 != 0", ids()));
            for n in 2..=settings.order.max(2) {
                t.record(rep.check_binverse_identity(h, n)?, || format!("rep {k}, H = {{{}}}, N = {n}: factorization", ids()));
                t.record(rep.check_corner_formula(h, n)?, || format!("rep {k}, H = {{{}}}, N = {n}: corner", ids()));
            }
        }
    }
    Ok(t.finish(Check::SeriesIdentities))
}

fn derivation(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let mut rng = settings.rng(Check::Derivation);
    let order = settings.order;
    let mut t = Tally::new();
    for e in 0..s.ctx.quiver().edge_count() {
        for _ in 0..settings.trials(Check::Derivation) {
            let r = TruncatedSeries::from_mpa(&random_mpa(&s.ctx, &mut rng, 3, 4), order);
            let x = TruncatedSeries::from_mpa(&random_mpa(&s.ctx, &mut rng, 3, 4), order);
            t.record(check_derivation_law(&r, &x, e)?, || format!("edge {}: r = {r}, s = {x}", s.ctx.quiver().edge(e).id));
        }
    }
    Ok(t.finish(Check::Derivation))
}

/// Right transductions keep random series valid (failure otherwise); a
/// left transduction leaving the algebra is reported as a witness.
fn transduction(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let mut rng = settings.rng(Check::Transduction);
    let q = s.ctx.quiver();
    let mut t = Tally::new();
    for e in 0..q.edge_count() {
        for _ in 0..settings.trials(Check::Transduction) {
            let x = TruncatedSeries::from_mpa(&random_mpa(&s.ctx, &mut rng, 4, 5), settings.order);
            let report = mixed_closure_probe(&x, e, Side::Right);
            t.record(report.output_valid, || format!("right transduction by {} of {x}", q.edge(e).id));
        }
    }
    let witnesses = left_transduction_witnesses(&s.ctx, 3)?;
    let mut report = t.finish(Check::Transduction);
    if report.outcome == Outcome::Pass {
        if let Some((x, e, probe)) = witnesses.first() {
            report.outcome = Outcome::WitnessFound;
            let (path, coeff, level) = probe.witness.clone().expect("invalid output has a witness");
            report.detail.push(format!(
                "left transduction by {} of {x} leaves {coeff} at {path}, allowed level {level}",
                q.edge(*e).id
            ));
        }
    }
    Ok(report)
}

fn ideal_lattice(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let q = s.ctx.quiver();
    let report = monoid::order_ideal_lattice(q, settings.bound.unwrap_or_else(|| monoid::default_bound(q)))?;
    let outcome = if report.passed() {
        Outcome::Pass
    } else if report.bijective && report.inclusion_preserving && report.closure_agrees {
        Outcome::Inconclusive
    } else {
        Outcome::Fail
    };
    let mut detail = vec![format!("{} order ideals, {} hereditary saturated sets", report.ideals.len(), report.hereditary_saturated.len())];
    detail.extend(report.inconclusive.iter().take(MAX_DETAIL).map(|s| format!("unresolved: {{{}}}", s.join(","))));
    Ok(CheckReport { check: Check::IdealLattice, outcome, instances: report.hereditary_saturated.len(), detail })
}

/// The unreduced two sides of every defining relation.
fn relation_pairs(ctx: &Ctx) -> Result<Vec<(String, LpaElement, LpaElement)>> {
    let q = ctx.quiver();
    let p = |v| LpaElement::vertex(ctx, v);
    let e = |i| LpaElement::edge(ctx, i);
    let g = |i| LpaElement::ghost(ctx, i);
    let mut out = Vec::new();
    for v in 0..q.vertex_count() {
        for w in 0..q.vertex_count() {
            out.push((format!("V {v} {w}"), p(v).mul(&p(w))?, if v == w { p(v) } else { LpaElement::zero(ctx) }));
        }
    }
    for i in 0..q.edge_count() {
        let id = &q.edge(i).id;
        out.push((format!("E1 {id}"), p(q.src(i)).mul(&e(i))?.mul(&p(q.dst(i)))?, e(i)));
        out.push((format!("E2 {id}"), p(q.dst(i)).mul(&g(i))?.mul(&p(q.src(i)))?, g(i)));
        for j in 0..q.edge_count() {
            let rhs = if i == j { p(q.dst(i)) } else { LpaElement::zero(ctx) };
            out.push((format!("CK1 {id} {}", q.edge(j).id), g(i).mul(&e(j))?, rhs));
        }
    }
    for v in q.emitters() {
        out.push((format!("CK2 {}", q.vertex_id(v)), ck2_sum(ctx, v), p(v)));
    }
    Ok(out)
}

fn quotient_homomorphism(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let ctx = &s.ctx;
    let q = ctx.quiver();
    let mut rng = settings.rng(Check::QuotientHomomorphism);
    let relations = relation_pairs(ctx)?;
    let mut t = Tally::new();
    for &h in &q.enumerate_lattice().sets {
        let hs = || q.set_ids(h).join(",");
        let (qctx, _) = ctx.quotient(h)?;
        let qchoice = SpecialEdgeChoice::least(&qctx);
        for c in check_relations(&qctx, &qchoice) {
            t.record(c.holds, || format!("E/{{{}}}: {} {}", hs(), c.relation, c.instance));
        }
        for (name, lhs, rhs) in &relations {
            let ok = lhs.quotient_map(h)?.reduce(&qchoice) == rhs.quotient_map(h)?.reduce(&qchoice);
            t.record(ok, || format!("E/{{{}}}: image of {name}", hs()));
        }
        for _ in 0..settings.trials(Check::QuotientHomomorphism) {
            let a = random_lpa(ctx, &mut rng, 2, 4);
            let b = random_lpa(ctx, &mut rng, 2, 4);
            let product = a.mul(&b)?.quotient_map(h)? == a.quotient_map(h)?.mul(&b.quotient_map(h)?)?;
            let reduce = a.reduce(&s.choice).quotient_map(h)?.reduce(&qchoice) == a.quotient_map(h)?.reduce(&qchoice);
            t.record(product && reduce, || format!("E/{{{}}}: a = {a}, b = {b}", hs()));
        }
    }
    Ok(t.finish(Check::QuotientHomomorphism))
}

/// Cut composition and multiplicativity, corner multiplicativity and
/// compatibility with rewriting, with all images valid in their targets.
fn reindex(s: &Subject, settings: &Settings) -> Result<CheckReport> {
    let ctx = &s.ctx;
    let Some(chain) = ctx.chain() else {
        return Err(Error::InvalidChain("re-indexing needs a strict chain".into()));
    };
    let r = chain.length();
    let cuts = (1..=r).map(|i| ChainReindex::cut(ctx, i)).collect::<Result<Vec<_>>>()?;
    let corners = (0..=r).map(|i| ChainReindex::corner(ctx, i)).collect::<Result<Vec<_>>>()?;
    let mut rng = settings.rng(Check::Reindex);
    let mut t = Tally::new();
    for _ in 0..settings.trials(Check::Reindex) {
        let (a, b) = (random_mpa(ctx, &mut rng, 3, 4), random_mpa(ctx, &mut rng, 3, 4));
        let (x, y) = (random_lpa(ctx, &mut rng, 2, 4), random_lpa(ctx, &mut rng, 2, 4));
        let ab = a.mul(&b)?;
        let xy = x.mul(&y)?;
        for (idx, cut) in cuts.iter().enumerate() {
            let i = idx + 1;
            let (ca, cx) = (cut.apply_mpa(&a)?, cut.apply_lpa(&x)?);
            let hom = cut.apply_mpa(&ab)? == ca.mul(&cut.apply_mpa(&b)?)?
                && cut.apply_lpa(&xy)? == cx.mul(&cut.apply_lpa(&y)?)?;
            t.record(hom && ca.is_valid() && cx.is_valid(), || format!("cut {i} on ({a}, {b}), ({x}, {y})"));
            for k in 1..=r - i {
                let again = ChainReindex::cut(&cut.target, k)?;
                let composed = again.apply_mpa(&ca)? == cuts[i + k - 1].apply_mpa(&a)?
                    && again.apply_lpa(&cx)? == cuts[i + k - 1].apply_lpa(&x)?;
                t.record(composed, || format!("cut {k} after cut {i} on {a}, {x}"));
            }
        }
        for (i, corner) in corners.iter().enumerate() {
            let p_h = MpaElement::vertex_sum(ctx, corner.set());
            let lp_h = LpaElement::vertex_sum(ctx, corner.set());
            let target_choice = SpecialEdgeChoice::least(&corner.target);
            let (ca, cx) = (corner.apply_mpa(&a)?, corner.apply_lpa(&x)?);
            let mult = ca.mul(&corner.apply_mpa(&b)?)? == corner.apply_mpa(&a.mul(&p_h)?.mul(&b)?)?
                && cx.mul(&corner.apply_lpa(&y)?)? == corner.apply_lpa(&x.mul(&lp_h)?.mul(&y)?)?;
            let rewriting = corner.apply_lpa(&x.reduce(&s.choice))? == cx.reduce(&target_choice);
            t.record(mult && rewriting && ca.is_valid() && cx.is_valid(), || format!("corner {i} on ({a}, {b}), ({x}, {y})"));
        }
    }
    Ok(t.finish(Check::Reindex))
}

fn mu_inverse(s: &Subject) -> Result<CheckReport> {
    let q = s.ctx.quiver();
    let mut t = Tally::new();
    for v in q.emitters() {
        t.record(verify_mu_inverse(&s.ctx, &s.choice, v)?, || format!("vertex {}", q.vertex_id(v)));
    }
    Ok(t.finish(Check::MuInverse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn subject(s: &samples::Sample) -> Subject {
        let ctx = s.ctx().unwrap();
        let reps = s.reps.iter().map(|f| LinearRep::from_file(&ctx, f).unwrap()).collect();
        Subject { reps, ..Subject::new(ctx) }
    }

    #[test]
    fn names_roundtrip() {
        for c in Check::ALL {
            assert_eq!(Check::from_name(c.name()), Some(c));
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.name()));
        }
        assert_eq!(serde_json::to_string(&Outcome::WitnessFound).unwrap(), "\"witness-found\"");
    }

    #[test]
    fn quick_pass_on_toeplitz() {
        let s = subject(&samples::toeplitz());
        let settings = Settings { order: 3, trials: Some(5), ..Settings::default() };
        for c in Check::ALL {
            let r = run_check(&s, c, &settings);
            let expected = if c == Check::Transduction { Outcome::WitnessFound } else { Outcome::Pass };
            assert_eq!(r.outcome, expected, "{c}: {:?}", r.detail);
        }
    }

    #[test]
    fn oracle_needs_finite_field() {
        let s = subject(&samples::chain3());
        let r = run_check(&s, Check::Oracle, &Settings::default());
        assert_eq!(r.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn broken_choice_is_caught() {
        // A special edge at a sink-free vertex is mandatory; dropping it
        // leaves CK2 unreduced.
        let mut s = subject(&samples::a2());
        s.choice = SpecialEdgeChoice::least(&samples::edgeless().ctx().unwrap());
        let r = run_check(&s, Check::Relations, &Settings::default());
        assert_eq!(r.outcome, Outcome::Fail);
        assert!(!r.detail.is_empty());
    }
}
