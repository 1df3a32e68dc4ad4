//! Mixed Leavitt path algebras.
//!
//! Elements are combinations of monomials `αβ̄` with `r(α) = r(β)`; the
//! coefficient of `αβ̄` lies in `K_{lev(r(α))}`. Products contract `β̄γ`
//! with (CK1) as they are formed, so the only remaining rewrite is
//! (CK2) at the midpoint:
//!
//! ```text
//! α' e_v ē_v β̄'  →  α' β̄' − Σ_{e ≠ e_v, s(e) = v} α' e ē β̄'
//! ```
//!
//! where `e_v` is the special edge of the emitter `v`.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::context::{Ctx, MixedContext};
use crate::error::{Error, Result};
use crate::mpa::MpaElement;
use crate::quiver::{Path, Quiver, VertexSet};
use crate::text::{self, Letter};
use crate::tower::TowerElement;

/// `α β̄`, with `r(α) = r(β)`. Ordered by `α`, then `β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LpaMonomial {
    pub real: Path,
    pub ghost: Path,
}

impl LpaMonomial {
    pub fn new(q: &Quiver, real: Path, ghost: Path) -> Result<Self> {
        if q.path_dst(&real) != q.path_dst(&ghost) {
            return Err(Error::NotComposable(format!("{} and {} end at different vertices", q.format_path(&real), q.format_path(&ghost))));
        }
        Ok(LpaMonomial { real, ghost })
    }

    pub fn vertex(v: usize) -> Self {
        LpaMonomial { real: Path::trivial(v), ghost: Path::trivial(v) }
    }

    /// `r(α) = r(β)`.
    pub fn midpoint(&self, q: &Quiver) -> usize {
        q.path_dst(&self.real)
    }

    pub fn len(&self) -> usize {
        self.real.len() + self.ghost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (CK1) contraction of `(αβ̄)(γδ̄)`.
    pub fn mul(&self, o: &Self, q: &Quiver) -> Option<Self> {
        if let Some(rest) = o.real.strip_prefix(&self.ghost, q) {
            let real = q.concat(&self.real, &rest)?;
            return Some(LpaMonomial { real, ghost: o.ghost.clone() });
        }
        let rest = self.ghost.strip_prefix(&o.real, q)?;
        let ghost = q.concat(&o.ghost, &rest)?;
        Some(LpaMonomial { real: self.real.clone(), ghost })
    }

    pub fn format(&self, q: &Quiver) -> String {
        if self.real.is_trivial() && self.ghost.is_trivial() {
            return q.format_path(&self.real);
        }
        let mut letters: Vec<String> = self.real.edges().iter().map(|&e| q.edge(e).id.clone()).collect();
        letters.extend(self.ghost.edges().iter().rev().map(|&e| format!("~{}", q.edge(e).id)));
        letters.join(".")
    }
}

/// Special edge `e_v` of every emitter `v`, used to orient (CK2).
///
/// An admissible special edge has `lev(r(e_v)) = lev(v)`: rewriting
/// `e_v ē_v` moves its coefficient to the midpoint `v`, so a special edge
/// pointing to a higher level would break the level constraint.
/// Saturation of the chain guarantees every emitter has such an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialEdgeChoice {
    edges: Vec<Option<usize>>,
}

impl SpecialEdgeChoice {
    /// Admissible special edges at `v`, in declaration order.
    pub fn admissible(ctx: &MixedContext, v: usize) -> Vec<usize> {
        let q = ctx.quiver();
        q.out_edges(v).iter().copied().filter(|&e| ctx.lev(q.dst(e)) == ctx.lev(v)).collect()
    }

    /// The first admissible edge at every emitter.
    pub fn least(ctx: &MixedContext) -> Self {
        let q = ctx.quiver();
        let edges = (0..q.vertex_count())
            .map(|v| {
                if q.is_sink(v) {
                    None
                } else {
                    let first = Self::admissible(ctx, v).first().copied();
                    debug_assert!(first.is_some(), "saturated chains leave every emitter an admissible edge");
                    first
                }
            })
            .collect();
        SpecialEdgeChoice { edges }
    }

    /// Explicit `(vertex id, edge id)` pairs; emitters not mentioned get
    /// the least admissible edge.
    pub fn from_pairs<S: AsRef<str>>(ctx: &MixedContext, pairs: &[(S, S)]) -> Result<Self> {
        let q = ctx.quiver();
        let mut out = Self::least(ctx);
        for (v, e) in pairs {
            let (v, e) = (v.as_ref(), e.as_ref());
            let vi = q.vertex(v).ok_or_else(|| Error::InvalidChoice(format!("unknown vertex {v:?}")))?;
            let ei = q.edge_by_id(e).ok_or_else(|| Error::InvalidChoice(format!("unknown edge {e:?}")))?;
            if q.src(ei) != vi {
                return Err(Error::InvalidChoice(format!("edge {e} does not start at {v}")));
            }
            if ctx.lev(q.dst(ei)) != ctx.lev(vi) {
                return Err(Error::InvalidChoice(format!(
                    "edge {e} ends at level {} but {v} has level {}",
                    ctx.lev(q.dst(ei)),
                    ctx.lev(vi)
                )));
            }
            out.edges[vi] = Some(ei);
        }
        Ok(out)
    }

    /// Every admissible choice (the product over emitters).
    pub fn all(ctx: &MixedContext) -> Vec<Self> {
        let q = ctx.quiver();
        let mut out = vec![Self::least(ctx)];
        for v in q.emitters().collect::<Vec<_>>() {
            let options = Self::admissible(ctx, v);
            out = out
                .into_iter()
                .flat_map(|c| {
                    options.iter().map(move |&e| {
                        let mut c = c.clone();
                        c.edges[v] = Some(e);
                        c
                    })
                })
                .collect();
        }
        out
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.edges.get(v).copied().flatten()
    }

    /// `(vertex id, edge id)` for every emitter.
    pub fn pairs(&self, q: &Quiver) -> Vec<(String, String)> {
        (0..q.vertex_count())
            .filter_map(|v| self.get(v).map(|e| (q.vertex_id(v).to_string(), q.edge(e).id.clone())))
            .collect()
    }

    /// Is `m` of the form `α' e_v ē_v β̄'`?
    pub fn is_redex(&self, m: &LpaMonomial, q: &Quiver) -> bool {
        match (m.real.last_edge(), m.ghost.last_edge()) {
            (Some(a), Some(b)) => a == b && self.get(q.src(a)) == Some(a),
            _ => false,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct LpaElement {
    ctx: Ctx,
    terms: BTreeMap<LpaMonomial, TowerElement>,
}

impl LpaElement {
    pub fn zero(ctx: &Ctx) -> Self {
        LpaElement { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    /// Canonicalize `terms`, enforcing the midpoint level constraint.
    pub fn make(ctx: &Ctx, terms: impl IntoIterator<Item = (LpaMonomial, TowerElement)>) -> Result<Self> {
        let q = ctx.quiver();
        let mut out = Self::zero(ctx);
        for (m, c) in terms {
            if q.path_dst(&m.real) != q.path_dst(&m.ghost) {
                return Err(Error::NotComposable(m.format(q)));
            }
            ctx.check_level(m.midpoint(q), &c, || m.format(q))?;
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub(crate) fn unchecked(ctx: &Ctx, terms: impl IntoIterator<Item = (LpaMonomial, TowerElement)>) -> Self {
        let mut out = Self::zero(ctx);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn monomial(ctx: &Ctx, m: LpaMonomial) -> Self {
        Self::unchecked(ctx, [(m, ctx.tower().one())])
    }

    pub fn vertex(ctx: &Ctx, v: usize) -> Self {
        Self::monomial(ctx, LpaMonomial::vertex(v))
    }

    pub fn vertex_sum(ctx: &Ctx, h: VertexSet) -> Self {
        Self::unchecked(ctx, h.iter().map(|v| (LpaMonomial::vertex(v), ctx.tower().one())))
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::vertex_sum(ctx, ctx.quiver().all_vertices())
    }

    pub fn edge(ctx: &Ctx, e: usize) -> Self {
        let q = ctx.quiver();
        let real = q.path(&[e]).expect("single edge");
        Self::monomial(ctx, LpaMonomial { real, ghost: Path::trivial(q.dst(e)) })
    }

    /// `ē`.
    pub fn ghost(ctx: &Ctx, e: usize) -> Self {
        let q = ctx.quiver();
        let ghost = q.path(&[e]).expect("single edge");
        Self::monomial(ctx, LpaMonomial { real: Path::trivial(q.dst(e)), ghost })
    }

    /// The path algebra inside the Leavitt algebra: `α ↦ α p_{r(α)}`.
    pub fn from_mpa(a: &MpaElement) -> Self {
        let q = a.ctx().quiver();
        Self::unchecked(
            a.ctx(),
            a.terms().map(|(p, c)| (LpaMonomial { real: p.clone(), ghost: Path::trivial(q.path_dst(p)) }, c.clone())),
        )
    }

    fn add_term(&mut self, m: LpaMonomial, c: TowerElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LpaMonomial, &TowerElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &LpaMonomial) -> Option<&TowerElement> {
        self.terms.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        let q = self.ctx.quiver();
        self.terms.iter().all(|(m, c)| c.membership_at_level(self.ctx.lev(m.midpoint(q))))
    }

    pub fn is_normal(&self, choice: &SpecialEdgeChoice) -> bool {
        let q = self.ctx.quiver();
        !self.terms.keys().any(|m| choice.is_redex(m, q))
    }

    fn same_ctx(&self, o: &Self) -> Result<()> {
        if self.ctx == o.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same_ctx(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        LpaElement { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &TowerElement) -> Result<Self> {
        Self::make(&self.ctx, self.terms.iter().map(|(m, x)| (m.clone(), x * c)))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_ctx(o)?;
        let q = self.ctx.quiver();
        let mut out = Self::zero(&self.ctx);
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                if let Some(ab) = a.mul(b, q) {
                    out.add_term(ab, c * d);
                }
            }
        }
        Ok(out)
    }

    /// Normal form, rewriting the least reducible monomial first.
    pub fn reduce(&self, choice: &SpecialEdgeChoice) -> Self {
        self.reduce_by(choice, |_| 0)
    }

    /// Normal form, rewriting a randomly chosen reducible monomial at
    /// each step.
    pub fn reduce_random<R: Rng + ?Sized>(&self, choice: &SpecialEdgeChoice, rng: &mut R) -> Self {
        self.reduce_by(choice, |n| rng.gen_range(0..n))
    }

    fn reduce_by(&self, choice: &SpecialEdgeChoice, mut pick: impl FnMut(usize) -> usize) -> Self {
        let q = self.ctx.quiver();
        let mut cur = self.clone();
        loop {
            let redexes: Vec<&LpaMonomial> = cur.terms.keys().filter(|m| choice.is_redex(m, q)).collect();
            if redexes.is_empty() {
                return cur;
            }
            let m = redexes[pick(redexes.len())].clone();
            let c = cur.terms.remove(&m).expect("picked from the support");
            let special = m.real.last_edge().expect("redex has an edge");
            let alpha = m.real.strip_last().expect("redex has an edge");
            let beta = m.ghost.strip_last().expect("redex has an edge");
            for &e in q.out_edges(q.src(special)) {
                if e == special {
                    continue;
                }
                let one = q.path(&[e]).expect("edge");
                let real = q.concat(&alpha, &one).expect("e starts at the midpoint");
                let ghost = q.concat(&beta, &one).expect("e starts at the midpoint");
                cur.add_term(LpaMonomial { real, ghost }, -&c);
            }
            cur.add_term(LpaMonomial { real: alpha, ghost: beta }, c);
        }
    }

    /// Image in `L(E/H)`: monomials whose paths avoid `H` survive, the
    /// rest map to zero.
    pub fn quotient_map(&self, h: VertexSet) -> Result<Self> {
        let (qctx, sub) = self.ctx.quotient(h)?;
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            if let (Some(real), Some(ghost)) = (sub.map_path(&m.real), sub.map_path(&m.ghost)) {
                terms.push((LpaMonomial { real, ghost }, qctx.tower().retag(c)?));
            }
        }
        Self::make(&qctx, terms)
    }

    /// Parse the text format; each word is the product of its letters.
    pub fn parse(ctx: &Ctx, s: &str) -> Result<Self> {
        let q = ctx.quiver();
        let mut terms = Vec::new();
        for t in text::parse_terms(ctx.tower(), s)? {
            let mut word: Option<LpaMonomial> = None;
            let mut dead = false;
            for letter in &t.word {
                let m = match letter {
                    Letter::Vertex(v) => {
                        LpaMonomial::vertex(q.vertex(v).ok_or_else(|| Error::Parse(format!("unknown vertex {v:?}")))?)
                    }
                    Letter::Edge(e) | Letter::Ghost(e) => {
                        let ei = q.edge_by_id(e).ok_or_else(|| Error::Parse(format!("unknown edge {e:?}")))?;
                        let p = q.path(&[ei])?;
                        let end = Path::trivial(q.dst(ei));
                        if matches!(letter, Letter::Edge(_)) {
                            LpaMonomial { real: p, ghost: end }
                        } else {
                            LpaMonomial { real: end, ghost: p }
                        }
                    }
                };
                word = match word {
                    None => Some(m),
                    Some(w) => w.mul(&m, q),
                };
                if word.is_none() {
                    dead = true;
                    break;
                }
            }
            if let (false, Some(w)) = (dead, word) {
                terms.push((w, t.coeff));
            }
        }
        Self::make(ctx, terms)
    }
}

impl fmt::Display for LpaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.ctx.quiver();
        f.write_str(&text::format_terms(self.terms.iter().map(|(m, c)| (c, m.format(q)))))
    }
}

impl fmt::Debug for LpaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LpaElement({self})")
    }
}

/// Normal monomials `αβ̄` with `|α|, |β| ≤ n`.
pub fn normal_monomials(ctx: &MixedContext, choice: &SpecialEdgeChoice, n: usize) -> Vec<LpaMonomial> {
    let q = ctx.quiver();
    let paths = q.paths_up_to(n);
    let mut out = Vec::new();
    for a in &paths {
        for b in &paths {
            if q.path_dst(a) == q.path_dst(b) {
                let m = LpaMonomial { real: a.clone(), ghost: b.clone() };
                if !choice.is_redex(&m, q) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// `dim_{K_0}` of the span of the normal monomials with `|α|, |β| ≤ n`.
pub fn normal_dimension(ctx: &MixedContext, choice: &SpecialEdgeChoice, n: usize) -> Result<usize> {
    let q = ctx.quiver();
    normal_monomials(ctx, choice, n)
        .iter()
        .map(|m| ctx.tower().degree_over_base(ctx.lev(m.midpoint(q))))
        .sum()
}

/// One relation instance and whether it holds.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub instance: String,
    pub holds: bool,
}

/// (V), (E1), (E2), (CK1) and (CK2) for every vertex and edge.
pub fn check_relations(ctx: &Ctx, choice: &SpecialEdgeChoice) -> Vec<RelationCheck> {
    let q = ctx.quiver();
    let p = |v: usize| LpaElement::vertex(ctx, v);
    let e = |i: usize| LpaElement::edge(ctx, i);
    let g = |i: usize| LpaElement::ghost(ctx, i);
    let mul = |a: &LpaElement, b: &LpaElement| a.mul(b).expect("one context").reduce(choice);
    let vid = |v: usize| q.vertex_id(v).to_string();
    let eid = |i: usize| q.edge(i).id.clone();
    let mut out = Vec::new();
    let mut push = |relation, instance: String, holds| out.push(RelationCheck { relation, instance, holds });

    for v in 0..q.vertex_count() {
        for w in 0..q.vertex_count() {
            let expected = if v == w { p(v) } else { LpaElement::zero(ctx) };
            push("V", format!("p_{} p_{}", vid(v), vid(w)), mul(&p(v), &p(w)) == expected);
        }
    }
    for i in 0..q.edge_count() {
        let (s, r) = (q.src(i), q.dst(i));
        let holds = mul(&p(s), &e(i)) == e(i) && mul(&e(i), &p(r)) == e(i);
        push("E1", format!("p_{} {} = {} p_{} = {}", vid(s), eid(i), eid(i), vid(r), eid(i)), holds);
        let holds = mul(&p(r), &g(i)) == g(i) && mul(&g(i), &p(s)) == g(i);
        push("E2", format!("p_{} ~{} = ~{} p_{} = ~{}", vid(r), eid(i), eid(i), vid(s), eid(i)), holds);
    }
    for i in 0..q.edge_count() {
        for j in 0..q.edge_count() {
            let expected = if i == j { p(q.dst(i)) } else { LpaElement::zero(ctx) };
            push("CK1", format!("~{} {}", eid(i), eid(j)), mul(&g(i), &e(j)) == expected);
        }
    }
    for v in q.emitters() {
        let sum = ck2_sum(ctx, v);
        push("CK2", format!("sum over s^-1({}) of e ~e", vid(v)), sum.reduce(choice) == p(v));
    }
    out
}

/// `Σ_{s(e) = v} e ē`.
pub fn ck2_sum(ctx: &Ctx, v: usize) -> LpaElement {
    let q = ctx.quiver();
    let mut sum = LpaElement::zero(ctx);
    for &i in q.out_edges(v) {
        sum = sum.add(&LpaElement::edge(ctx, i).mul(&LpaElement::ghost(ctx, i)).expect("one context")).expect("one context");
    }
    sum
}

/// The map `r ↦ Σ x_i ē_i` inverts `μ_v: r ↦ (r e_1, …, r e_n)`:
/// `ē_i e_j = δ_{ij} p_{r(e_i)}` and `Σ e_i ē_i = p_v` after reduction.
pub fn verify_mu_inverse(ctx: &Ctx, choice: &SpecialEdgeChoice, v: usize) -> Result<bool> {
    let q = ctx.quiver();
    if q.is_sink(v) {
        return Err(Error::Sink(q.vertex_id(v).to_string()));
    }
    let out = q.out_edges(v);
    for &i in out {
        for &j in out {
            let prod = LpaElement::ghost(ctx, i).mul(&LpaElement::edge(ctx, j))?.reduce(choice);
            let expected = if i == j { LpaElement::vertex(ctx, q.dst(i)) } else { LpaElement::zero(ctx) };
            if prod != expected {
                return Ok(false);
            }
        }
    }
    Ok(ck2_sum(ctx, v).reduce(choice) == LpaElement::vertex(ctx, v))
}

#[cfg(test)]
mod tests;
