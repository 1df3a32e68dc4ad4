//! The graph monoid `M(E)`: generators `a_v`, relations
//! `a_v = Σ_{s(e) = v} a_{r(e)}` at every emitter.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quiver::{Quiver, VertexSet};

/// A vector of multiplicities indexed by vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonoidElement(pub Vec<u64>);

impl MonoidElement {
    pub fn zero(q: &Quiver) -> Self {
        MonoidElement(vec![0; q.vertex_count()])
    }

    pub fn generator(q: &Quiver, v: usize) -> Self {
        let mut x = Self::zero(q);
        x.0[v] = 1;
        x
    }

    /// `Σ_{v ∈ S} a_v`.
    pub fn indicator(q: &Quiver, s: VertexSet) -> Self {
        let mut x = Self::zero(q);
        for v in s.iter() {
            x.0[v] = 1;
        }
        x
    }

    pub fn size(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn support(&self) -> VertexSet {
        self.0.iter().enumerate().filter(|(_, &c)| c > 0).map(|(v, _)| v).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        MonoidElement(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: u64) -> Self {
        MonoidElement(self.0.iter().map(|a| a * k).collect())
    }

    /// `self − o`, if `o ≤ self` componentwise.
    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        self.0.iter().zip(&o.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(MonoidElement)
    }

    /// Parse `2 * @1 + @2` (or `0`).
    pub fn parse(q: &Quiver, text: &str) -> Result<Self> {
        let mut x = Self::zero(q);
        let text = text.trim();
        if text == "0" {
            return Ok(x);
        }
        for term in text.split('+') {
            let term = term.trim();
            let (k, v) = match term.split_once('*') {
                Some((k, v)) => {
                    let k = k.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad multiplicity in {term:?}")))?;
                    (k, v.trim())
                }
                None => (1, term),
            };
            let id = v.strip_prefix('@').ok_or_else(|| Error::Parse(format!("expected @vertex in {term:?}")))?;
            let v = q.vertex(id).ok_or_else(|| Error::Parse(format!("unknown vertex {id:?}")))?;
            x.0[v] += k;
        }
        Ok(x)
    }

    pub fn format(&self, q: &Quiver) -> String {
        let parts: Vec<String> =
            self.0.iter().enumerate().filter(|(_, &c)| c > 0).map(|(v, c)| format!("{c} * @{}", q.vertex_id(v))).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// One relation `a_v ~ Σ_{s(e)=v} a_{r(e)}` per emitter, as `(v, lhs, rhs)`.
pub fn relations(q: &Quiver) -> Vec<(usize, MonoidElement, MonoidElement)> {
    q.emitters()
        .map(|v| {
            let mut rhs = MonoidElement::zero(q);
            for &e in q.out_edges(v) {
                rhs.0[q.dst(e)] += 1;
            }
            (v, MonoidElement::generator(q, v), rhs)
        })
        .collect()
}

/// Normal form on an acyclic quiver: push every multiplicity forward along
/// the relations until only sinks remain. Also returns the vertices at
/// which a relation was applied, in order (each application replaces one
/// `a_v` by its right-hand side).
pub fn normal_form_with_trace(q: &Quiver, x: &MonoidElement) -> Result<(MonoidElement, Vec<usize>)> {
    let order = q.topological_order().ok_or(Error::CyclicQuiver)?;
    let rels = relations(q);
    let mut out = x.clone();
    let mut trace = Vec::new();
    for v in order {
        let Some((_, _, rhs)) = rels.iter().find(|(w, _, _)| *w == v) else { continue };
        let k = out.0[v];
        if k == 0 {
            continue;
        }
        out.0[v] = 0;
        out = out.add(&rhs.scale(k));
        trace.extend(std::iter::repeat_n(v, k as usize));
    }
    Ok((out, trace))
}

pub fn normal_form_acyclic(q: &Quiver, x: &MonoidElement) -> Result<MonoidElement> {
    normal_form_with_trace(q, x).map(|(nf, _)| nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

/// Default coordinate-sum bound for the congruence search.
pub fn default_bound(q: &Quiver) -> u64 {
    12 * q.vertex_count().max(1) as u64
}

/// Elements one relation application (either direction) away from `x`.
fn neighbours(rels: &[(usize, MonoidElement, MonoidElement)], x: &MonoidElement) -> Vec<MonoidElement> {
    let mut out = Vec::new();
    for (_, l, r) in rels {
        if let Some(rest) = x.checked_sub(l) {
            out.push(rest.add(r));
        }
        if let Some(rest) = x.checked_sub(r) {
            out.push(rest.add(l));
        }
    }
    out
}

/// Breadth-first exploration of the congruence class of `start`, keeping
/// elements of size at most `bound`. Stops early when `stop` accepts an
/// element. Returns the visited set, whether the bound pruned anything,
/// and the accepted element.
fn explore(
    rels: &[(usize, MonoidElement, MonoidElement)],
    start: &MonoidElement,
    bound: u64,
    mut stop: impl FnMut(&MonoidElement) -> bool,
) -> (HashSet<MonoidElement>, bool, Option<MonoidElement>) {
    let mut seen = HashSet::new();
    let mut pruned = false;
    if start.size() > bound {
        return (seen, true, None);
    }
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start.clone());
    while let Some(x) = queue.pop_front() {
        if stop(&x) {
            return (seen, pruned, Some(x));
        }
        for y in neighbours(rels, &x) {
            if y.size() > bound {
                pruned = true;
            } else if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    (seen, pruned, None)
}

/// Semi-decision for `x ~ y`: `Yes` when connected within the bound,
/// `No` when one of the two classes is exhausted without pruning (so it is
/// known completely and misses the other element), `Unknown` otherwise.
pub fn equals_bounded(q: &Quiver, x: &MonoidElement, y: &MonoidElement, bound: u64) -> Decision {
    if x == y {
        return Decision::Yes;
    }
    let rels = relations(q);
    let (from_x, pruned_x, hit) = explore(&rels, x, bound, |z| z == y);
    if hit.is_some() {
        return Decision::Yes;
    }
    if !pruned_x {
        return Decision::No;
    }
    let (_, pruned_y, hit) = explore(&rels, y, bound, |z| from_x.contains(z));
    if hit.is_some() {
        return Decision::Yes;
    }
    if !pruned_y {
        return Decision::No;
    }
    Decision::Unknown
}

/// `V` spans an order ideal iff every relation has both sides supported in
/// `V` or neither: then `{x : supp(x) ⊆ V}` is a union of congruence
/// classes, closed under sums and summands.
pub fn is_ideal_support(q: &Quiver, v: VertexSet) -> bool {
    relations(q).iter().all(|(_, l, r)| l.support().is_subset(v) == r.support().is_subset(v))
}

/// Supports of all order ideals (exhaustive over vertex subsets).
pub fn order_ideal_supports(q: &Quiver) -> Result<Vec<VertexSet>> {
    if q.vertex_count() > 20 {
        return Err(Error::InvalidQuiver("order ideals are enumerated for at most 20 vertices".into()));
    }
    Ok((0..1u64 << q.vertex_count()).map(VertexSet::from_bits).filter(|&v| is_ideal_support(q, v)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum GeneratedIdeal {
    /// Support of the ideal generated by `{a_v : v ∈ S}`, with a witness
    /// `a_w ≤ k·σ_S` for every generator beyond `S`.
    Determined { support: Vec<String>, witnesses: Vec<(String, u64, String)> },
    /// The search bound was too small to exhibit every membership.
    Inconclusive { upper_bound: Vec<String>, unresolved: Vec<String> },
}

/// The order ideal generated by `{a_v : v ∈ S}`. Its support lies inside
/// the least ideal support containing `S`; each remaining generator `a_w`
/// is confirmed by finding `w` in the class of some `k·σ_S`.
pub fn ideal_generated(q: &Quiver, s: VertexSet, bound: u64) -> Result<(VertexSet, GeneratedIdeal)> {
    let upper = order_ideal_supports(q)?
        .into_iter()
        .filter(|&v| s.is_subset(v))
        .fold(q.all_vertices(), VertexSet::intersection);
    let rels = relations(q);
    let mut witnesses = Vec::new();
    let mut unresolved = Vec::new();
    let sigma = MonoidElement::indicator(q, s);
    for w in upper.difference(s).iter() {
        let mut found = None;
        for k in 1..=q.vertex_count().max(1) as u64 {
            let start = sigma.scale(k);
            if start.size() > bound {
                break;
            }
            let (_, _, hit) = explore(&rels, &start, bound, |z| z.0[w] > 0);
            if let Some(z) = hit {
                found = Some((k, z));
                break;
            }
        }
        match found {
            Some((k, z)) => witnesses.push((q.vertex_id(w).to_string(), k, z.format(q))),
            None => unresolved.push(q.vertex_id(w).to_string()),
        }
    }
    let outcome = if unresolved.is_empty() {
        GeneratedIdeal::Determined { support: q.set_ids(upper), witnesses }
    } else {
        GeneratedIdeal::Inconclusive { upper_bound: q.set_ids(upper), unresolved }
    };
    Ok((upper, outcome))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealLatticeReport {
    /// Supports of the order ideals of `M(E)`.
    pub ideals: Vec<Vec<String>>,
    /// Hereditary saturated subsets of the quiver.
    pub hereditary_saturated: Vec<Vec<String>>,
    /// `H ↦ ⟨a_v : v ∈ H⟩` is a bijection onto the ideals.
    pub bijective: bool,
    /// `H ⊆ H'` iff the ideals are nested.
    pub inclusion_preserving: bool,
    /// For every tested vertex set `S`, the generated ideal has support
    /// equal to the hereditary saturated closure of `S`.
    pub closure_agrees: bool,
    /// Vertex sets whose generated ideal could not be pinned down.
    pub inconclusive: Vec<Vec<String>>,
}

impl IdealLatticeReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.inclusion_preserving && self.closure_agrees && self.inconclusive.is_empty()
    }
}

/// The order-ideal lattice of `M(E)` against the hereditary saturated
/// subsets. Generated ideals are checked for every vertex subset when
/// there are at most 8 vertices, and for singletons otherwise.
pub fn order_ideal_lattice(q: &Quiver, bound: u64) -> Result<IdealLatticeReport> {
    let ideals = order_ideal_supports(q)?;
    let hs = q.enumerate_lattice().sets;
    let mut images = Vec::new();
    let mut inconclusive = Vec::new();
    for &h in &hs {
        let (support, outcome) = ideal_generated(q, h, bound)?;
        if matches!(outcome, GeneratedIdeal::Inconclusive { .. }) {
            inconclusive.push(q.set_ids(h));
        }
        images.push(support);
    }
    let mut sorted_images = images.clone();
    sorted_images.sort();
    sorted_images.dedup();
    let mut sorted_ideals = ideals.clone();
    sorted_ideals.sort();
    let bijective = sorted_images.len() == hs.len() && sorted_images == sorted_ideals;
    let inclusion_preserving = (0..hs.len())
        .all(|i| (0..hs.len()).all(|j| hs[i].is_subset(hs[j]) == images[i].is_subset(images[j])));

    let tested: Vec<VertexSet> = if q.vertex_count() <= 8 {
        (0..1u64 << q.vertex_count()).map(VertexSet::from_bits).collect()
    } else {
        (0..q.vertex_count()).map(VertexSet::singleton).collect()
    };
    let mut closure_agrees = true;
    for s in tested {
        let (support, outcome) = ideal_generated(q, s, bound)?;
        if matches!(outcome, GeneratedIdeal::Inconclusive { .. }) {
            inconclusive.push(q.set_ids(s));
        }
        closure_agrees &= support == q.hereditary_saturated_closure(s);
    }
    inconclusive.sort();
    inconclusive.dedup();
    Ok(IdealLatticeReport {
        ideals: ideals.iter().map(|&v| q.set_ids(v)).collect(),
        hereditary_saturated: hs.iter().map(|&h| q.set_ids(h)).collect(),
        bijective,
        inclusion_preserving,
        closure_agrees,
        inconclusive,
    })
}
