//! Mixed path algebras.
//!
//! Elements are finite combinations of paths whose coefficient at `α`
//! lies in `K_{lev(r(α))}`. That description of the algebra is checked
//! against [`oracle_membership`], which builds the algebra from its
//! recursive definition instead.

use std::collections::BTreeMap;
use std::fmt;

use crate::context::{Ctx, MixedContext};
use crate::error::{Error, Result};
use crate::quiver::{Path, VertexSet};
use crate::text::{self, Letter};
use crate::tower::TowerElement;

#[derive(Clone, PartialEq, Eq)]
pub struct MpaElement {
    ctx: Ctx,
    terms: BTreeMap<Path, TowerElement>,
}

impl MpaElement {
    pub fn zero(ctx: &Ctx) -> Self {
        MpaElement { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    /// Canonicalize `terms`, enforcing the level constraint.
    pub fn make(ctx: &Ctx, terms: impl IntoIterator<Item = (Path, TowerElement)>) -> Result<Self> {
        let mut out = MpaElement::zero(ctx);
        for (p, c) in terms {
            ctx.check_level(ctx.quiver().path_dst(&p), &c, || ctx.quiver().format_path(&p))?;
            out.add_term(p, c);
        }
        Ok(out)
    }

    /// Combination without the level check; used for candidates and
    /// for internal results that are valid by construction.
    pub(crate) fn unchecked(ctx: &Ctx, terms: impl IntoIterator<Item = (Path, TowerElement)>) -> Self {
        let mut out = MpaElement::zero(ctx);
        for (p, c) in terms {
            out.add_term(p, c);
        }
        out
    }

    pub fn vertex(ctx: &Ctx, v: usize) -> Self {
        Self::unchecked(ctx, [(Path::trivial(v), ctx.tower().one())])
    }

    /// `p_H = Σ_{v ∈ H} p_v`.
    pub fn vertex_sum(ctx: &Ctx, h: VertexSet) -> Self {
        Self::unchecked(ctx, h.iter().map(|v| (Path::trivial(v), ctx.tower().one())))
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::vertex_sum(ctx, ctx.quiver().all_vertices())
    }

    pub fn path(ctx: &Ctx, p: Path) -> Self {
        Self::unchecked(ctx, [(p, ctx.tower().one())])
    }

    pub fn edge(ctx: &Ctx, e: usize) -> Self {
        Self::path(ctx, ctx.quiver().path(&[e]).expect("single edge"))
    }

    fn add_term(&mut self, p: Path, c: TowerElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&p) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&p);
                }
            }
            None => {
                self.terms.insert(p, c);
            }
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &TowerElement)> {
        self.terms.iter()
    }

    pub fn coeff(&self, p: &Path) -> Option<&TowerElement> {
        self.terms.get(p)
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

    /// Longest path in the support (0 for the zero element).
    pub fn max_length(&self) -> usize {
        self.terms.keys().map(Path::len).max().unwrap_or(0)
    }

    /// Does every coefficient satisfy the level constraint?
    pub fn is_valid(&self) -> bool {
        self.terms.iter().all(|(p, c)| c.membership_at_level(self.ctx.path_level(p)))
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
        for (p, c) in &o.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        MpaElement { ctx: self.ctx.clone(), terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    /// Multiply by a scalar; the caller keeps the level constraint.
    pub fn scale(&self, c: &TowerElement) -> Result<Self> {
        let out = Self::unchecked(&self.ctx, self.terms.iter().map(|(p, x)| (p.clone(), x * c)));
        Self::make(&self.ctx, out.terms)
    }

    /// Bilinear extension of path concatenation.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_ctx(o)?;
        let q = self.ctx.quiver();
        let mut out = MpaElement::zero(&self.ctx);
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                if let Some(ab) = q.concat(a, b) {
                    out.add_term(ab, c * d);
                }
            }
        }
        Ok(out)
    }

    /// Coefficients of the trivial paths, indexed by vertex.
    pub fn augmentation(&self) -> Vec<TowerElement> {
        (0..self.ctx.quiver().vertex_count())
            .map(|v| self.terms.get(&Path::trivial(v)).cloned().unwrap_or_else(|| self.ctx.tower().zero()))
            .collect()
    }

    /// Splitting of the augmentation: `Σ c_v p_v`.
    pub fn from_vertex_values(ctx: &Ctx, values: &[TowerElement]) -> Result<Self> {
        Self::make(ctx, values.iter().enumerate().map(|(v, c)| (Path::trivial(v), c.clone())))
    }

    /// Terms of path length at least one dropped.
    pub fn trivial_part(&self) -> Self {
        Self::unchecked(&self.ctx, self.terms.iter().filter(|(p, _)| p.is_trivial()).map(|(p, c)| (p.clone(), c.clone())))
    }

    /// Keep the terms whose path satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Path) -> bool) -> Self {
        Self::unchecked(&self.ctx, self.terms.iter().filter(|(p, _)| keep(p)).map(|(p, c)| (p.clone(), c.clone())))
    }

    /// Parse the text format; words must be composable real paths or `@v`.
    pub fn parse(ctx: &Ctx, s: &str) -> Result<Self> {
        let q = ctx.quiver();
        let mut terms = Vec::new();
        for t in text::parse_terms(ctx.tower(), s)? {
            let path = match t.word.as_slice() {
                [Letter::Vertex(v)] => {
                    Path::trivial(q.vertex(v).ok_or_else(|| Error::Parse(format!("unknown vertex {v:?}")))?)
                }
                letters => {
                    let ids = letters
                        .iter()
                        .map(|l| match l {
                            Letter::Edge(e) => Ok(e.as_str()),
                            _ => Err(Error::Parse("path algebra words contain only real edges".into())),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    q.path_from_ids(&ids)?
                }
            };
            terms.push((path, t.coeff));
        }
        Self::make(ctx, terms)
    }
}

impl fmt::Display for MpaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.ctx.quiver();
        f.write_str(&text::format_terms(self.terms.iter().map(|(p, c)| (c, q.format_path(p)))))
    }
}

impl fmt::Debug for MpaElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpaElement({self})")
    }
}

/// `dim_{K_0}` of the span of length-`n` terms: each path contributes
/// `[K_{lev(r(α))} : K_0]`.
pub fn graded_dimension(ctx: &MixedContext, n: usize) -> Result<usize> {
    let q = ctx.quiver();
    let mut total = 0;
    for p in q.paths_of_length(n) {
        total += ctx.tower().degree_over_base(ctx.path_level(&p))?;
    }
    Ok(total)
}

/// Decide whether the combination `terms` (coefficients unconstrained)
/// lies in the algebra generated by the recursion
/// `P_0 = P_{K_r}(E_{H_0})`,
/// `P_i = P_{K_{r−i}}(E_{H_i}) + P_{K_{r−i}}(E_{H_i}) p_{H_{i−1}} P_{i−1}`,
/// truncated at the longest path in `terms`. Finite-field towers only.
///
/// The algebra is graded by paths, so each `P_i` is tracked as a map from
/// paths to `F_p`-subspaces of `K_r`; membership is a rank test.
pub fn oracle_membership(ctx: &MixedContext, terms: &[(Path, TowerElement)]) -> Result<bool> {
    let max_len = terms.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
    let oracle = RecursionOracle::new(ctx, max_len)?;
    Ok(terms.iter().all(|(path, c)| oracle.contains(path, c)))
}

/// The spans of the recursion, per path, for all paths up to a length.
#[derive(Debug, Clone)]
pub struct RecursionOracle {
    spans: BTreeMap<Path, Vec<Vec<u32>>>,
    p: u32,
    max_len: usize,
}

impl RecursionOracle {
    pub fn new(ctx: &MixedContext, max_len: usize) -> Result<Self> {
        let tower = ctx.tower();
        if !tower.is_finite_field() {
            return Err(Error::NeedsFiniteField);
        }
        let chain = ctx.levels().sets();
        let r = chain.len() - 1;
        let q = ctx.quiver();
        let paths = q.paths_up_to(max_len);
        let p = prime_of(ctx)?;
        let coords = |c: &TowerElement| c.prime_coordinates().expect("finite tower").to_vec();
        let basis_of = |level: usize| -> Result<Vec<Vec<u32>>> {
            Ok(tower.prime_basis(level)?.iter().map(coords).collect())
        };

        let mut prev: BTreeMap<Path, Vec<Vec<u32>>> = BTreeMap::new();
        for i in 0..=r {
            let h = chain[i];
            let scalars = basis_of(r - i)?;
            let mut cur: BTreeMap<Path, Vec<Vec<u32>>> = BTreeMap::new();
            let in_restriction = |a: &Path| h.contains(a.src());
            for a in paths.iter().filter(|a| in_restriction(a)) {
                cur.entry(a.clone()).or_default().extend(scalars.iter().cloned());
            }
            if i > 0 {
                let below = chain[i - 1];
                for a in paths.iter().filter(|a| in_restriction(a) && below.contains(q.path_dst(a))) {
                    for (b, span) in &prev {
                        if a.len() + b.len() > max_len {
                            continue;
                        }
                        let Some(ab) = q.concat(a, b) else { continue };
                        let entry = cur.entry(ab).or_default();
                        for c in &scalars {
                            for d in span {
                                entry.push(coords(&(&from_coords(tower, c) * &from_coords(tower, d))));
                            }
                        }
                    }
                }
            }
            for span in cur.values_mut() {
                *span = row_basis(std::mem::take(span), p);
            }
            prev = cur;
        }
        Ok(RecursionOracle { spans: prev, p, max_len })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Whether `c · path` lies in the generated algebra; `path` must not be
    /// longer than the oracle's length bound.
    pub fn contains(&self, path: &Path, c: &TowerElement) -> bool {
        assert!(path.len() <= self.max_len, "path longer than the oracle bound");
        if c.is_zero() {
            return true;
        }
        let mut with = self.spans.get(path).cloned().unwrap_or_default();
        let base = with.len();
        with.push(c.prime_coordinates().expect("finite tower").to_vec());
        crate::tower::rank_mod_p(with, self.p) == base
    }
}

fn prime_of(ctx: &MixedContext) -> Result<u32> {
    match ctx.tower().spec() {
        crate::tower::TowerSpec::FiniteField { p, .. } | crate::tower::TowerSpec::Constant { p, .. } if *p > 0 => {
            Ok(*p)
        }
        _ => Err(Error::NeedsFiniteField),
    }
}

fn from_coords(tower: &crate::tower::Tower, c: &[u32]) -> TowerElement {
    tower.from_prime_coordinates(c).expect("finite tower")
}

fn row_basis(rows: Vec<Vec<u32>>, p: u32) -> Vec<Vec<u32>> {
    let mut basis: Vec<Vec<u32>> = Vec::new();
    for r in rows {
        let mut trial = basis.clone();
        trial.push(r);
        if crate::tower::rank_mod_p(trial.clone(), p) > basis.len() {
            basis = trial;
        }
    }
    basis
}

#[cfg(test)]
mod tests;
