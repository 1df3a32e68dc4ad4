//! Truncated power series over a quiver, rational series given by linear
//! representations `λ (I − B)^{-1} ρ`, and the transductions.
//!
//! Every identity checked here is graded by path length, so comparing
//! at a finite order is exact.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::Ctx;
use crate::error::{Error, Result};
use crate::mpa::MpaElement;
use crate::quiver::{Path, SubQuiver, VertexSet};
use crate::text;
use crate::tower::TowerElement;

/// A power series known up to (and including) path length `order`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ctx: Ctx,
    order: usize,
    terms: BTreeMap<Path, TowerElement>,
}

impl TruncatedSeries {
    pub fn zero(ctx: &Ctx, order: usize) -> Self {
        TruncatedSeries { ctx: ctx.clone(), order, terms: BTreeMap::new() }
    }

    pub fn from_terms(ctx: &Ctx, order: usize, terms: impl IntoIterator<Item = (Path, TowerElement)>) -> Self {
        let mut out = Self::zero(ctx, order);
        for (p, c) in terms {
            out.add_term(p, c);
        }
        out
    }

    /// `a` truncated at `order`.
    pub fn from_mpa(a: &MpaElement, order: usize) -> Self {
        Self::from_terms(a.ctx(), order, a.terms().map(|(p, c)| (p.clone(), c.clone())))
    }

    pub fn vertex(ctx: &Ctx, v: usize, order: usize) -> Self {
        Self::from_terms(ctx, order, [(Path::trivial(v), ctx.tower().one())])
    }

    /// `p_H`.
    pub fn vertex_sum(ctx: &Ctx, h: VertexSet, order: usize) -> Self {
        Self::from_terms(ctx, order, h.iter().map(|v| (Path::trivial(v), ctx.tower().one())))
    }

    fn add_term(&mut self, p: Path, c: TowerElement) {
        if c.is_zero() || p.len() > self.order {
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

    pub fn order(&self) -> usize {
        self.order
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

    /// Does every stored coefficient satisfy the level constraint?
    pub fn is_mixed_valid(&self) -> bool {
        self.terms.iter().all(|(p, c)| c.membership_at_level(self.ctx.path_level(p)))
    }

    /// The first stored term violating the level constraint.
    pub fn level_violation(&self) -> Option<(&Path, &TowerElement)> {
        self.terms.iter().find(|(p, c)| !c.membership_at_level(self.ctx.path_level(p)))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self::from_terms(&self.ctx, order, self.terms.iter().map(|(p, c)| (p.clone(), c.clone())))
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
        let mut out = self.truncate(o.order);
        for (p, c) in &o.terms {
            out.add_term(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            ctx: self.ctx.clone(),
            order: self.order,
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &TowerElement) -> Self {
        Self::from_terms(&self.ctx, self.order, self.terms.iter().map(|(p, x)| (p.clone(), x * c)))
    }

    /// Product, known to the smaller of the two orders.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.same_ctx(o)?;
        let q = self.ctx.quiver();
        let mut out = Self::zero(&self.ctx, self.order.min(o.order));
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                if a.len() + b.len() > out.order {
                    continue;
                }
                if let Some(ab) = q.concat(a, b) {
                    out.add_term(ab, c * d);
                }
            }
        }
        Ok(out)
    }

    /// Keep the terms whose path satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Path) -> bool) -> Self {
        Self::from_terms(&self.ctx, self.order, self.terms.iter().filter(|(p, _)| keep(p)).map(|(p, c)| (p.clone(), c.clone())))
    }

    /// Transport along a subquiver map; terms that do not survive vanish.
    pub fn map_to(&self, target: &Ctx, sub: &SubQuiver) -> Result<Self> {
        let mut out = Self::zero(target, self.order);
        for (p, c) in &self.terms {
            if let Some(image) = sub.map_path(p) {
                out.add_term(image, target.tower().retag(c)?);
            }
        }
        Ok(out)
    }

    /// Right transduction `δ̃_e`: the coefficient of `α` is that of `eα`.
    pub fn right_transduction(&self, e: usize) -> Self {
        let q = self.ctx.quiver();
        let order = self.order.saturating_sub(1);
        Self::from_terms(
            &self.ctx,
            order,
            self.terms
                .iter()
                .filter(|(p, _)| p.first_edge() == Some(e))
                .map(|(p, c)| (p.strip_first(q).expect("starts with e"), c.clone())),
        )
    }

    /// Left transduction `δ_e`: the coefficient of `α` is that of `αe`.
    pub fn left_transduction(&self, e: usize) -> Self {
        let order = self.order.saturating_sub(1);
        Self::from_terms(
            &self.ctx,
            order,
            self.terms
                .iter()
                .filter(|(p, _)| p.last_edge() == Some(e))
                .map(|(p, c)| (p.strip_last().expect("ends with e"), c.clone())),
        )
    }

    /// `τ_e`: keep the trivial-path part, send `p_{s(e)}` to `p_{r(e)}` and
    /// every other `p_v` to zero.
    pub fn tau(&self, e: usize) -> Self {
        let q = self.ctx.quiver();
        let from = Path::trivial(q.src(e));
        let terms = self.terms.get(&from).map(|c| (Path::trivial(q.dst(e)), c.clone()));
        Self::from_terms(&self.ctx, self.order, terms)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = self.ctx.quiver();
        f.write_str(&text::format_terms(self.terms.iter().map(|(p, c)| (c, q.format_path(p)))))
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries({self} + O({}))", self.order + 1)
    }
}

/// `δ̃_e(rs) = δ̃_e(r) s + τ_e(r) δ̃_e(s)`, compared at the common order.
pub fn check_derivation_law(r: &TruncatedSeries, s: &TruncatedSeries, e: usize) -> Result<bool> {
    let lhs = r.mul(s)?.right_transduction(e);
    let rhs = r.right_transduction(e).mul(s)?.add(&r.tau(e).mul(&s.right_transduction(e))?)?;
    let order = lhs.order().min(rhs.order());
    Ok(lhs.truncate(order) == rhs.truncate(order))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Outcome of applying a transduction to a level-valid series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub side: Side,
    pub edge: String,
    pub input_valid: bool,
    pub output_valid: bool,
    /// `(path, coefficient, required level)` of an offending output term.
    pub witness: Option<(String, String, usize)>,
}

pub fn mixed_closure_probe(s: &TruncatedSeries, e: usize, side: Side) -> ProbeReport {
    let q = s.ctx().quiver();
    let out = match side {
        Side::Left => s.left_transduction(e),
        Side::Right => s.right_transduction(e),
    };
    let witness =
        out.level_violation().map(|(p, c)| (q.format_path(p), c.to_string(), s.ctx().path_level(p)));
    ProbeReport {
        side,
        edge: q.edge(e).id.clone(),
        input_valid: s.is_mixed_valid(),
        output_valid: witness.is_none(),
        witness,
    }
}

/// Systematic search for left transductions leaving the algebra: for every
/// path `αe` with `|αe| ≤ max_len`, the single term `c·αe` with `c`
/// generating `K_{lev(r(e))}`.
pub fn left_transduction_witnesses(ctx: &Ctx, max_len: usize) -> Result<Vec<(TruncatedSeries, usize, ProbeReport)>> {
    let q = ctx.quiver();
    let mut out = Vec::new();
    for p in q.paths_up_to(max_len) {
        let Some(e) = p.last_edge() else { continue };
        let c = ctx.tower().level_generator(ctx.path_level(&p))?;
        let s = TruncatedSeries::from_terms(ctx, max_len, [(p, c)]);
        let report = mixed_closure_probe(&s, e, Side::Left);
        if !report.output_valid {
            out.push((s, e, report));
        }
    }
    Ok(out)
}

/// A matrix of truncated series.
pub type SeriesMatrix = Vec<Vec<TruncatedSeries>>;

fn mat_mul(a: &SeriesMatrix, b: &SeriesMatrix) -> Result<SeriesMatrix> {
    let n = b.len();
    let mut out = Vec::with_capacity(a.len());
    for row in a {
        let mut out_row = Vec::new();
        for j in 0..b.first().map_or(0, Vec::len) {
            let mut acc = row[0].mul(&b[0][j])?;
            for k in 1..n {
                acc = acc.add(&row[k].mul(&b[k][j])?)?;
            }
            out_row.push(acc);
        }
        out.push(out_row);
    }
    Ok(out)
}

fn mat_add(a: &SeriesMatrix, b: &SeriesMatrix) -> Result<SeriesMatrix> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add(y)).collect()).collect()
}

fn identity(ctx: &Ctx, n: usize, order: usize) -> SeriesMatrix {
    let one = TruncatedSeries::vertex_sum(ctx, ctx.quiver().all_vertices(), order);
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.clone() } else { TruncatedSeries::zero(ctx, order) }).collect())
        .collect()
}

/// `Σ_{k ≤ N} M^k`, which is `(I − M)^{-1}` to order `N` when `ε(M) = 0`.
pub fn geometric(ctx: &Ctx, m: &SeriesMatrix, order: usize) -> Result<SeriesMatrix> {
    let mut sum = identity(ctx, m.len(), order);
    let mut power = sum.clone();
    for _ in 0..order {
        power = mat_mul(&power, m)?;
        sum = mat_add(&sum, &power)?;
    }
    Ok(sum)
}

fn to_series(m: &[Vec<MpaElement>], order: usize) -> SeriesMatrix {
    m.iter().map(|r| r.iter().map(|x| TruncatedSeries::from_mpa(x, order)).collect()).collect()
}

/// Serialized form: entries in the element text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepFile {
    pub lambda: Vec<String>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<String>>,
    pub rho: Vec<String>,
}

/// `(λ, B, ρ)` with `ε(B) = 0`, representing `λ (I − B)^{-1} ρ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRep {
    ctx: Ctx,
    lambda: Vec<MpaElement>,
    b: Vec<Vec<MpaElement>>,
    rho: Vec<MpaElement>,
    /// Range vertices of the paths in each entry of `B`.
    ends: Vec<Vec<VertexSet>>,
}

impl LinearRep {
    pub fn new(ctx: &Ctx, lambda: Vec<MpaElement>, b: Vec<Vec<MpaElement>>, rho: Vec<MpaElement>) -> Result<Self> {
        let n = lambda.len();
        if rho.len() != n || b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("λ has {n} entries; B and ρ must match")));
        }
        let all = lambda.iter().chain(&rho).chain(b.iter().flatten());
        for x in all {
            if x.ctx() != ctx {
                return Err(Error::ContextMismatch);
            }
            if !x.is_valid() {
                return Err(Error::InternalInvariantViolation(format!("entry {x} breaks the level constraint")));
            }
        }
        for (i, row) in b.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.trivial_part().is_zero() {
                    return Err(Error::EpsilonNonzero(i, j));
                }
            }
        }
        let q = ctx.quiver();
        let ends = b
            .iter()
            .map(|row| row.iter().map(|x| x.terms().map(|(p, _)| q.path_dst(p)).collect()).collect())
            .collect();
        Ok(LinearRep { ctx: ctx.clone(), lambda, b, rho, ends })
    }

    pub fn from_file(ctx: &Ctx, f: &RepFile) -> Result<Self> {
        let parse = |s: &String| MpaElement::parse(ctx, s);
        let lambda = f.lambda.iter().map(parse).collect::<Result<_>>()?;
        let b = f.b.iter().map(|r| r.iter().map(parse).collect::<Result<_>>()).collect::<Result<_>>()?;
        let rho = f.rho.iter().map(parse).collect::<Result<_>>()?;
        Self::new(ctx, lambda, b, rho)
    }

    pub fn to_file(&self) -> RepFile {
        RepFile {
            lambda: self.lambda.iter().map(ToString::to_string).collect(),
            b: self.b.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
            rho: self.rho.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn size(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[MpaElement] {
        &self.lambda
    }

    pub fn b(&self) -> &[Vec<MpaElement>] {
        &self.b
    }

    pub fn rho(&self) -> &[MpaElement] {
        &self.rho
    }

    /// `λ (Σ_{k ≤ N} B^k) ρ`, truncated at `N`.
    pub fn expand(&self, order: usize) -> Result<TruncatedSeries> {
        let b = to_series(&self.b, order);
        // Accumulate Σ B^k ρ as a column, then apply λ.
        let mut column: SeriesMatrix = self.rho.iter().map(|x| vec![TruncatedSeries::from_mpa(x, order)]).collect();
        let mut sum = column.clone();
        for _ in 0..order {
            column = mat_mul(&b, &column)?;
            sum = mat_add(&sum, &column)?;
        }
        let mut out = TruncatedSeries::zero(&self.ctx, order);
        for (l, s) in self.lambda.iter().zip(&sum) {
            out = out.add(&TruncatedSeries::from_mpa(l, order).mul(&s[0])?)?;
        }
        Ok(out)
    }

    /// `B = B₁ + B₂` with `B₁` supported on paths ending outside `H` and
    /// `B₂` on paths ending in `H`; `B₂B₁ = 0` is verified.
    pub fn split_b(&self, h: VertexSet) -> Result<(Vec<Vec<MpaElement>>, Vec<Vec<MpaElement>>)> {
        let q = self.ctx.quiver();
        if !q.is_hereditary(h) {
            return Err(Error::NotHereditary(q.set_ids(h)));
        }
        let zero = MpaElement::zero(&self.ctx);
        let mut b1 = Vec::new();
        let mut b2 = Vec::new();
        for (row, ends) in self.b.iter().zip(&self.ends) {
            let (mut r1, mut r2) = (Vec::new(), Vec::new());
            for (x, &end) in row.iter().zip(ends) {
                if end.is_subset(h) {
                    r1.push(zero.clone());
                    r2.push(x.clone());
                } else if end.intersection(h).is_empty() {
                    r1.push(x.clone());
                    r2.push(zero.clone());
                } else {
                    r1.push(x.filter(|p| !h.contains(q.path_dst(p))));
                    r2.push(x.filter(|p| h.contains(q.path_dst(p))));
                }
            }
            b1.push(r1);
            b2.push(r2);
        }
        let n = self.size();
        for i in 0..n {
            for j in 0..n {
                let mut acc = zero.clone();
                for k in 0..n {
                    acc = acc.add(&b2[i][k].mul(&b1[k][j])?)?;
                }
                if !acc.is_zero() {
                    return Err(Error::InternalInvariantViolation(format!("(B₂B₁)[{i}][{j}] = {acc}")));
                }
            }
        }
        Ok((b1, b2))
    }

    /// `(I − B)^{-1} = (I − B₁)^{-1}(I − B₂)^{-1}
    ///              = (I − B₁)^{-1} + (I − B₁)^{-1} B₂ (I − B₂)^{-1}`
    /// to order `N`.
    pub fn check_binverse_identity(&self, h: VertexSet, order: usize) -> Result<bool> {
        let (b1, b2) = self.split_b(h)?;
        let inv = geometric(&self.ctx, &to_series(&self.b, order), order)?;
        let inv1 = geometric(&self.ctx, &to_series(&b1, order), order)?;
        let inv2 = geometric(&self.ctx, &to_series(&b2, order), order)?;
        let product = mat_mul(&inv1, &inv2)?;
        let sum = mat_add(&inv1, &mat_mul(&mat_mul(&inv1, &to_series(&b2, order))?, &inv2)?)?;
        Ok(inv == product && inv == sum)
    }

    /// Compression by `p_H` (`H` hereditary), expressed over `E_H`:
    /// `(p_H λ p_H, p_H B p_H, p_H ρ p_H)`.
    pub fn corner_rep(&self, h: VertexSet) -> Result<(LinearRep, SubQuiver)> {
        let (target, sub) = self.ctx.restriction(h)?;
        let q = self.ctx.quiver();
        let compress = |x: &MpaElement| -> Result<MpaElement> {
            let kept = x.filter(|p| h.contains(p.src()));
            let mut terms = Vec::new();
            for (p, c) in kept.terms() {
                let image = sub.map_path(p).expect("paths from H stay in H");
                terms.push((image, target.tower().retag(c)?));
            }
            debug_assert!(kept.terms().all(|(p, _)| h.contains(q.path_dst(p))));
            MpaElement::make(&target, terms)
        };
        let lambda = self.lambda.iter().map(compress).collect::<Result<_>>()?;
        let b = self.b.iter().map(|r| r.iter().map(compress).collect::<Result<_>>()).collect::<Result<_>>()?;
        let rho = self.rho.iter().map(compress).collect::<Result<_>>()?;
        Ok((LinearRep::new(&target, lambda, b, rho)?, sub))
    }

    /// `expand(corner_rep(H), N)` against `p_H · expand(N) · p_H` mapped to
    /// `E_H`.
    pub fn check_corner_formula(&self, h: VertexSet, order: usize) -> Result<bool> {
        let (corner, sub) = self.corner_rep(h)?;
        let p_h = TruncatedSeries::vertex_sum(&self.ctx, h, order);
        let full = p_h.mul(&self.expand(order)?)?.mul(&p_h)?;
        Ok(corner.expand(order)? == full.map_to(corner.ctx(), &sub)?)
    }
}

/// Coefficient equations behind the crossing-edge independence claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossingCheck {
    /// `b_1, …, b_m` are independent over `K_level`.
    pub independent: bool,
    /// Some `a_j e ≠ 0`.
    pub some_nonzero: bool,
    /// `Σ a_j e b_j ≠ 0` at the truncation order.
    pub sum_nonzero: bool,
    /// A path `γ e μ` with nonzero coefficient `Σ a_j(γ) b_j(μ)`.
    pub witness: Option<String>,
}

impl CrossingCheck {
    /// The implication "independent and some `a_j e ≠ 0` ⇒ sum ≠ 0".
    pub fn holds(&self) -> bool {
        !(self.independent && self.some_nonzero) || self.sum_nonzero
    }
}

/// For a crossing edge `e` of `H` (`s(e) ∉ H`, `r(e) ∈ H`), series
/// `a_j` supported outside `H` with coefficients in `K_level` and `b_j`
/// supported on paths of `E_H` starting at `r(e)`, evaluate `Σ a_j e b_j`.
pub fn crossing_edge_check(
    ctx: &Ctx,
    h: VertexSet,
    e: usize,
    a: &[TruncatedSeries],
    b: &[TruncatedSeries],
    level: usize,
) -> Result<CrossingCheck> {
    let q = ctx.quiver();
    if !q.is_hereditary(h) {
        return Err(Error::NotHereditary(q.set_ids(h)));
    }
    if h.contains(q.src(e)) || !h.contains(q.dst(e)) {
        return Err(Error::InvalidChoice(format!("{} is not a crossing edge", q.edge(e).id)));
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!("{} left factors, {} right factors", a.len(), b.len())));
    }
    let outside = |p: &Path| q.path_vertices(p).iter().all(|&v| !h.contains(v));
    for x in a {
        if x.terms().any(|(p, c)| !outside(p) || !c.membership_at_level(level)) {
            return Err(Error::InvalidChoice("left factors must live on E \\ H over the small field".into()));
        }
    }
    for x in b {
        if x.terms().any(|(p, _)| p.src() != q.dst(e)) {
            return Err(Error::InvalidChoice("right factors must start at r(e)".into()));
        }
    }

    // Independence of the b_j over K_level, as coefficient vectors.
    let support: Vec<&Path> = {
        let mut s: Vec<&Path> = b.iter().flat_map(|x| x.terms().map(|(p, _)| p)).collect();
        s.sort();
        s.dedup();
        s
    };
    let rows: Vec<Vec<TowerElement>> = b
        .iter()
        .map(|x| support.iter().map(|p| x.coeff(p).cloned().unwrap_or_else(|| ctx.tower().zero())).collect())
        .collect();
    let independent = rows.is_empty() || ctx.tower().vectors_independent_over(&rows, level)?;

    // `γ e μ` splits uniquely at the crossing edge, so the inputs are
    // treated as polynomials and the products are exact.
    let order = a.iter().chain(b).map(TruncatedSeries::order).sum::<usize>() + 1;
    let widen = |x: &TruncatedSeries| TruncatedSeries::from_terms(ctx, order, x.terms().map(|(p, c)| (p.clone(), c.clone())));
    let ep = q.path(&[e])?;
    let edge = TruncatedSeries::from_terms(ctx, order, [(ep.clone(), ctx.tower().one())]);
    let mut some_nonzero = false;
    let mut sum = TruncatedSeries::zero(ctx, order);
    for (x, y) in a.iter().zip(b) {
        let xe = widen(x).mul(&edge)?;
        some_nonzero |= !xe.is_zero();
        sum = sum.add(&xe.mul(&widen(y))?)?;
    }
    // Coefficient equations: [γ e μ] = Σ_j a_j(γ) b_j(μ).
    let mut witness = None;
    'search: for x in a {
        for (gamma, _) in x.terms().filter(|(p, _)| q.path_dst(p) == q.src(e)) {
            for mu in &support {
                let mut c = ctx.tower().zero();
                for (aj, bj) in a.iter().zip(b) {
                    if let (Some(u), Some(v)) = (aj.coeff(gamma), bj.coeff(mu)) {
                        c = &c + &(u * v);
                    }
                }
                if !c.is_zero() {
                    let path = q.concat(gamma, &ep).and_then(|ge| q.concat(&ge, mu)).expect("composable");
                    debug_assert_eq!(sum.coeff(&path), Some(&c));
                    witness = Some(q.format_path(&path));
                    break 'search;
                }
            }
        }
    }
    Ok(CrossingCheck { independent, some_nonzero, sum_nonzero: !sum.is_zero(), witness })
}
