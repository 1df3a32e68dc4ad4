//! Re-indexing along the chain: cutting off `H_{i−1}` and compressing to
//! the corner `p_{H_i}`.
//!
//! * cut at `i` (`1 ≤ i ≤ r`): quiver `E/H_{i−1}`, chain `H_j ∖ H_{i−1}`
//!   for `j ≥ i`, tower `K_0 ⊆ … ⊆ K_{r−i}`.
//! * corner at `i` (`0 ≤ i ≤ r`): quiver `E_{H_i}`, chain
//!   `H_0 ⊂ … ⊂ H_i`, tower `K_{r−i} ⊆ … ⊆ K_r`.
//!
//! In both cases every surviving vertex keeps its coefficient field, so
//! re-tagging coefficients into the target window never fails for valid
//! input.

use crate::context::{Ctx, MixedContext};
use crate::error::{Error, Result};
use crate::leavitt::{LpaElement, LpaMonomial};
use crate::mpa::MpaElement;
use crate::quiver::{HereditaryChain, Path, Quiver, SubQuiver, VertexSet};
use crate::series::TruncatedSeries;
use crate::tower::TowerElement;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReindexKind {
    Cut(usize),
    Corner(usize),
}

/// Source and target data of a cut or a corner, computed once.
#[derive(Debug, Clone)]
pub struct ChainReindex {
    pub kind: ReindexKind,
    pub source: Ctx,
    pub target: Ctx,
    sub: SubQuiver,
    /// `H_{i−1}` for a cut, `H_i` for a corner.
    set: VertexSet,
}

fn source_chain(ctx: &MixedContext) -> Result<HereditaryChain> {
    ctx.chain().ok_or_else(|| Error::InvalidChain("re-indexing needs a strict chain".into()))
}

impl ChainReindex {
    pub fn cut(ctx: &Ctx, i: usize) -> Result<Self> {
        let chain = source_chain(ctx)?;
        let r = chain.length();
        if i == 0 || i > r {
            return Err(Error::LevelOutOfRange(i));
        }
        let h = chain.get(i - 1);
        let sub = ctx.quiver().quotient_graph(h)?;
        let sets = chain.sets()[i..].iter().map(|&hj| sub.map_set(hj.difference(h))).collect();
        let target_chain = HereditaryChain::new(&sub.quiver, sets)?;
        let tower = ctx.tower().window(0, r - i)?;
        let target = MixedContext::new(sub.quiver.clone(), &target_chain, tower)?;
        Ok(ChainReindex { kind: ReindexKind::Cut(i), source: ctx.clone(), target, sub, set: h })
    }

    pub fn corner(ctx: &Ctx, i: usize) -> Result<Self> {
        let chain = source_chain(ctx)?;
        let r = chain.length();
        if i > r {
            return Err(Error::LevelOutOfRange(i));
        }
        let h = chain.get(i);
        let sub = ctx.quiver().restriction_graph(h)?;
        let sets = chain.sets()[..=i].iter().map(|&hj| sub.map_set(hj)).collect();
        let target_chain = HereditaryChain::new(&sub.quiver, sets)?;
        let tower = ctx.tower().window(r - i, r)?;
        let target = MixedContext::new(sub.quiver.clone(), &target_chain, tower)?;
        Ok(ChainReindex { kind: ReindexKind::Corner(i), source: ctx.clone(), target, sub, set: h })
    }

    /// The set cut away or compressed to, in source vertex indices.
    pub fn set(&self) -> VertexSet {
        self.set
    }

    pub fn subquiver(&self) -> &SubQuiver {
        &self.sub
    }

    fn check_source(&self, ctx: &Ctx) -> Result<()> {
        if *ctx == self.source {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Image of a path; `None` when the path dies.
    fn map_path(&self, p: &Path) -> Option<Path> {
        match self.kind {
            ReindexKind::Cut(_) => self.sub.map_path(p),
            // p_H α p_H ≠ 0 iff s(α) ∈ H, and then α lies in E_H.
            ReindexKind::Corner(_) if self.set.contains(p.src()) => self.sub.map_path(p),
            ReindexKind::Corner(_) => None,
        }
    }

    fn retag(&self, c: &TowerElement) -> Result<TowerElement> {
        self.target.tower().retag(c)
    }

    pub fn apply_mpa(&self, a: &MpaElement) -> Result<MpaElement> {
        self.check_source(a.ctx())?;
        let mut terms = Vec::new();
        for (p, c) in a.terms() {
            if let Some(image) = self.map_path(p) {
                terms.push((image, self.retag(c)?));
            }
        }
        MpaElement::make(&self.target, terms)
    }

    pub fn apply_lpa(&self, a: &LpaElement) -> Result<LpaElement> {
        self.check_source(a.ctx())?;
        let mut terms = Vec::new();
        for (m, c) in a.terms() {
            if let (Some(real), Some(ghost)) = (self.map_path(&m.real), self.map_path(&m.ghost)) {
                terms.push((LpaMonomial { real, ghost }, self.retag(c)?));
            }
        }
        LpaElement::make(&self.target, terms)
    }

    pub fn apply_series(&self, s: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_source(s.ctx())?;
        let mut terms = Vec::new();
        for (p, c) in s.terms() {
            if let Some(image) = self.map_path(p) {
                terms.push((image, self.retag(c)?));
            }
        }
        let out = TruncatedSeries::from_terms(&self.target, s.order(), terms);
        if let Some((p, c)) = out.level_violation() {
            return Err(Error::LevelViolation {
                path: self.target.quiver().format_path(p),
                coefficient_level: c.level(),
                required_level: self.target.path_level(p),
            });
        }
        Ok(out)
    }
}

pub fn cut_mpa(a: &MpaElement, i: usize) -> Result<MpaElement> {
    ChainReindex::cut(a.ctx(), i)?.apply_mpa(a)
}

pub fn cut_lpa(a: &LpaElement, i: usize) -> Result<LpaElement> {
    ChainReindex::cut(a.ctx(), i)?.apply_lpa(a)
}

pub fn corner_mpa(a: &MpaElement, i: usize) -> Result<MpaElement> {
    ChainReindex::corner(a.ctx(), i)?.apply_mpa(a)
}

pub fn corner_lpa(a: &LpaElement, i: usize) -> Result<LpaElement> {
    ChainReindex::corner(a.ctx(), i)?.apply_lpa(a)
}

/// `p_H P(E) = p_H P(E) p_H = P(E_H)` on paths of length at most
/// `max_len`: every path leaving `H` stays in `H`, and the paths starting
/// in `H` are exactly the paths of `E_H`.
pub fn check_corner_path_identities(q: &Quiver, h: VertexSet, max_len: usize) -> Result<bool> {
    let sub = q.restriction_graph(h)?;
    let from_h: Vec<Path> = q.paths_up_to(max_len).into_iter().filter(|p| h.contains(p.src())).collect();
    if from_h.iter().any(|p| !h.contains(q.path_dst(p))) {
        return Ok(false);
    }
    let Some(mut mapped) = from_h.iter().map(|p| sub.map_path(p)).collect::<Option<Vec<_>>>() else {
        return Ok(false);
    };
    mapped.sort();
    let mut native = sub.quiver.paths_up_to(max_len);
    native.sort();
    Ok(mapped == native)
}

#[cfg(test)]
mod tests;
