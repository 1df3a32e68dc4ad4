//! The data an element lives over: quiver, per-vertex coefficient
//! levels, and the field chain.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quiver::{HereditaryChain, Path, Quiver, SubQuiver, VertexSet};
use crate::tower::{Tower, TowerElement};

/// Coefficient level of every vertex: `lev(v) = r − min{i : v ∈ H_i}`.
///
/// Built from a chain of hereditary saturated sets. User chains are
/// strict; quotients by arbitrary hereditary saturated sets produce
/// non-strict chains, which are allowed here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelAssignment {
    sets: Vec<VertexSet>,
    levels: Vec<usize>,
}

impl LevelAssignment {
    pub fn from_chain(q: &Quiver, chain: &HereditaryChain) -> Self {
        Self::from_sets(q, chain.sets().to_vec())
    }

    /// `sets` must be an increasing family of hereditary saturated sets
    /// ending in the full vertex set.
    pub fn from_sets(q: &Quiver, sets: Vec<VertexSet>) -> Self {
        let r = sets.len() - 1;
        let levels = (0..q.vertex_count())
            .map(|v| r - sets.iter().position(|h| h.contains(v)).expect("last set is everything"))
            .collect();
        LevelAssignment { sets, levels }
    }

    pub fn level(&self, v: usize) -> usize {
        self.levels[v]
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn sets(&self) -> &[VertexSet] {
        &self.sets
    }

    /// Chain length `r`.
    pub fn top(&self) -> usize {
        self.sets.len() - 1
    }

    /// `lev(s(e)) ≤ lev(r(e))` for every edge.
    pub fn is_antitone(&self, q: &Quiver) -> bool {
        q.edges().iter().all(|e| self.levels[e.src] <= self.levels[e.dst])
    }
}

/// Quiver, chain-derived levels and tower shared by a family of elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MixedContext {
    quiver: Quiver,
    levels: LevelAssignment,
    tower: Tower,
}

pub type Ctx = Arc<MixedContext>;

impl MixedContext {
    pub fn new(quiver: Quiver, chain: &HereditaryChain, tower: Tower) -> Result<Ctx> {
        let levels = LevelAssignment::from_chain(&quiver, chain);
        Self::with_levels(quiver, levels, tower)
    }

    /// Unmixed algebra: a one-member chain over the top field of `tower`.
    pub fn unmixed(quiver: Quiver, tower: Tower) -> Result<Ctx> {
        let chain = HereditaryChain::trivial(&quiver);
        let top = tower.top();
        Self::new(quiver, &chain, tower.window(top, top)?)
    }

    pub fn with_levels(quiver: Quiver, levels: LevelAssignment, tower: Tower) -> Result<Ctx> {
        if levels.top() != tower.top() {
            return Err(Error::InvalidChain(format!(
                "chain has length {} but the tower has {} levels",
                levels.top(),
                tower.level_count()
            )));
        }
        debug_assert!(levels.is_antitone(&quiver));
        Ok(Arc::new(MixedContext { quiver, levels, tower }))
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn levels(&self) -> &LevelAssignment {
        &self.levels
    }

    pub fn lev(&self, v: usize) -> usize {
        self.levels.level(v)
    }

    /// The strict chain, when the level sets form one.
    pub fn chain(&self) -> Option<HereditaryChain> {
        HereditaryChain::new(&self.quiver, self.levels.sets.clone()).ok()
    }

    /// Level constraint for a coefficient sitting at vertex `v`.
    pub fn check_level(&self, at: usize, c: &TowerElement, what: impl FnOnce() -> String) -> Result<()> {
        if c.tower() != &self.tower {
            return Err(Error::TowerMismatch);
        }
        let required = self.lev(at);
        if c.membership_at_level(required) {
            Ok(())
        } else {
            Err(Error::LevelViolation { path: what(), coefficient_level: c.level(), required_level: required })
        }
    }

    pub fn path_level(&self, p: &Path) -> usize {
        self.lev(self.quiver.path_dst(p))
    }

    /// Context over `E/H` with the same tower. The level sets are
    /// `(H_j ∨ H) ∖ H`, which may repeat; levels can only grow, so every
    /// coefficient that survives the quotient stays admissible.
    pub fn quotient(&self, h: VertexSet) -> Result<(Ctx, SubQuiver)> {
        let sub = self.quiver.quotient_graph(h)?;
        let sets = self
            .levels
            .sets()
            .iter()
            .map(|&hj| sub.map_set(self.quiver.hereditary_saturated_closure(hj.union(h)).difference(h)))
            .collect();
        let levels = LevelAssignment::from_sets(&sub.quiver, sets);
        let ctx = Self::with_levels(sub.quiver.clone(), levels, self.tower.clone())?;
        Ok((ctx, sub))
    }

    /// Context over `E_H` (`H` hereditary) with the same tower and the
    /// level sets `H_j ∩ H`; every vertex keeps its level.
    pub fn restriction(&self, h: VertexSet) -> Result<(Ctx, SubQuiver)> {
        let sub = self.quiver.restriction_graph(h)?;
        let sets = self.levels.sets().iter().map(|&hj| sub.map_set(hj.intersection(h))).collect();
        let levels = LevelAssignment::from_sets(&sub.quiver, sets);
        let ctx = Self::with_levels(sub.quiver.clone(), levels, self.tower.clone())?;
        Ok((ctx, sub))
    }
}
