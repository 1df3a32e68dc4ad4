//! JSON file formats: quivers (with optional chain and tower) and element
//! files.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::context::{Ctx, MixedContext};
use crate::error::{Error, Result};
use crate::quiver::{HereditaryChain, Quiver};
use crate::samples::Sample;
use crate::tower::{Tower, TowerSpec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// `{"vertices": [..], "edges": [{"id", "src", "dst"}], "chain": [[..], ..], "tower": {..}}`.
/// Without a chain the algebra is unmixed (`H_0 = E⁰`); without a tower the
/// coefficients are rational at every level. An optional `"window": [a, b]`
/// keeps only `K_a ⊆ … ⊆ K_b` of the tower, as produced by cuts and corners.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverFile {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tower: Option<TowerSpec>,
    /// Use only the levels `K_a ⊆ … ⊆ K_b` of the tower.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[usize; 2]>,
}

impl QuiverFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<FsPath>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_quiver(q: &Quiver) -> Self {
        QuiverFile {
            vertices: q.vertex_ids().to_vec(),
            edges: q
                .edges()
                .iter()
                .map(|e| EdgeSpec { id: e.id.clone(), src: q.vertex_id(e.src).into(), dst: q.vertex_id(e.dst).into() })
                .collect(),
            chain: None,
            tower: None,
            window: None,
        }
    }

    pub fn from_sample(s: &Sample) -> Self {
        let q = &s.quiver;
        QuiverFile {
            chain: Some(s.chain.sets().iter().map(|&h| q.set_ids(h)).collect()),
            tower: Some(s.tower.clone()),
            ..Self::from_quiver(q)
        }
    }

    /// The file describing `ctx`. Contexts whose level sets do not form a
    /// strict chain (some quotients) have no file form for their levels;
    /// chain and tower are then left out.
    pub fn from_context(ctx: &Ctx) -> Self {
        let q = ctx.quiver();
        match ctx.chain() {
            Some(chain) => QuiverFile {
                chain: Some(chain.sets().iter().map(|&h| q.set_ids(h)).collect()),
                tower: Some(ctx.tower().spec().clone()),
                window: ctx.tower().window_bounds().map(|(a, b)| [a, b]),
                ..Self::from_quiver(q)
            },
            None => Self::from_quiver(q),
        }
    }

    pub fn quiver(&self) -> Result<Quiver> {
        Quiver::new(
            self.vertices.iter().cloned(),
            self.edges.iter().map(|e| (e.id.clone(), e.src.clone(), e.dst.clone())),
        )
    }

    pub fn chain(&self, q: &Quiver) -> Result<HereditaryChain> {
        match &self.chain {
            None => Ok(HereditaryChain::trivial(q)),
            Some(sets) => {
                let sets = sets.iter().map(|ids| q.vertex_set_from_ids(ids)).collect::<Result<Vec<_>>>()?;
                HereditaryChain::new(q, sets)
            }
        }
    }

    pub fn tower(&self, chain: &HereditaryChain) -> Result<Tower> {
        let spec = self.tower.clone().unwrap_or(TowerSpec::Constant { p: 0, levels: chain.length() });
        let tower = spec.build()?;
        match self.window {
            Some([a, b]) => tower.window(a, b),
            None => Ok(tower),
        }
    }

    pub fn context(&self) -> Result<Ctx> {
        let q = self.quiver()?;
        let chain = self.chain(&q)?;
        let tower = self.tower(&chain)?;
        MixedContext::new(q, &chain, tower)
    }
}
