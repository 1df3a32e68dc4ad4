//! Small quivers with chains and towers, used by the corpus, the tests
//! and the command line.

use crate::context::{Ctx, MixedContext};
use crate::error::Result;
use crate::quiver::{HereditaryChain, Quiver};
use crate::series::RepFile;
use crate::tower::TowerSpec;

#[derive(Debug, Clone)]
pub struct Sample {
    pub name: &'static str,
    pub quiver: Quiver,
    pub chain: HereditaryChain,
    pub tower: TowerSpec,
    /// Linear representations `(λ, B, ρ)` in the element text format.
    pub reps: Vec<RepFile>,
}

impl Sample {
    fn new(
        name: &'static str,
        vertices: &[&str],
        edges: &[(&str, &str, &str)],
        chain: &[&[&str]],
        tower: TowerSpec,
    ) -> Self {
        let quiver = Quiver::new(vertices.iter().copied(), edges.iter().copied()).expect("sample quiver");
        let sets = chain.iter().map(|ids| quiver.vertex_set_from_ids(ids).expect("sample ids")).collect();
        let chain = HereditaryChain::new(&quiver, sets).expect("sample chain");
        Sample { name, quiver, chain, tower, reps: Vec::new() }
    }

    fn rep(mut self, lambda: &[&str], b: &[&[&str]], rho: &[&str]) -> Self {
        let own = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        self.reps.push(RepFile { lambda: own(lambda), b: b.iter().map(|r| own(r)).collect(), rho: own(rho) });
        self
    }

    pub fn ctx(&self) -> Result<Ctx> {
        MixedContext::new(self.quiver.clone(), &self.chain, self.tower.build()?)
    }
}

fn f2_chain(degrees: &[u32]) -> TowerSpec {
    TowerSpec::FiniteField { p: 2, degrees: degrees.to_vec() }
}

/// Two vertices, no edges.
pub fn edgeless() -> Sample {
    Sample::new("edgeless", &["1", "2"], &[], &[&["1"], &["1", "2"]], f2_chain(&[1, 2]))
        .rep(&["@1", "@2"], &[&["0", "0"], &["0", "0"]], &["w * @1", "@2"])
}

/// `1 → 2`.
pub fn a2() -> Sample {
    Sample::new("a2", &["1", "2"], &[("a", "1", "2")], &[&["1", "2"]], TowerSpec::Constant { p: 0, levels: 0 })
        .rep(&["@1", "0"], &[&["0", "a"], &["0", "0"]], &["@1", "@2"])
        .rep(&["@1 + @2"], &[&["-1/2 * a"]], &["3 * @2"])
}

/// `f: 1 → 1`, `e: 1 → 2`, chain `{2} ⊂ {1, 2}`, `F_2 ⊆ F_4`.
pub fn toeplitz() -> Sample {
    Sample::new(
        "toeplitz",
        &["1", "2"],
        &[("f", "1", "1"), ("e", "1", "2")],
        &[&["2"], &["1", "2"]],
        f2_chain(&[1, 2]),
    )
    .rep(&["@1", "0"], &[&["f", "e"], &["0", "0"]], &["@1", "@2"])
    .rep(&["@1", "w * e"], &[&["f + f.f", "w * e"], &["0", "0"]], &["@1 + e", "(w + 1) * @2"])
}

/// The same quiver with the edge into the smaller set declared first.
pub fn toeplitz_swapped() -> Sample {
    Sample::new(
        "toeplitz_swapped",
        &["1", "2"],
        &[("e", "1", "2"), ("f", "1", "1")],
        &[&["2"], &["1", "2"]],
        TowerSpec::RationalFunction { levels: 1 },
    )
    .rep(&["@1", "t1 * e"], &[&["f", "t1 * e"], &["0", "0"]], &["@1", "(t1 + 1)/(t1 - 1) * @2"])
}

/// One vertex with loops `a`, `b`.
pub fn rose() -> Sample {
    Sample::new("rose", &["v"], &[("a", "v", "v"), ("b", "v", "v")], &[&["v"]], TowerSpec::Constant { p: 3, levels: 0 })
        .rep(&["@v"], &[&["a"]], &["@v"])
        .rep(&["@v", "2 * @v"], &[&["a", "b"], &["b", "2 * a.b"]], &["@v", "a"])
}

/// `1 → 2 → 3`.
pub fn chain3() -> Sample {
    Sample::new(
        "chain3",
        &["1", "2", "3"],
        &[("a", "1", "2"), ("b", "2", "3")],
        &[&[], &["1", "2", "3"]],
        TowerSpec::RationalFunction { levels: 1 },
    )
    .rep(&["@1", "0", "0"], &[&["0", "a", "0"], &["0", "0", "b"], &["0", "0", "0"]], &["@1", "@2", "@3"])
    .rep(&["@1 + 2 * a"], &[&["1/2 * a.b"]], &["@3"])
}

/// A 2-cycle `1 ⇄ 2` feeding `3 → 4` with a loop at 4.
pub fn cycle_tail() -> Sample {
    Sample::new(
        "cycle_tail",
        &["1", "2", "3", "4"],
        &[("a", "1", "2"), ("b", "2", "1"), ("c", "2", "3"), ("d", "3", "4"), ("g", "4", "4")],
        &[&[], &["3", "4"], &["1", "2", "3", "4"]],
        f2_chain(&[1, 2, 4]),
    )
    .rep(&["@1 + @2", "@3 + @4"], &[&["a.b + b.a", "w^5 * c.d"], &["0", "w^5 * g"]], &["@1 + @2", "@4"])
    .rep(&["@1"], &[&["a + b + c + g"]], &["@1 + @2 + @4"])
}

pub fn all() -> Vec<Sample> {
    vec![edgeless(), a2(), toeplitz(), toeplitz_swapped(), rose(), chain3(), cycle_tail()]
}

pub fn by_name(name: &str) -> Option<Sample> {
    all().into_iter().find(|s| s.name == name)
}
