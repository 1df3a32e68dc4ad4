//! Finite quivers, paths and hereditary saturated vertex sets.
//!
//! Vertices and edges are addressed by their position in the declared
//! order; the string ids are kept for I/O. That order is the tie-breaker
//! used everywhere downstream (canonical term order, special edges).

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported vertex count (vertex sets are 64-bit masks).
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite directed graph; loops and parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
}

// HashMap is not Hash; hash only the declared data.
impl std::hash::Hash for Quiver {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.vertices.hash(state);
        self.edges.hash(state);
    }
}

impl Quiver {
    /// Build a quiver from vertex ids and `(edge id, src id, dst id)` triples.
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S, S)>,
        S: Into<String>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        if vertices.len() > MAX_VERTICES {
            return Err(Error::InvalidQuiver(format!(
                "{} vertices exceeds the supported maximum of {MAX_VERTICES}",
                vertices.len()
            )));
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::InvalidQuiver(format!("invalid vertex id {v:?}")));
            }
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidQuiver(format!("duplicate vertex id {v:?}")));
            }
        }
        let mut out = Vec::new();
        let mut edge_index = HashMap::new();
        for (id, src, dst) in edges {
            let (id, src, dst): (String, String, String) = (id.into(), src.into(), dst.into());
            if !is_identifier(&id) {
                return Err(Error::InvalidQuiver(format!("invalid edge id {id:?}")));
            }
            let s = *vertex_index.get(&src).ok_or_else(|| {
                Error::InvalidQuiver(format!("edge {id:?} has undeclared source {src:?}"))
            })?;
            let d = *vertex_index.get(&dst).ok_or_else(|| {
                Error::InvalidQuiver(format!("edge {id:?} has undeclared range {dst:?}"))
            })?;
            if edge_index.insert(id.clone(), out.len()).is_some() {
                return Err(Error::InvalidQuiver(format!("duplicate edge id {id:?}")));
            }
            out.push(Edge { id, src: s, dst: d });
        }
        let mut out_edges = vec![Vec::new(); vertices.len()];
        for (i, e) in out.iter().enumerate() {
            out_edges[e.src].push(i);
        }
        Ok(Quiver { vertices, edges: out, vertex_index, edge_index, out_edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn src(&self, e: usize) -> usize {
        self.edges[e].src
    }

    pub fn dst(&self, e: usize) -> usize {
        self.edges[e].dst
    }

    /// Edges emitted by `v`, in declared order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn is_sink(&self, v: usize) -> bool {
        self.out_edges[v].is_empty()
    }

    pub fn emitters(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&v| !self.is_sink(v))
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn order (sources first), or `None` when a cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            indeg[e.dst] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let d = self.edges[e].dst;
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    queue.push_back(d);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Vertices reachable from `v` (including `v`), by BFS.
    pub fn reachable_from(&self, v: usize) -> VertexSet {
        let mut seen = VertexSet::empty();
        seen.insert(v);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.out_edges[u] {
                let d = self.edges[e].dst;
                if !seen.contains(d) {
                    seen.insert(d);
                    queue.push_back(d);
                }
            }
        }
        seen
    }

    /// Parse a comma separated list of vertex ids into a set.
    pub fn parse_vertex_set(&self, text: &str) -> Result<VertexSet> {
        let mut set = VertexSet::empty();
        for tok in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v = self
                .vertex(tok)
                .ok_or_else(|| Error::Parse(format!("unknown vertex {tok:?}")))?;
            set.insert(v);
        }
        Ok(set)
    }

    pub fn vertex_set_from_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<VertexSet> {
        let mut set = VertexSet::empty();
        for id in ids {
            let v = self
                .vertex(id.as_ref())
                .ok_or_else(|| Error::InvalidQuiver(format!("unknown vertex {:?}", id.as_ref())))?;
            set.insert(v);
        }
        Ok(set)
    }

    pub fn set_ids(&self, set: VertexSet) -> Vec<String> {
        set.iter().map(|v| self.vertices[v].clone()).collect()
    }

    // ---- hereditary / saturated ----

    /// Every edge leaving `h` lands in `h`.
    pub fn is_hereditary(&self, h: VertexSet) -> bool {
        self.edges.iter().all(|e| !h.contains(e.src) || h.contains(e.dst))
    }

    /// No vertex outside `h` emits edges only into `h`.
    pub fn is_saturated(&self, h: VertexSet) -> bool {
        (0..self.vertex_count()).all(|v| {
            h.contains(v)
                || self.is_sink(v)
                || self.out_edges[v].iter().any(|&e| !h.contains(self.edges[e].dst))
        })
    }

    pub fn is_hereditary_saturated(&self, h: VertexSet) -> bool {
        self.is_hereditary(h) && self.is_saturated(h)
    }

    /// Smallest hereditary saturated superset of `s`.
    pub fn hereditary_saturated_closure(&self, s: VertexSet) -> VertexSet {
        let mut h = s;
        loop {
            let mut changed = false;
            for e in &self.edges {
                if h.contains(e.src) && !h.contains(e.dst) {
                    h.insert(e.dst);
                    changed = true;
                }
            }
            for v in 0..self.vertex_count() {
                if !h.contains(v)
                    && !self.is_sink(v)
                    && self.out_edges[v].iter().all(|&e| h.contains(self.edges[e].dst))
                {
                    h.insert(v);
                    changed = true;
                }
            }
            if !changed {
                return h;
            }
        }
    }

    /// Edges with source outside `h` and range inside it.
    pub fn crossing_edges(&self, h: VertexSet) -> Vec<usize> {
        (0..self.edge_count())
            .filter(|&e| !h.contains(self.src(e)) && h.contains(self.dst(e)))
            .collect()
    }

    /// `E/H`: vertices outside `h`, edges whose range is outside `h`.
    pub fn quotient_graph(&self, h: VertexSet) -> Result<SubQuiver> {
        if !self.is_hereditary_saturated(h) {
            return Err(Error::NotHereditarySaturated(self.set_ids(h)));
        }
        Ok(self.induced(|v| !h.contains(v), |e| !h.contains(e.dst)))
    }

    /// `E_H`: vertices in `h`, edges whose source is in `h`.
    pub fn restriction_graph(&self, h: VertexSet) -> Result<SubQuiver> {
        if !self.is_hereditary(h) {
            return Err(Error::NotHereditary(self.set_ids(h)));
        }
        Ok(self.induced(|v| h.contains(v), |e| h.contains(e.src)))
    }

    fn induced(&self, keep_vertex: impl Fn(usize) -> bool, keep_edge: impl Fn(&Edge) -> bool) -> SubQuiver {
        let mut vertex_map = vec![None; self.vertex_count()];
        let mut vertices = Vec::new();
        for v in 0..self.vertex_count() {
            if keep_vertex(v) {
                vertex_map[v] = Some(vertices.len());
                vertices.push(self.vertices[v].clone());
            }
        }
        let mut edge_map = vec![None; self.edge_count()];
        let mut edges = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if keep_edge(e) {
                edge_map[i] = Some(edges.len());
                edges.push((e.id.clone(), self.vertices[e.src].clone(), self.vertices[e.dst].clone()));
            }
        }
        let quiver = Quiver::new(vertices, edges).expect("subquiver of a valid quiver is valid");
        SubQuiver { quiver, vertex_map, edge_map }
    }

    // ---- paths ----

    pub fn trivial(&self, v: usize) -> Path {
        Path::trivial(v)
    }

    /// Path along the given edges; checks composability.
    pub fn path(&self, edges: &[usize]) -> Result<Path> {
        for w in edges.windows(2) {
            if self.dst(w[0]) != self.src(w[1]) {
                return Err(Error::NotComposable(format!(
                    "{} then {}",
                    self.edges[w[0]].id, self.edges[w[1]].id
                )));
            }
        }
        match edges.first() {
            None => Err(Error::Parse("empty edge sequence".into())),
            Some(&e) => Ok(Path { start: self.src(e), edges: edges.to_vec() }),
        }
    }

    /// Path from a dotted list of edge ids, e.g. `"f.e"`.
    pub fn path_from_ids(&self, ids: &[&str]) -> Result<Path> {
        let idx = ids
            .iter()
            .map(|id| self.edge_by_id(id).ok_or_else(|| Error::Parse(format!("unknown edge {id:?}"))))
            .collect::<Result<Vec<_>>>()?;
        self.path(&idx)
    }

    pub fn path_dst(&self, p: &Path) -> usize {
        p.edges.last().map_or(p.start, |&e| self.dst(e))
    }

    /// Concatenation when `r(a) = s(b)`.
    pub fn concat(&self, a: &Path, b: &Path) -> Option<Path> {
        if self.path_dst(a) != b.start {
            return None;
        }
        let mut edges = a.edges.clone();
        edges.extend_from_slice(&b.edges);
        Some(Path { start: a.start, edges })
    }

    /// All paths of length exactly `n`, in canonical order.
    pub fn paths_of_length(&self, n: usize) -> Vec<Path> {
        let mut layer: Vec<Path> = (0..self.vertex_count()).map(Path::trivial).collect();
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &layer {
                for &e in &self.out_edges[self.path_dst(p)] {
                    let mut edges = p.edges.clone();
                    edges.push(e);
                    next.push(Path { start: p.start, edges });
                }
            }
            layer = next;
        }
        layer.sort();
        layer
    }

    /// All paths of length at most `n`, in canonical order.
    pub fn paths_up_to(&self, n: usize) -> Vec<Path> {
        (0..=n).flat_map(|k| self.paths_of_length(k)).collect()
    }

    pub fn path_vertices(&self, p: &Path) -> Vec<usize> {
        std::iter::once(p.start).chain(p.edges.iter().map(|&e| self.dst(e))).collect()
    }

    pub fn format_path(&self, p: &Path) -> String {
        if p.is_trivial() {
            format!("@{}", self.vertices[p.start])
        } else {
            p.edges.iter().map(|&e| self.edges[e].id.as_str()).collect::<Vec<_>>().join(".")
        }
    }

    // ---- lattice ----

    /// All hereditary saturated subsets, sorted by (size, members).
    pub fn enumerate_lattice(&self) -> Lattice {
        let found = if self.vertex_count() <= 20 {
            self.hs_sets_exhaustive()
        } else {
            self.hs_sets_seeded()
        };
        let mut sets: Vec<VertexSet> = found.into_iter().collect();
        sets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let index: HashMap<VertexSet, usize> = sets.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let n = sets.len();
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                meet[i][j] = index[&sets[i].intersection(sets[j])];
                join[i][j] = index[&self.hereditary_saturated_closure(sets[i].union(sets[j]))];
            }
        }
        Lattice { sets, meet, join }
    }

    fn hs_sets_exhaustive(&self) -> BTreeSet<VertexSet> {
        (0u64..(1u64 << self.vertex_count()))
            .map(VertexSet)
            .filter(|&s| self.is_hereditary_saturated(s))
            .collect()
    }

    // closures of singletons generate the lattice under meets and joins
    fn hs_sets_seeded(&self) -> BTreeSet<VertexSet> {
        let mut found = BTreeSet::new();
        found.insert(self.hereditary_saturated_closure(VertexSet::empty()));
        found.insert(self.all_vertices());
        for v in 0..self.vertex_count() {
            found.insert(self.hereditary_saturated_closure(VertexSet::singleton(v)));
        }
        loop {
            let current: Vec<VertexSet> = found.iter().copied().collect();
            let mut added = false;
            for (i, &a) in current.iter().enumerate() {
                for &b in &current[i + 1..] {
                    for c in [a.intersection(b), self.hereditary_saturated_closure(a.union(b))] {
                        added |= found.insert(c);
                    }
                }
            }
            if !added {
                return found;
            }
        }
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A subquiver together with the index maps from the parent quiver.
#[derive(Debug, Clone)]
pub struct SubQuiver {
    pub quiver: Quiver,
    pub vertex_map: Vec<Option<usize>>,
    pub edge_map: Vec<Option<usize>>,
}

impl SubQuiver {
    /// Image of a parent path, if all its edges (or its vertex) survive.
    pub fn map_path(&self, p: &Path) -> Option<Path> {
        let start = self.vertex_map[p.start]?;
        let edges = p.edges.iter().map(|&e| self.edge_map[e]).collect::<Option<Vec<_>>>()?;
        Some(Path { start, edges })
    }

    pub fn map_set(&self, s: VertexSet) -> VertexSet {
        let mut out = VertexSet::empty();
        for v in s.iter() {
            if let Some(w) = self.vertex_map[v] {
                out.insert(w);
            }
        }
        out
    }
}

/// A path: trivial at `start` when `edges` is empty.
///
/// Ordered by length, then edge indices, then start vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    start: usize,
    edges: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { start: v, edges: Vec::new() }
    }

    pub fn src(&self) -> usize {
        self.start
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn first_edge(&self) -> Option<usize> {
        self.edges.first().copied()
    }

    pub fn last_edge(&self) -> Option<usize> {
        self.edges.last().copied()
    }

    /// Drops the first edge; `q` is needed for the new start vertex.
    pub fn strip_first(&self, q: &Quiver) -> Option<Path> {
        let (&e, rest) = self.edges.split_first()?;
        Some(Path { start: q.dst(e), edges: rest.to_vec() })
    }

    /// Drops the last edge.
    pub fn strip_last(&self) -> Option<Path> {
        let (_, rest) = self.edges.split_last()?;
        Some(Path { start: self.start, edges: rest.to_vec() })
    }

    /// The remainder after a prefix, if `prefix` is one.
    pub fn strip_prefix(&self, prefix: &Path, q: &Quiver) -> Option<Path> {
        if prefix.start != self.start || !self.edges.starts_with(&prefix.edges) {
            return None;
        }
        Some(Path { start: q.path_dst(prefix), edges: self.edges[prefix.edges.len()..].to_vec() })
    }
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.edges.cmp(&other.edges))
            .then_with(|| self.start.cmp(&other.start))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Set of vertex indices, as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(u64);

impl VertexSet {
    pub fn empty() -> Self {
        VertexSet(0)
    }

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1 << v;
    }

    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1 << v);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        VertexSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        VertexSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        VertexSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&v| self.contains(v))
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = VertexSet::empty();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

/// The lattice of hereditary saturated subsets with meet/join tables
/// (indices into `sets`).
#[derive(Debug, Clone)]
pub struct Lattice {
    pub sets: Vec<VertexSet>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn position(&self, s: VertexSet) -> Option<usize> {
        self.sets.iter().position(|&t| t == s)
    }
}

/// A strictly increasing chain `H_0 ⊂ … ⊂ H_r = E⁰` of hereditary
/// saturated sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HereditaryChain {
    sets: Vec<VertexSet>,
}

impl HereditaryChain {
    pub fn new(q: &Quiver, sets: Vec<VertexSet>) -> Result<Self> {
        let last = *sets.last().ok_or_else(|| Error::InvalidChain("empty chain".into()))?;
        if last != q.all_vertices() {
            return Err(Error::InvalidChain("last member must be the full vertex set".into()));
        }
        for (i, &h) in sets.iter().enumerate() {
            if !q.is_hereditary_saturated(h) {
                return Err(Error::InvalidChain(format!(
                    "member {i} {:?} is not hereditary saturated",
                    q.set_ids(h)
                )));
            }
            if i > 0 && !(sets[i - 1].is_subset(h) && sets[i - 1] != h) {
                return Err(Error::InvalidChain(format!("member {i} does not strictly contain member {}", i - 1)));
            }
        }
        Ok(HereditaryChain { sets })
    }

    /// The one-step chain `E⁰`.
    pub fn trivial(q: &Quiver) -> Self {
        HereditaryChain { sets: vec![q.all_vertices()] }
    }

    /// Chain length `r` (number of members minus one).
    pub fn length(&self) -> usize {
        self.sets.len() - 1
    }

    pub fn sets(&self) -> &[VertexSet] {
        &self.sets
    }

    pub fn get(&self, i: usize) -> VertexSet {
        self.sets[i]
    }

    /// Least `i` with `v ∈ H_i`.
    pub fn depth(&self, v: usize) -> usize {
        self.sets.iter().position(|h| h.contains(v)).expect("H_r contains every vertex")
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}
