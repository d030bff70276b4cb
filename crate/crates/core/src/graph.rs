// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Simple undirected graphs over dense ids `0..n`, vertex sets, partitions,
//! and the counting primitives everything else is built from.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::rational::Q;

pub type Edge = (usize, usize);

/// Immutable simple graph. Adjacency lists are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n(),
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        Graph::from_edges(raw.n, raw.edges.iter().map(|e| (e[0], e[1])))
            .map_err(serde::de::Error::custom)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect();
        Graph { adj, m: n * n.saturating_sub(1) / 2 }
    }

    /// Strict constructor: rejects loops, repeated edges and out-of-range ids.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u},{v}) out of range for n={n}"));
            }
            if u == v {
                return input(format!("self-loop at {u}"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m = 0;
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return input(format!("repeated edge at vertex {v}"));
            }
            m += list.len();
        }
        Ok(Graph { adj, m: m / 2 })
    }

    /// Lenient constructor for internal use: drops loops and duplicates.
    pub fn from_edges_lossy(n: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u != v && u < n && v < n {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        let mut m = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Graph { adj, m: m / 2 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.m);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list.iter().filter(|&&v| v > u) {
                out.push((u, v));
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `None` stands for the zero-vertex graph, whose minimum degree is infinite.
    pub fn min_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).min()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Number of neighbours of `v` whose mask entry is set.
    pub fn degree_into(&self, v: usize, mask: &[bool]) -> usize {
        self.adj[v].iter().filter(|&&u| mask[u]).count()
    }

    pub fn without_edges(&self, removed: &[Edge]) -> Graph {
        let mut gone: Vec<Edge> = removed.iter().map(|&(u, v)| norm(u, v)).collect();
        gone.sort_unstable();
        gone.dedup();
        let keep = self.edges().into_iter().filter(|e| gone.binary_search(e).is_err());
        Graph::from_edges_lossy(self.n(), keep)
    }

    pub fn with_edges(&self, extra: &[Edge]) -> Graph {
        let all = self.edges().into_iter().chain(extra.iter().copied());
        Graph::from_edges_lossy(self.n(), all)
    }

    /// Removes every edge touching `vs`; ids are kept.
    pub fn isolate(&self, vs: &VertexSet) -> Graph {
        let mask = vs.mask(self.n());
        let keep = self.edges().into_iter().filter(|&(u, v)| !mask[u] && !mask[v]);
        Graph::from_edges_lossy(self.n(), keep)
    }

    /// Keeps only edges with both ends in `vs`; ids are kept.
    pub fn induced(&self, vs: &VertexSet) -> Graph {
        let mask = vs.mask(self.n());
        let keep = self.edges().into_iter().filter(|&(u, v)| mask[u] && mask[v]);
        Graph::from_edges_lossy(self.n(), keep)
    }

    pub fn non_isolated(&self) -> VertexSet {
        VertexSet::from_sorted((0..self.n()).filter(|&v| self.degree(v) > 0).collect())
    }

    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n() == other.n() && self.edges().into_iter().all(|(u, v)| other.has_edge(u, v))
    }

    /// Edges of `self` that are not in `other` (same id space).
    pub fn edge_difference(&self, other: &Graph) -> Vec<Edge> {
        self.edges().into_iter().filter(|&(u, v)| !other.has_edge(u, v)).collect()
    }

    pub fn union(&self, other: &Graph) -> Graph {
        let n = self.n().max(other.n());
        Graph::from_edges_lossy(n, self.edges().into_iter().chain(other.edges()))
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::from_sorted((0..self.n()).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

pub fn norm(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VertexSet(Vec<usize>);

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = String;

    fn try_from(items: Vec<usize>) -> std::result::Result<Self, String> {
        let len = items.len();
        let set = VertexSet::new(items);
        if set.len() != len {
            return Err("vertex set lists a vertex twice".into());
        }
        Ok(set)
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Self {
        s.0
    }
}

impl VertexSet {
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }

    /// Caller guarantees `items` is strictly increasing.
    pub fn from_sorted(items: Vec<usize>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        VertexSet(items)
    }

    pub fn empty() -> Self {
        VertexSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n.max(self.max().map_or(0, |x| x + 1))];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::new(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_sorted(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_sorted(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().all(|v| !big.contains(v))
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().filter(|&v| big.contains(v)).count()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter)
    }
}

/// Partition of a ground set into nonempty disjoint blocks. Blocks are stored
/// sorted by their smallest element so that equal partitions compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexSet>", into = "Vec<VertexSet>")]
pub struct Partition {
    blocks: Vec<VertexSet>,
}

impl TryFrom<Vec<VertexSet>> for Partition {
    type Error = crate::error::Error;
    fn try_from(blocks: Vec<VertexSet>) -> Result<Self> {
        Partition::new(blocks)
    }
}

impl From<Partition> for Vec<VertexSet> {
    fn from(p: Partition) -> Self {
        p.blocks
    }
}

impl Partition {
    pub fn new(blocks: Vec<VertexSet>) -> Result<Self> {
        if blocks.iter().any(VertexSet::is_empty) {
            return input("partition has an empty block");
        }
        let total: usize = blocks.iter().map(VertexSet::len).sum();
        let ground = VertexSet::new(blocks.iter().flat_map(|b| b.iter()));
        if ground.len() != total {
            return input("partition blocks overlap");
        }
        let mut blocks = blocks;
        blocks.sort_by_key(|b| b.min());
        Ok(Partition { blocks })
    }

    /// Single-block partition of `ground` (no blocks when `ground` is empty).
    pub fn trivial(ground: VertexSet) -> Self {
        let blocks = if ground.is_empty() { Vec::new() } else { vec![ground] };
        Partition { blocks }
    }

    /// Groups `ground` by a key; blocks of equal key are merged.
    pub fn by_key<K: Ord>(ground: &VertexSet, key: impl Fn(usize) -> K) -> Self {
        let mut groups: BTreeMap<K, Vec<usize>> = BTreeMap::new();
        for v in ground.iter() {
            groups.entry(key(v)).or_default().push(v);
        }
        let mut blocks: Vec<VertexSet> = groups.into_values().map(VertexSet::from_sorted).collect();
        blocks.sort_by_key(|b| b.min());
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ground(&self) -> VertexSet {
        VertexSet::new(self.blocks.iter().flat_map(|b| b.iter()))
    }

    /// Index of the block containing each vertex of the ground set.
    pub fn labels(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for (i, b) in self.blocks.iter().enumerate() {
            for v in b.iter() {
                out.insert(v, i);
            }
        }
        out
    }

    /// True when every block of `self` lies inside one block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.ground() != coarser.ground() {
            return false;
        }
        let labels = coarser.labels();
        self.blocks.iter().all(|b| {
            let first = labels[&b.as_slice()[0]];
            b.iter().all(|v| labels[&v] == first)
        })
    }
}

/// Coarsest common refinement: all nonempty `X ∩ Y`.
pub fn common_refinement(p: &Partition, q: &Partition) -> Result<Partition> {
    if p.ground() != q.ground() {
        return input("partitions have different ground sets");
    }
    let lp = p.labels();
    let lq = q.labels();
    Ok(Partition::by_key(&p.ground(), |v| (lp[&v], lq[&v])))
}

fn check_range(g: &Graph, s: &VertexSet) -> Result<()> {
    match s.max() {
        Some(v) if v >= g.n() => input(format!("vertex {v} out of range for n={}", g.n())),
        _ => Ok(()),
    }
}

/// `e(X, Y)`: ordered pairs `(x, y)` in `X × Y` that are edges. Overlap allowed.
pub fn ordered_pair_count(g: &Graph, x: &VertexSet, y: &VertexSet) -> Result<u64> {
    check_range(g, x)?;
    check_range(g, y)?;
    Ok(pair_count_unchecked(g, x, &y.mask(g.n())))
}

pub(crate) fn pair_count_unchecked(g: &Graph, x: &VertexSet, ymask: &[bool]) -> u64 {
    x.iter().map(|v| g.degree_into(v, ymask) as u64).sum()
}

/// `d(U, W) = e(U, W) / (|U||W|)` for disjoint nonempty sets.
pub fn density(g: &Graph, u: &VertexSet, w: &VertexSet) -> Result<Q> {
    if u.is_empty() || w.is_empty() {
        return input("density needs nonempty sets");
    }
    if !u.is_disjoint(w) {
        return input("density needs disjoint sets");
    }
    let e = ordered_pair_count(g, u, w)?;
    Ok(Q::new((e as i64).into(), ((u.len() * w.len()) as i64).into()))
}

/// Vertex set of the `ell`-core: what survives repeatedly deleting vertices of
/// degree `< ell`. The core is unique, so the peel order does not matter.
pub fn core_vertices(g: &Graph, ell: usize) -> VertexSet {
    core_vertices_in_order(g, ell, &(0..g.n()).collect::<Vec<_>>())
}

/// Same as [`core_vertices`], deleting candidates in the given priority order.
pub fn core_vertices_in_order(g: &Graph, ell: usize, order: &[usize]) -> VertexSet {
    let n = g.n();
    let mut deg = g.degrees();
    let mut alive = vec![true; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::new();
    for &v in order {
        if deg[v] < ell && !queued[v] {
            queued[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        alive[v] = false;
        for &u in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                if deg[u] < ell && !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    VertexSet::from_sorted((0..n).filter(|&v| alive[v]).collect())
}

/// The `ell`-core as a graph on the same ids; vertices outside the core are
/// left isolated. Satisfies `e(core) >= e(g) - (ell - 1) n`.
pub fn min_degree_subgraph(g: &Graph, ell: usize) -> Graph {
    g.induced(&core_vertices(g, ell))
}

/// Connected components restricted to `within`, each sorted, ordered by minimum.
pub fn components(g: &Graph, within: &VertexSet) -> Vec<VertexSet> {
    let mask = within.mask(g.n());
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in within.iter() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for &u in g.neighbors(v) {
                if mask[u] && !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                }
            }
        }
        out.push(VertexSet::new(comp));
    }
    out
}
