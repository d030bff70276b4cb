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

//! Rooted trees, canonical forms and small-tree enumeration.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Edge, Graph};

/// A tree on vertices `0..k` stored as a parent array; the root has parent
/// `None`. JSON: `{"k": 3, "parent": [null, 0, 1], "root": 0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    root: usize,
    children: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawTree {
    k: usize,
    parent: Vec<Option<usize>>,
    root: usize,
}

impl TryFrom<RawTree> for RootedTree {
    type Error = Error;
    fn try_from(r: RawTree) -> Result<Self> {
        if r.parent.len() != r.k {
            return input(format!("tree has k = {} but {} parent entries", r.k, r.parent.len()));
        }
        RootedTree::new(r.parent, r.root)
    }
}

impl From<RootedTree> for RawTree {
    fn from(t: RootedTree) -> Self {
        RawTree { k: t.k(), parent: t.parent, root: t.root }
    }
}

impl RootedTree {
    pub fn new(parent: Vec<Option<usize>>, root: usize) -> Result<Self> {
        let k = parent.len();
        if k == 0 {
            return input("a tree needs at least one vertex");
        }
        if root >= k || parent[root].is_some() {
            return input("root must exist and have no parent");
        }
        let mut children = vec![Vec::new(); k];
        for (v, p) in parent.iter().enumerate() {
            match p {
                None if v != root => return input(format!("vertex {v} has no parent but is not the root")),
                Some(p) if *p >= k || *p == v => return input(format!("vertex {v} has invalid parent")),
                Some(p) => children[*p].push(v),
                None => {}
            }
        }
        let t = RootedTree { parent, root, children };
        if t.bfs_order().len() != k {
            return input("parent array contains a cycle");
        }
        Ok(t)
    }

    /// Roots the tree with the given edge list at `root`.
    pub fn from_edges(k: usize, edges: &[Edge], root: usize) -> Result<Self> {
        if k == 0 || edges.len() + 1 != k {
            return input("a tree on k vertices has k-1 edges");
        }
        let g = Graph::from_edges(k, edges.iter().copied())?;
        if root >= k {
            return input("root out of range");
        }
        let mut parent = vec![None; k];
        let mut seen = vec![false; k];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    queue.push_back(u);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return input("edges do not form a connected tree");
        }
        RootedTree::new(parent, root)
    }

    pub fn single() -> Self {
        RootedTree::new(vec![None], 0).unwrap()
    }

    /// Path `0 - 1 - ... - (k-1)` rooted at 0.
    pub fn path(k: usize) -> Result<Self> {
        if k == 0 {
            return input("a tree needs at least one vertex");
        }
        RootedTree::new((0..k).map(|v| v.checked_sub(1)).collect(), 0)
    }

    /// Star with centre 0 and `k-1` leaves.
    pub fn star(k: usize) -> Result<Self> {
        if k == 0 {
            return input("a tree needs at least one vertex");
        }
        RootedTree::new((0..k).map(|v| if v == 0 { None } else { Some(0) }).collect(), 0)
    }

    /// Complete binary tree of the given depth (depth 0 is a single vertex),
    /// vertices numbered in heap order.
    pub fn complete_binary(depth: u32) -> Self {
        let k = (1usize << (depth + 1)) - 1;
        RootedTree::new((0..k).map(|v| if v == 0 { None } else { Some((v - 1) / 2) }).collect(), 0).unwrap()
    }

    pub fn k(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn max_degree(&self) -> usize {
        (0..self.k()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut e: Vec<Edge> =
            (0..self.k()).filter_map(|v| self.parent[v].map(|p| crate::graph::norm(p, v))).collect();
        e.sort_unstable();
        e
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_edges_lossy(self.k(), self.edges())
    }

    pub fn bfs_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.k());
        let mut queue = VecDeque::from([self.root]);
        let mut seen = vec![false; self.k()];
        seen[self.root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &self.children[v] {
                if !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        order
    }

    pub fn depth(&self, v: usize) -> usize {
        let mut d = 0;
        let mut x = v;
        while let Some(p) = self.parent[x] {
            d += 1;
            x = p;
        }
        d
    }

    /// Size of the subtree hanging from each vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.k()];
        for &v in self.bfs_order().iter().rev() {
            if let Some(p) = self.parent[v] {
                size[p] += size[v];
            }
        }
        size
    }

    /// Maximum independent set size (leaf-up dynamic programme).
    pub fn independence_number(&self) -> usize {
        let mut take = vec![1usize; self.k()];
        let mut skip = vec![0usize; self.k()];
        for &v in self.bfs_order().iter().rev() {
            for &c in &self.children[v] {
                take[v] += skip[c];
                skip[v] += take[c].max(skip[c]);
            }
        }
        take[self.root].max(skip[self.root])
    }

    /// One or two centre vertices (repeated leaf stripping).
    pub fn centers(&self) -> Vec<usize> {
        let k = self.k();
        if k <= 2 {
            return (0..k).collect();
        }
        let mut deg: Vec<usize> = (0..k).map(|v| self.degree(v)).collect();
        let g = self.to_graph();
        let mut layer: Vec<usize> = (0..k).filter(|&v| deg[v] == 1).collect();
        let mut remaining = k;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &v in &layer {
                for &u in g.neighbors(v) {
                    deg[u] -= 1;
                    if deg[u] == 1 {
                        next.push(u);
                    }
                }
            }
            layer = next;
        }
        layer.sort_unstable();
        layer
    }

    /// Isomorphism-invariant encoding of the unrooted tree: the smallest AHU
    /// code over the (one or two) centres.
    pub fn canonical_form(&self) -> String {
        let g = self.to_graph();
        self.centers().into_iter().map(|c| ahu(&g, c, usize::MAX)).min().unwrap()
    }
}

fn ahu(g: &Graph, v: usize, from: usize) -> String {
    let mut codes: Vec<String> = g.neighbors(v).iter().filter(|&&u| u != from).map(|&u| ahu(g, u, v)).collect();
    codes.sort_unstable();
    let mut s = String::with_capacity(2 + codes.iter().map(String::len).sum::<usize>());
    s.push('(');
    for c in codes {
        s.push_str(&c);
    }
    s.push(')');
    s
}

/// Decodes a Prüfer sequence of length `k-2` over `0..k` into tree edges.
pub fn prufer_decode(seq: &[usize], k: usize) -> Result<Vec<Edge>> {
    if k < 2 || seq.len() + 2 != k || seq.iter().any(|&x| x >= k) {
        return input("Prüfer sequence must have length k-2 over 0..k");
    }
    let mut deg = vec![1usize; k];
    for &x in seq {
        deg[x] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..k).filter(|&v| deg[v] == 1).collect();
    let mut edges = Vec::with_capacity(k - 1);
    for &x in seq {
        let leaf = leaves.pop_first().unwrap();
        edges.push(crate::graph::norm(leaf, x));
        deg[x] -= 1;
        if deg[x] == 1 {
            leaves.insert(x);
        }
    }
    let a = leaves.pop_first().unwrap();
    let b = leaves.pop_first().unwrap();
    edges.push((a, b));
    Ok(edges)
}

/// Largest order accepted by [`all_trees`].
pub const ALL_TREES_CAP: usize = 10;

/// All trees of order `k` up to isomorphism, rooted at their smallest centre,
/// sorted by canonical form. Trees of order `k` are grown from those of order
/// `k-1` by attaching a leaf anywhere and deduplicated by canonical form.
pub fn all_trees(k: usize) -> Result<Vec<RootedTree>> {
    if k == 0 {
        return input("tree order must be at least 1");
    }
    if k > ALL_TREES_CAP {
        return Err(Error::OverCap(format!("all_trees is capped at order {ALL_TREES_CAP}, got {k}")));
    }
    let mut level: Vec<(String, Vec<Edge>)> = vec![(RootedTree::single().canonical_form(), Vec::new())];
    for order in 2..=k {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for (_, edges) in &level {
            for attach in 0..order - 1 {
                let mut e = edges.clone();
                e.push((attach, order - 1));
                let t = RootedTree::from_edges(order, &e, 0)?;
                let code = t.canonical_form();
                if seen.insert(code.clone()) {
                    next.push((code, e));
                }
            }
        }
        level = next;
    }
    level.sort();
    level
        .into_iter()
        .map(|(_, e)| {
            let t = RootedTree::from_edges(k, &e, 0)?;
            RootedTree::from_edges(k, &e, t.centers()[0])
        })
        .collect()
}
