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


use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::VertexSet;
use crate::rational::{floor_u64, is_positive, one, qu, Q};
use crate::report::ClauseReport;
use crate::tree::RootedTree;

/// A component of `T - W`. `root` is its vertex closest to the tree root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shrub {
    pub root: usize,
    pub vertices: VertexSet,
    /// Cut vertices adjacent to the shrub.
    pub cut_neighbours: VertexSet,
}

impl Shrub {
    /// An end shrub touches at most one cut vertex.
    pub fn is_end(&self) -> bool {
        self.cut_neighbours.len() <= 1
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    /// The shrub as a tree rooted at `root`, plus the local-to-global map.
    pub fn as_tree(&self, t: &RootedTree) -> (RootedTree, Vec<usize>) {
        let mut global = vec![self.root];
        let mut parent = vec![None];
        let mut i = 0;
        while i < global.len() {
            let v = global[i];
            for &c in t.children(v) {
                if self.vertices.contains(c) {
                    parent.push(Some(i));
                    global.push(c);
                }
            }
            i += 1;
        }
        let tree = RootedTree::new(parent, 0).expect("a shrub is a subtree hanging from its root");
        (tree, global)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShrubDecomposition {
    pub cut_vertices: VertexSet,
    pub shrubs: Vec<Shrub>,
}

impl ShrubDecomposition {
    /// Clauses `partition`, `components`, `order` and `roots`.
    pub fn check(&self, t: &RootedTree, tau: &Q, k: usize) -> ClauseReport {
        let mut r = ClauseReport::new();
        let kt = t.k();
        let mut owner = vec![usize::MAX; kt];
        let mut disjoint = self.cut_vertices.as_slice().last().is_none_or(|&v| v < kt);
        for v in self.cut_vertices.iter().filter(|&v| v < kt) {
            owner[v] = usize::MAX - 1;
        }
        for (i, s) in self.shrubs.iter().enumerate() {
            for v in s.vertices.iter() {
                if v >= kt || owner[v] != usize::MAX {
                    disjoint = false;
                } else {
                    owner[v] = i;
                }
            }
        }
        r.clause("partition", disjoint && owner.iter().all(|&o| o != usize::MAX));
        // Every tree edge outside W stays inside one shrub, and each shrub is
        // connected (a subtree has one vertex whose parent lies outside it).
        let edges_ok = disjoint
            && t.edges().iter().all(|&(a, b)| {
                owner[a] == usize::MAX - 1 || owner[b] == usize::MAX - 1 || owner[a] == owner[b]
            });
        let connected = disjoint
            && self.shrubs.iter().enumerate().all(|(i, s)| {
                s.vertices.iter().filter(|&v| t.parent(v).is_none_or(|p| owner[p] != i)).count() == 1
            });
        r.clause("components", edges_ok && connected);
        let limit = tau * qu(k);
        r.clause("order", self.shrubs.iter().all(|s| qu(s.order()) <= limit));
        let roots_ok = disjoint
            && self.shrubs.iter().enumerate().all(|(i, s)| {
                s.vertices.contains(s.root) && t.parent(s.root).is_none_or(|p| owner[p] != i)
            });
        r.clause("roots", roots_ok);
        r.count("cut_vertices", self.cut_vertices.len())
            .count("shrubs", self.shrubs.len())
            .count("end_shrubs", self.shrubs.iter().filter(|s| s.is_end()).count());
        r
    }
}

/// Cuts `t` bottom-up: a vertex becomes a cut vertex as soon as the part of
/// its subtree still attached to it exceeds `τk`. Every remaining component
/// then has order at most `τk`.
pub fn shrub_decompose(t: &RootedTree, tau: &Q, k: usize) -> Result<ShrubDecomposition> {
    if !is_positive(tau) || *tau > one() {
        return input("shrub size factor must lie in (0, 1]");
    }
    if t.k() != k {
        return input(format!("tree has order {} but k = {k}", t.k()));
    }
    let limit = floor_u64(&(tau * qu(k))) as usize;
    if limit < 1 {
        return input("τk < 1 leaves no room for a shrub");
    }
    let order = t.bfs_order();
    let mut attached = vec![0usize; k];
    let mut cut = vec![false; k];
    for &v in order.iter().rev() {
        let size = 1 + t.children(v).iter().filter(|&&c| !cut[c]).map(|&c| attached[c]).sum::<usize>();
        if size > limit {
            cut[v] = true;
        } else {
            attached[v] = size;
        }
    }
    let mut shrubs = Vec::new();
    for &v in &order {
        if cut[v] || t.parent(v).is_some_and(|p| !cut[p]) {
            continue;
        }
        let mut verts = vec![v];
        let mut cuts = Vec::new();
        let mut i = 0;
        while i < verts.len() {
            let x = verts[i];
            i += 1;
            for &c in t.children(x) {
                if cut[c] {
                    cuts.push(c);
                } else {
                    verts.push(c);
                }
            }
        }
        cuts.extend(t.parent(v));
        shrubs.push(Shrub { root: v, vertices: VertexSet::new(verts), cut_neighbours: VertexSet::new(cuts) });
    }
    let cut_vertices = (0..k).filter(|&v| cut[v]).collect();
    Ok(ShrubDecomposition { cut_vertices, shrubs })
}
