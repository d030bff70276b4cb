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


use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Embedding;
use crate::decomposition::exceptional_vertices;
use crate::error::{input, precondition, Result};
use crate::graph::{Graph, VertexSet};
use crate::rational::{ceil_u64, is_positive, one, qu, serde_q, Q};
use crate::spots::SpotFamily;
use crate::tree::RootedTree;

/// Places the tree in BFS order, each vertex on the first unused
/// neighbour of its parent's image. `blocked` marks host vertices that may
/// not be used and is restored before returning.
pub(crate) fn grow_first_fit(
    t: &RootedTree,
    g: &Graph,
    root_host: usize,
    blocked: &mut [bool],
) -> Option<BTreeMap<usize, usize>> {
    if blocked[root_host] {
        return None;
    }
    let order = t.bfs_order();
    let mut host = vec![usize::MAX; t.k()];
    let mut placed = Vec::with_capacity(t.k());
    let mut ok = true;
    for &v in &order {
        let h = match t.parent(v) {
            None => Some(root_host),
            Some(p) => g.neighbors(host[p]).iter().copied().find(|&w| !blocked[w]),
        };
        match h {
            Some(h) => {
                host[v] = h;
                blocked[h] = true;
                placed.push(h);
            }
            None => {
                ok = false;
                break;
            }
        }
    }
    for h in placed {
        blocked[h] = false;
    }
    ok.then(|| (0..t.k()).map(|v| (v, host[v])).collect())
}

/// BFS-order greedy embedding. Roots are tried in order of decreasing host
/// degree; any root works when `mindeg(g) > k - 2`.
pub fn greedy_embed(t: &RootedTree, g: &Graph) -> Option<Embedding> {
    if g.n() < t.k() {
        return None;
    }
    let need = t.degree(t.root());
    let mut roots: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) >= need).collect();
    roots.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut blocked = vec![false; g.n()];
    roots
        .into_iter()
        .find_map(|r| grow_first_fit(t, g, r, &mut blocked))
        .map(|m| Embedding::from_map(t, m))
}

/// Parameters for embedding a shrub through an avoiding set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShrubParams {
    pub k: usize,
    #[serde(with = "serde_q")]
    pub tau: Q,
    #[serde(with = "serde_q")]
    pub eps: Q,
    #[serde(with = "serde_q")]
    pub gamma: Q,
}

impl ShrubParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return input("k must be positive");
        }
        for (name, x) in [("tau", &self.tau), ("eps", &self.eps), ("gamma", &self.gamma)] {
            if !is_positive(x) || *x >= one() {
                return input(format!("{name} must lie in (0, 1)"));
            }
        }
        Ok(())
    }
}

/// Extends an embedding whose active vertex sits on `anchor` by the shrub.
/// The shrub root goes to a non-exceptional vertex of `𝔼 ∖ used` next to
/// `anchor`, and the rest is filled greedily inside a spot through that
/// vertex which `used` barely touches. The returned map is keyed by shrub
/// vertices.
pub fn embed_shrub_avoiding(
    shrub: &RootedTree,
    g: &Graph,
    fam: &SpotFamily,
    avoiding: &VertexSet,
    anchor: usize,
    used: &VertexSet,
    params: &ShrubParams,
) -> Result<Option<Embedding>> {
    params.validate()?;
    let n = g.n();
    let kq = qu(params.k);
    if qu(shrub.k()) > &params.tau * &kq {
        return precondition(format!("shrub of order {} exceeds τk", shrub.k()));
    }
    if anchor >= n || used.as_slice().last().is_some_and(|&v| v >= n) {
        return input("anchor or used set outside the host graph");
    }
    if used.len() > params.k {
        return precondition("the used set is larger than k, beyond what a 1-avoiding set handles");
    }
    let free = avoiding.difference(used);
    let free_mask = free.mask(n);
    let anchor_deg = g.degree_into(anchor, &free_mask);
    if (anchor_deg as u64) < ceil_u64(&(&params.gamma * &kq)) {
        return precondition(format!("anchor has {anchor_deg} neighbours in the unused avoiding set, below γk"));
    }
    let exceptional = exceptional_vertices(fam, avoiding, used, &params.gamma, params.k);
    if qu(exceptional.len()) > &params.eps * &kq {
        return precondition(format!("{} exceptional vertices for the used set exceed εk", exceptional.len()));
    }
    let overlap_limit = &params.gamma * &params.gamma * &kq;
    let mut blocked = used.mask(n);
    blocked[anchor] = true;
    let candidates = g.neighbors(anchor).iter().copied().filter(|&c| free_mask[c] && !exceptional.contains(c));
    for c in candidates {
        for spot in &fam.spots {
            let verts = spot.vertices();
            if !verts.contains(c) || qu(verts.intersection_len(used)) > overlap_limit {
                continue;
            }
            let d = spot.as_graph(n);
            if let Some(map) = grow_first_fit(shrub, &d, c, &mut blocked) {
                return Ok(Some(Embedding::from_map(shrub, map)));
            }
        }
    }
    Ok(None)
}
