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


//! Tree embedding: greedy minimum-degree embedding, shrub decomposition,
//! shrub embedding through an avoiding set, look-ahead path embedding in a
//! nowhere-dense graph and the reserve-set variant for binary trees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, VertexSet};
use crate::report::ClauseReport;
use crate::tree::RootedTree;

mod expander;
mod greedy;
pub mod oracle;
mod shrub;

pub use expander::{
    embed_path_expander, embed_tree_reserve, ExpanderOptions, MagicMargin, PathRun, PathStep, ReserveParams,
    ReserveRun,
};
pub use greedy::{embed_shrub_avoiding, greedy_embed, ShrubParams};
pub use shrub::{shrub_decompose, Shrub, ShrubDecomposition};

/// A partial injective map from tree vertices to host vertices.
/// JSON: `{"map": {"0": 5, ...}, "reserve": [...]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub map: BTreeMap<usize, usize>,
    /// Embedded tree vertices with an unembedded child.
    #[serde(default, skip_serializing_if = "VertexSet::is_empty")]
    pub active: VertexSet,
    #[serde(default)]
    pub reserve: VertexSet,
}

impl Embedding {
    pub fn from_map(t: &RootedTree, map: BTreeMap<usize, usize>) -> Self {
        let mut e = Embedding { map, active: VertexSet::empty(), reserve: VertexSet::empty() };
        e.refresh_active(t);
        e
    }

    pub fn image(&self) -> VertexSet {
        VertexSet::new(self.map.values().copied())
    }

    pub fn is_complete(&self, t: &RootedTree) -> bool {
        self.map.len() == t.k() && (0..t.k()).all(|v| self.map.contains_key(&v))
    }

    pub fn refresh_active(&mut self, t: &RootedTree) {
        self.active = self
            .map
            .keys()
            .copied()
            .filter(|&v| v < t.k() && t.children(v).iter().any(|c| !self.map.contains_key(c)))
            .collect();
    }

    /// Clauses `in_range`, `injective`, `edge_preserving`, `complete`, and
    /// `reserve_outside_image` where image vertices of the tree vertices in
    /// `reserve_hosts` may sit in the reserve.
    pub fn check(&self, t: &RootedTree, g: &Graph, reserve_hosts: &VertexSet) -> ClauseReport {
        let mut r = ClauseReport::new();
        let in_range = self.map.iter().all(|(&a, &b)| a < t.k() && b < g.n())
            && self.reserve.as_slice().last().is_none_or(|&v| v < g.n());
        r.clause("in_range", in_range);
        r.clause("injective", self.image().len() == self.map.len());
        let preserving = t.edges().iter().all(|&(a, b)| match (self.map.get(&a), self.map.get(&b)) {
            (Some(&x), Some(&y)) => x < g.n() && y < g.n() && g.has_edge(x, y),
            _ => true,
        });
        r.clause("edge_preserving", preserving);
        r.clause("complete", self.is_complete(t));
        let allowed: VertexSet = reserve_hosts.iter().filter_map(|v| self.map.get(&v).copied()).collect();
        r.clause("reserve_outside_image", self.reserve.intersection(&self.image()).is_subset(&allowed));
        r.count("embedded", self.map.len()).count("reserve", self.reserve.len());
        r
    }

    /// Injective, edge-preserving and complete.
    pub fn is_valid_copy(&self, t: &RootedTree, g: &Graph) -> bool {
        let r = self.check(t, g, &VertexSet::empty());
        ["in_range", "injective", "edge_preserving", "complete"].iter().all(|c| r.get(c) == Some(true))
    }
}
