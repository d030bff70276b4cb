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

//! Partitions with a garbage cluster and the index (mean square density)
//! of a pair of them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{Graph, VertexSet};
use crate::rational::{qu, Q};
use crate::regularity::pair::{check_pair, Witness};

/// Garbage cluster plus equal-size clusters; together they partition the
/// ground set. JSON: `{"garbage": [...], "clusters": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGarbagePartition", into = "RawGarbagePartition")]
pub struct GarbagePartition {
    garbage: VertexSet,
    clusters: Vec<VertexSet>,
    ground: VertexSet,
}

#[derive(Serialize, Deserialize)]
struct RawGarbagePartition {
    garbage: VertexSet,
    clusters: Vec<VertexSet>,
}

impl TryFrom<RawGarbagePartition> for GarbagePartition {
    type Error = crate::error::Error;
    fn try_from(r: RawGarbagePartition) -> Result<Self> {
        GarbagePartition::new(r.garbage, r.clusters)
    }
}

impl From<GarbagePartition> for RawGarbagePartition {
    fn from(p: GarbagePartition) -> Self {
        RawGarbagePartition { garbage: p.garbage, clusters: p.clusters }
    }
}

impl GarbagePartition {
    pub fn new(garbage: VertexSet, clusters: Vec<VertexSet>) -> Result<Self> {
        if clusters.iter().any(VertexSet::is_empty) {
            return input("clusters must be nonempty");
        }
        if let Some(first) = clusters.first() {
            if clusters.iter().any(|c| c.len() != first.len()) {
                return input("clusters must have equal sizes");
            }
        }
        let total = garbage.len() + clusters.iter().map(VertexSet::len).sum::<usize>();
        let ground = VertexSet::new(garbage.iter().chain(clusters.iter().flat_map(|c| c.iter())));
        if ground.len() != total {
            return input("garbage and clusters must be disjoint");
        }
        Ok(GarbagePartition { garbage, clusters, ground })
    }

    /// One cluster holding all of `set` (no garbage); empty `set` gives an
    /// empty partition.
    pub fn trivial(set: &VertexSet) -> Self {
        let clusters = if set.is_empty() { Vec::new() } else { vec![set.clone()] };
        GarbagePartition { garbage: VertexSet::empty(), clusters, ground: set.clone() }
    }

    pub fn garbage(&self) -> &VertexSet {
        &self.garbage
    }

    pub fn clusters(&self) -> &[VertexSet] {
        &self.clusters
    }

    pub fn ground(&self) -> &VertexSet {
        &self.ground
    }

    pub fn cluster_size(&self) -> Option<usize> {
        self.clusters.first().map(VertexSet::len)
    }

    /// Number of classes, counting the garbage cluster.
    pub fn class_count(&self) -> usize {
        self.clusters.len() + 1
    }

    /// Clusters followed by the garbage broken into singletons.
    pub fn circ_blocks(&self) -> Vec<VertexSet> {
        let mut out = self.clusters.clone();
        out.extend(self.garbage.iter().map(|v| VertexSet::from_sorted(vec![v])));
        out
    }

    /// Every cluster of `self` lies inside one cluster of `coarser` or is a
    /// single garbage vertex of it, and both have the same ground.
    pub fn refines_up_to_garbage(&self, coarser: &GarbagePartition) -> bool {
        if self.ground != coarser.ground {
            return false;
        }
        self.clusters.iter().all(|c| {
            coarser.clusters.iter().any(|d| c.is_subset(d)) || (c.len() == 1 && coarser.garbage.contains(c.as_slice()[0]))
        })
    }
}

/// Partitions of the two sides of a pair. JSON: `{"a_side": .., "b_side": ..}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPartitionState {
    pub a_side: GarbagePartition,
    pub b_side: GarbagePartition,
}

impl PairPartitionState {
    pub fn new(a_side: GarbagePartition, b_side: GarbagePartition) -> Result<Self> {
        if !a_side.ground().is_disjoint(b_side.ground()) {
            return input("the two sides of a pair partition must be disjoint");
        }
        if a_side.ground().is_empty() || b_side.ground().is_empty() {
            return input("pair partition sides must be nonempty");
        }
        Ok(PairPartitionState { a_side, b_side })
    }

    pub fn trivial(a: &VertexSet, b: &VertexSet) -> Result<Self> {
        Self::new(GarbagePartition::trivial(a), GarbagePartition::trivial(b))
    }
}

/// `(1/(|A|+|B|)²) Σ e(X,Y)²/(|X||Y|)` over the ∘-blocks `X` of `A`, `Y` of `B`.
pub fn index(g: &Graph, state: &PairPartitionState) -> Q {
    let n = g.n();
    let a_blocks = state.a_side.circ_blocks();
    let b_blocks = state.b_side.circ_blocks();
    let mut label = vec![usize::MAX; n];
    for (j, y) in b_blocks.iter().enumerate() {
        for v in y.iter() {
            label[v] = j;
        }
    }
    // Sum grouped by the denominator |X||Y| to keep big-rational work small.
    let mut by_den: BTreeMap<u64, u128> = BTreeMap::new();
    let mut counts = vec![0u64; b_blocks.len()];
    for x in &a_blocks {
        let mut touched = Vec::new();
        for v in x.iter() {
            for &u in g.neighbors(v) {
                let j = label[u];
                if j != usize::MAX {
                    if counts[j] == 0 {
                        touched.push(j);
                    }
                    counts[j] += 1;
                }
            }
        }
        for j in touched {
            let den = (x.len() * b_blocks[j].len()) as u64;
            *by_den.entry(den).or_default() += (counts[j] as u128) * (counts[j] as u128);
            counts[j] = 0;
        }
    }
    let mut sum = Q::from_integer(0.into());
    for (den, num) in by_den {
        sum += Q::new(num.into(), den.into());
    }
    let total = qu(state.a_side.ground().len() + state.b_side.ground().len());
    sum / (&total * &total)
}

/// Irregular cluster pairs of a pair partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRegularity {
    /// `(i, j, witness)`: cluster `i` of the a-side against cluster `j` of the b-side.
    pub irregular: Vec<(usize, usize, Witness)>,
    pub cluster_pairs: usize,
    /// At most `ε·s·t` irregular pairs.
    pub regular: bool,
    /// Every pair was decided exactly.
    pub exact: bool,
}

/// Checks every cluster pair (exactly when both clusters are within `cap`).
pub fn partition_regularity(g: &Graph, state: &PairPartitionState, eps: &Q, cap: usize) -> Result<PartitionRegularity> {
    let a = state.a_side.clusters();
    let b = state.b_side.clusters();
    let jobs: Vec<(usize, usize)> = (0..a.len()).flat_map(|i| (0..b.len()).map(move |j| (i, j))).collect();
    let verdicts: Vec<Result<(usize, usize, crate::regularity::pair::RegularityVerdict)>> = jobs
        .par_iter()
        .map(|&(i, j)| check_pair(g, &a[i], &b[j], eps, cap).map(|v| (i, j, v)))
        .collect();
    let mut irregular = Vec::new();
    let mut exact = true;
    for r in verdicts {
        let (i, j, v) = r?;
        exact &= v.exact;
        if let Some(w) = v.witness {
            irregular.push((i, j, w));
        }
    }
    let pairs = jobs.len();
    let regular = qu(irregular.len()) <= eps * qu(pairs);
    Ok(PartitionRegularity { irregular, cluster_pairs: pairs, regular, exact })
}
