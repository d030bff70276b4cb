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

//! The classes LKS(n,k,η), their edge-minimal members and the cleaned
//! relaxation used after the degree-gap step.

use serde::{Deserialize, Serialize};

use crate::error::{input, precondition, Result};
use crate::graph::{Graph, VertexSet};
use crate::rational::{ceil_u64, one, q, qu, serde_q, Q};
use crate::report::ClauseReport;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LksParams {
    pub k: usize,
    #[serde(with = "serde_q")]
    pub eta: Q,
}

impl LksParams {
    /// `eta` may be zero (the conjecture's own setting); it must stay below 1.
    pub fn new(k: usize, eta: Q) -> Result<Self> {
        if k == 0 {
            return input("k must be at least 1");
        }
        if eta < crate::rational::zero() || eta >= one() {
            return input("eta must lie in [0, 1)");
        }
        Ok(LksParams { k, eta })
    }

    /// Same `k`, `eta` halved: the class the gap step lands in.
    pub fn halved(&self) -> Self {
        LksParams { k: self.k, eta: &self.eta / q(2, 1) }
    }

    /// `⌈(1 + mult·η) k⌉`.
    pub fn ceil_degree(&self, mult: i64) -> u64 {
        ceil_u64(&((one() + q(mult, 1) * &self.eta) * qu(self.k)))
    }

    /// Minimum degree of a large vertex: `deg >= (1+η)k` iff `deg >= ⌈(1+η)k⌉`.
    pub fn large_threshold(&self) -> u64 {
        self.ceil_degree(1)
    }

    /// Minimum number of large vertices for membership: `⌈(1/2 + η) n⌉`.
    pub fn required_large(&self, n: usize) -> u64 {
        ceil_u64(&((q(1, 2) + &self.eta) * qu(n)))
    }

    /// The regime in which `e(G) < kn` is known for edge-minimal members.
    pub fn in_edge_bound_regime(&self, n: usize) -> bool {
        self.eta < q(1, 20) && n > self.k && self.k > 20
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSplit {
    pub small: VertexSet,
    pub large: VertexSet,
}

pub fn degree_split(g: &Graph, p: &LksParams) -> DegreeSplit {
    let t = p.large_threshold();
    let (large, small): (Vec<usize>, Vec<usize>) = (0..g.n()).partition(|&v| g.degree(v) as u64 >= t);
    DegreeSplit { small: VertexSet::from_sorted(small), large: VertexSet::from_sorted(large) }
}

fn large_count(degrees: &[usize], t: u64) -> u64 {
    degrees.iter().filter(|&&d| d as u64 >= t).count() as u64
}

pub fn is_lks(g: &Graph, p: &LksParams) -> bool {
    large_count(&g.degrees(), p.large_threshold()) >= p.required_large(g.n())
}

/// Membership plus edge-minimality: no single edge can be dropped.
pub fn is_lks_min(g: &Graph, p: &LksParams) -> bool {
    let t = p.large_threshold();
    let need = p.required_large(g.n());
    let deg = g.degrees();
    let large = large_count(&deg, t);
    if large < need {
        return false;
    }
    g.edges().into_iter().all(|(u, v)| {
        let lost = [u, v].iter().filter(|&&x| deg[x] as u64 == t).count() as u64;
        large - lost < need
    })
}

/// Deletes edges in lexicographic order whenever membership survives the
/// deletion, sweeping until no edge can go.
pub fn minimize_to_lks_min(g: &Graph, p: &LksParams) -> Result<Graph> {
    if !is_lks(g, p) {
        return precondition("input graph is not in LKS(n,k,eta)");
    }
    let t = p.large_threshold();
    let need = p.required_large(g.n());
    let mut deg = g.degrees();
    let mut large = large_count(&deg, t);
    let mut alive: Vec<(usize, usize)> = g.edges();
    loop {
        let mut kept = Vec::with_capacity(alive.len());
        let mut changed = false;
        for (u, v) in alive {
            let lost = [u, v].iter().filter(|&&x| deg[x] as u64 == t).count() as u64;
            if large - lost >= need {
                deg[u] -= 1;
                deg[v] -= 1;
                large -= lost;
                changed = true;
            } else {
                kept.push((u, v));
            }
        }
        alive = kept;
        if !changed {
            break;
        }
    }
    Ok(Graph::from_edges_lossy(g.n(), alive))
}

/// Per-property report for membership in the cleaned class LKSsmall.
pub fn lks_small_report(g: &Graph, p: &LksParams) -> ClauseReport {
    let c1 = p.ceil_degree(1);
    let c2 = p.ceil_degree(2);
    let deg = g.degrees();
    let split = degree_split(g, p);
    let high_neighbors_capped = (0..g.n())
        .filter(|&v| deg[v] as u64 > c2)
        .all(|v| g.neighbors(v).iter().all(|&u| deg[u] as u64 <= c2));
    let small_neighbors_exact =
        split.small.iter().all(|v| g.neighbors(v).iter().all(|&u| deg[u] as u64 == c1));
    let edge_bound = (g.edge_count() as u64) <= (p.k * g.n()) as u64;
    let mut r = ClauseReport::new();
    r.clause("member", is_lks(g, p))
        .clause("high_degree_neighbors_capped", high_neighbors_capped)
        .clause("small_neighbors_exact_degree", small_neighbors_exact)
        .clause("edges_at_most_kn", edge_bound)
        .count("n", g.n())
        .count("k", p.k)
        .count("edges", g.edge_count())
        .count("large", split.large.len())
        .count("ceil_one_eta_k", c1)
        .count("ceil_one_two_eta_k", c2);
    r
}

pub fn is_lks_small(g: &Graph, p: &LksParams) -> bool {
    lks_small_report(g, p).passed()
}

/// Structural facts every edge-minimal member satisfies, plus the edge-count
/// chain `e <= ⌈(1+η)k⌉|L| <= ⌈(1+η)k⌉(⌈(1/2+η)n⌉+1) < kn`. The final strict
/// inequality is only asserted inside its regime (η < 1/20, n > k > 20);
/// outside it is reported under `counts`.
pub fn check_lksmin_facts(g: &Graph, p: &LksParams) -> Result<ClauseReport> {
    if !is_lks_min(g, p) {
        return precondition("input graph is not edge-minimal in LKS(n,k,eta)");
    }
    Ok(lksmin_facts_unchecked(g, p))
}

/// Same clauses as [`check_lksmin_facts`] without the precondition, so that
/// violators can be inspected.
pub fn lksmin_facts_unchecked(g: &Graph, p: &LksParams) -> ClauseReport {
    let c1 = p.ceil_degree(1);
    let deg = g.degrees();
    let split = degree_split(g, p);
    let s_mask = split.small.mask(g.n());
    let s_independent = g.edges().iter().all(|&(u, v)| !(s_mask[u] && s_mask[v]));
    let neighbors_exact = (0..g.n())
        .filter(|&v| deg[v] as u64 > c1)
        .all(|v| g.neighbors(v).iter().all(|&u| deg[u] as u64 == c1));
    let bound_l = p.required_large(g.n()) + 1;
    let few_large = split.large.len() as u64 <= bound_l;
    let e = g.edge_count() as u64;
    let kn = (p.k * g.n()) as u64;
    let chain_first = e <= c1 * split.large.len() as u64;
    let chain_end = c1 * bound_l < kn;
    let regime = p.in_edge_bound_regime(g.n());
    let mut r = ClauseReport::new();
    r.clause("s_independent", s_independent)
        .clause("large_vertex_neighbors_exact", neighbors_exact)
        .clause("few_large_vertices", few_large)
        .clause("edges_at_most_ceil_times_large", chain_first);
    if regime {
        r.clause("edges_below_kn", chain_end && e < kn);
    }
    r.count("n", g.n())
        .count("k", p.k)
        .count("edges", e)
        .count("kn", kn)
        .count("large", split.large.len())
        .count("small", split.small.len())
        .count("ceil_one_eta_k", c1)
        .count("large_bound", bound_l)
        .count("in_regime", regime)
        .count("edges_below_kn_observed", chain_end && e < kn);
    r
}
