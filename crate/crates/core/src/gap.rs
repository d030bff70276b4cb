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

//! Degree-gap creation: delete few edges so that no degree falls in
//! `[Ω_{i*} k, Ω_{i*+1} k)` for some index `i*`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{input, precondition, Result};
use crate::graph::{norm, Edge, Graph};
use crate::lks::{is_lks_min, LksParams};
use crate::rational::{ceil_u64, floor_u64, is_positive, q, qu, scaled_pow, serde_q, serde_vec_q, Q};

/// Increasing positive multipliers `Ω_1 < Ω_2 < ...`, 1-indexed. The
/// geometric form is evaluated lazily so that very long sequences cost
/// nothing beyond the entries actually reached by the degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OmegaSequence {
    Explicit {
        #[serde(with = "serde_vec_q")]
        values: Vec<Q>,
    },
    /// `Ω_j = first · growth^(j-1)` for `j = 1..=len`.
    Geometric {
        #[serde(with = "serde_q")]
        first: Q,
        #[serde(with = "serde_q")]
        growth: Q,
        len: usize,
    },
}

impl OmegaSequence {
    pub fn explicit(values: Vec<Q>) -> Result<Self> {
        let s = OmegaSequence::Explicit { values };
        s.validate()?;
        Ok(s)
    }

    pub fn geometric(first: Q, growth: Q, len: usize) -> Result<Self> {
        let s = OmegaSequence::Geometric { first, growth, len };
        s.validate()?;
        Ok(s)
    }

    /// Geometric sequence whose consecutive ratio `Ω_j/Ω_{j+1}` is `ratio`.
    pub fn with_ratio(first: Q, ratio: &Q, len: usize) -> Result<Self> {
        if !is_positive(ratio) {
            return input("omega ratio must be positive");
        }
        Self::geometric(first, ratio.recip(), len)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OmegaSequence::Explicit { values } => {
                if values.iter().any(|v| !is_positive(v)) {
                    return input("omega values must be positive");
                }
                if values.windows(2).any(|w| w[0] >= w[1]) {
                    return input("omega values must be strictly increasing");
                }
            }
            OmegaSequence::Geometric { first, growth, .. } => {
                if !is_positive(first) {
                    return input("omega_1 must be positive");
                }
                if *growth <= q(1, 1) {
                    return input("omega growth factor must exceed 1");
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match self {
            OmegaSequence::Explicit { values } => values.len(),
            OmegaSequence::Geometric { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Ω_j` for `1 <= j <= len`.
    pub fn value(&self, j: usize) -> Q {
        assert!(j >= 1 && j <= self.len(), "omega index {j} out of range");
        match self {
            OmegaSequence::Explicit { values } => values[j - 1].clone(),
            OmegaSequence::Geometric { first, growth, .. } => scaled_pow(first, growth, (j - 1) as u32),
        }
    }

    /// Largest ratio `Ω_j/Ω_{j+1}` (all ratios coincide for the geometric form).
    pub fn max_ratio(&self) -> Option<Q> {
        if self.len() < 2 {
            return None;
        }
        match self {
            OmegaSequence::Explicit { values } => values.windows(2).map(|w| &w[0] / &w[1]).max(),
            OmegaSequence::Geometric { growth, .. } => Some(growth.recip()),
        }
    }

    /// Integer thresholds `t_j = ⌈Ω_j k⌉` (so `deg >= Ω_j k` iff `deg >= t_j`),
    /// computed until one exceeds `limit` or the sequence ends.
    pub fn thresholds(&self, k: usize, limit: usize) -> Vec<u64> {
        let mut out = Vec::new();
        let kq = qu(k);
        match self {
            OmegaSequence::Explicit { values } => {
                for v in values {
                    let t = ceil_u64(&(v * &kq));
                    out.push(t);
                    if t > limit as u64 {
                        break;
                    }
                }
            }
            OmegaSequence::Geometric { first, growth, len } => {
                let mut x = first * &kq;
                for _ in 0..*len {
                    let t = ceil_u64(&x);
                    out.push(t);
                    if t > limit as u64 {
                        break;
                    }
                    x *= growth;
                }
            }
        }
        out
    }
}

/// Degree buckets `X_1..X_{R+1}`: bucket `i <= R` holds degrees in
/// `[t_i, t_{i+1})`, bucket `R+1` everything from `t_{R+1}` on, bucket 0 the rest.
struct Buckets {
    thresholds: Vec<u64>,
    r: usize,
}

impl Buckets {
    fn new(omegas: &OmegaSequence, k: usize, max_degree: usize, r: usize) -> Self {
        Buckets { thresholds: omegas.thresholds(k, max_degree), r }
    }

    fn of(&self, deg: usize) -> usize {
        let d = deg as u64;
        let j = self.thresholds.partition_point(|&t| t <= d);
        j.min(self.r + 1)
    }

    fn lower(&self, i: usize) -> u64 {
        self.thresholds.get(i - 1).copied().unwrap_or(u64::MAX)
    }

    /// `deg` lies in `[t_i, t_{i+1})`.
    fn in_bucket(&self, deg: usize, i: usize) -> bool {
        let d = deg as u64;
        d >= self.lower(i) && d < self.lower(i + 1)
    }

    /// Index `i in 1..=R` minimizing the degree sum over `X_i ∪ X_{i+1}`,
    /// smallest index on ties.
    fn choose_star(&self, degrees: &[usize]) -> usize {
        let mut sums = vec![0u64; self.r + 2];
        for &d in degrees {
            let b = self.of(d);
            if b > 0 {
                sums[b] += d as u64;
            }
        }
        let mut best = (u64::MAX, 1);
        for i in 1..=self.r {
            let s = sums[i] + sums[i + 1];
            if s < best.0 {
                best = (s, i);
                if s == 0 {
                    break;
                }
            }
        }
        best.1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapResult {
    pub subgraph: Graph,
    pub star_index: usize,
    pub removed_edges: Vec<Edge>,
}

/// Mutable adjacency used by the deletion loops.
struct Work {
    adj: Vec<BTreeSet<usize>>,
    removed: Vec<Edge>,
}

impl Work {
    fn new(g: &Graph) -> Self {
        Work { adj: (0..g.n()).map(|v| g.neighbors(v).iter().copied().collect()).collect(), removed: Vec::new() }
    }

    fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    fn delete(&mut self, u: usize, v: usize) {
        if self.adj[u].remove(&v) {
            self.adj[v].remove(&u);
            self.removed.push(norm(u, v));
        }
    }

    fn delete_all_at(&mut self, v: usize) {
        let nbrs: Vec<usize> = self.adj[v].iter().copied().collect();
        for u in nbrs {
            self.delete(v, u);
        }
    }

    fn finish(self, star_index: usize) -> GapResult {
        let n = self.adj.len();
        let edges = self.adj.iter().enumerate().flat_map(|(u, s)| s.iter().filter(move |&&v| v > u).map(move |&v| (u, v)));
        GapResult { subgraph: Graph::from_edges_lossy(n, edges), star_index, removed_edges: self.removed }
    }
}

/// `⌊4/η⌋`, the number of candidate indices for the generic procedure.
pub fn generic_index_bound(eta: &Q) -> usize {
    floor_u64(&(q(4, 1) / eta)) as usize
}

/// `⌊100/η²⌋`, the number of candidate indices for the LKS procedure.
pub fn lks_index_bound(eta: &Q) -> usize {
    floor_u64(&(q(100, 1) / (eta * eta))) as usize
}

/// Deletes all edges at `X_{i*} ∪ X_{i*+1}`, then keeps isolating any vertex
/// whose degree drops into `X_{i*}`.
pub fn create_gap_generic(g: &Graph, k: usize, eta: &Q, omegas: &OmegaSequence) -> Result<GapResult> {
    if k == 0 {
        return input("k must be at least 1");
    }
    if !is_positive(eta) {
        return input("eta must be positive");
    }
    omegas.validate()?;
    let r = generic_index_bound(eta);
    if r == 0 {
        return input("eta too large: no candidate index");
    }
    if omegas.len() < r + 1 {
        return input(format!("omega sequence needs at least {} entries, has {}", r + 1, omegas.len()));
    }
    if let Some(ratio) = omegas.max_ratio() {
        if ratio > eta / q(2, 1) {
            return input("omega ratios must be at most eta/2");
        }
    }
    let buckets = Buckets::new(omegas, k, g.max_degree(), r);
    let degrees = g.degrees();
    let star = buckets.choose_star(&degrees);
    let mut w = Work::new(g);
    for v in 0..g.n() {
        let b = buckets.of(degrees[v]);
        if b == star || b == star + 1 {
            w.delete_all_at(v);
        }
    }
    while let Some(v) = (0..g.n()).find(|&v| w.degree(v) > 0 && buckets.in_bucket(w.degree(v), star)) {
        w.delete_all_at(v);
    }
    Ok(w.finish(star))
}

/// Gap-creation preserving LKS structure. Starting from an edge-minimal
/// member, deletes `E_0`, then alternates exhaustive single-edge deletions
/// at vertices of `X_{i*}` with one deletion between the `η/2`-small vertices
/// and the buckets above `i*`, and finally drops edges from small vertices to
/// neighbours whose degree is not exactly `⌈(1+η/2)k⌉`.
pub fn create_gap_lks(g: &Graph, p: &LksParams, omegas: &OmegaSequence) -> Result<GapResult> {
    if !is_positive(&p.eta) {
        return input("eta must be positive");
    }
    omegas.validate()?;
    let r = lks_index_bound(&p.eta);
    if omegas.len() < r + 2 {
        return input(format!("omega sequence needs at least {} entries, has {}", r + 2, omegas.len()));
    }
    if omegas.value(1) <= q(2, 1) {
        return input("omega_1 must exceed 2");
    }
    if let Some(ratio) = omegas.max_ratio() {
        if ratio > &p.eta * &p.eta / q(100, 1) {
            return input("omega ratios must be at most eta^2/100");
        }
    }
    if !is_lks_min(g, p) {
        return precondition("input graph is not edge-minimal in LKS(n,k,eta)");
    }
    let k = p.k;
    let n = g.n();
    let buckets = Buckets::new(omegas, k, g.max_degree(), r);
    let degrees = g.degrees();
    let star = buckets.choose_star(&degrees);
    let half = p.halved();
    let small_below = half.large_threshold() as usize;
    let upper = buckets.lower(star + 1);

    let mut w = Work::new(g);
    for v in 0..n {
        let b = buckets.of(degrees[v]);
        if b == star || b == star + 1 {
            w.delete_all_at(v);
        }
    }
    loop {
        // (T1): one edge at a time at the smallest vertex inside X_{i*}.
        while let Some(v) = (0..n).find(|&v| w.degree(v) > 0 && buckets.in_bucket(w.degree(v), star)) {
            let u = *w.adj[v].iter().next().unwrap();
            w.delete(v, u);
        }
        // (T2): lexicographically first edge from a small vertex to X_{>i*}.
        let high = |w: &Work, x: usize| w.degree(x) as u64 >= upper;
        let small = |w: &Work, x: usize| w.degree(x) < small_below;
        let mut hit = None;
        'scan: for u in 0..n {
            for &v in w.adj[u].range(u + 1..) {
                if (small(&w, u) && high(&w, v)) || (small(&w, v) && high(&w, u)) {
                    hit = Some((u, v));
                    break 'scan;
                }
            }
        }
        match hit {
            Some((u, v)) => w.delete(u, v),
            None => break,
        }
    }
    // Cleanup against the small set of the graph reached so far.
    let small_set: Vec<bool> = (0..n).map(|v| w.degree(v) < small_below).collect();
    loop {
        let mut changed = false;
        for u in 0..n {
            let nbrs: Vec<usize> = w.adj[u].range(u + 1..).copied().collect();
            for v in nbrs {
                let bad = (small_set[u] && w.degree(v) != small_below) || (small_set[v] && w.degree(u) != small_below);
                if bad {
                    w.delete(u, v);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(w.finish(star))
}

/// Direct check with exact rationals: no degree in `[Ω_i k, Ω_{i+1} k)`.
pub fn has_degree_gap(g: &Graph, k: usize, omegas: &OmegaSequence, i: usize) -> bool {
    if i == 0 || i + 1 > omegas.len() {
        return false;
    }
    let lo = omegas.value(i) * qu(k);
    let hi = omegas.value(i + 1) * qu(k);
    (0..g.n()).all(|v| {
        let d = qu(g.degree(v));
        d < lo || d >= hi
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_graph, regular_graph, EdgeModel};
    use crate::lks::{is_lks, lks_small_report, minimize_to_lks_min};
    use crate::rational::qi;

    fn generic_omegas(eta: &Q, first: Q) -> OmegaSequence {
        OmegaSequence::with_ratio(first, &(eta / q(2, 1)), generic_index_bound(eta) + 1).unwrap()
    }

    #[test]
    fn thresholds_are_ceilings() {
        let s = OmegaSequence::explicit(vec![q(3, 2), q(5, 1), qi(40)]).unwrap();
        assert_eq!(s.thresholds(3, 100), vec![5, 15, 120]);
        assert_eq!(s.thresholds(3, 10), vec![5, 15]);
        assert!(OmegaSequence::explicit(vec![qi(2), qi(2)]).is_err());
    }

    #[test]
    fn regular_graph_below_first_bucket_untouched() {
        let eta = q(1, 2);
        let omegas = generic_omegas(&eta, qi(2));
        let g = regular_graph(20, 3, 1).unwrap();
        let r = create_gap_generic(&g, 2, &eta, &omegas).unwrap();
        assert!(r.removed_edges.is_empty());
        assert_eq!(r.subgraph, g);
        let e = Graph::empty(5);
        assert_eq!(create_gap_generic(&e, 2, &eta, &omegas).unwrap().subgraph, e);
    }

    #[test]
    fn star_in_second_bucket() {
        // k = 1, eta = 1: Ω = 1, 2, 4, 8, 16 (ratio 1/2), R = 4. Centre degree 5.
        let eta = qi(1);
        let omegas = OmegaSequence::explicit(vec![qi(1), qi(2), qi(4), qi(8), qi(16)]).unwrap();
        let g = Graph::from_edges(6, (1..6).map(|v| (0, v))).unwrap();
        let r = create_gap_generic(&g, 1, &eta, &omegas).unwrap();
        assert!(r.star_index <= 4);
        assert!(has_degree_gap(&r.subgraph, 1, &omegas, r.star_index));
        assert!(r.subgraph.is_subgraph_of(&g));
    }

    #[test]
    fn short_sequence_rejected() {
        let eta = q(1, 2);
        let omegas = OmegaSequence::explicit(vec![qi(2), qi(8)]).unwrap();
        assert!(create_gap_generic(&Graph::empty(3), 2, &eta, &omegas).is_err());
    }

    #[test]
    fn random_graphs_generic() {
        let eta = q(1, 2);
        for seed in 0..20 {
            let g = random_graph(60, &EdgeModel::Probability(q(1, 6)), seed).unwrap();
            let k = (2 * g.edge_count()).div_ceil(60).max(1);
            let omegas = generic_omegas(&eta, q(1, 4));
            let r = create_gap_generic(&g, k, &eta, &omegas).unwrap();
            assert!(has_degree_gap(&r.subgraph, k, &omegas, r.star_index));
            assert!(r.star_index <= 8);
            assert!(qu(r.removed_edges.len()) <= &eta * qu(k) * qu(60));
            assert_eq!(r.subgraph.edge_count() + r.removed_edges.len(), g.edge_count());
        }
    }

    #[test]
    fn lks_rejects_non_minimal_input() {
        let p = LksParams::new(3, q(1, 4)).unwrap();
        let r = lks_index_bound(&p.eta);
        let omegas = OmegaSequence::with_ratio(qi(3), &(&p.eta * &p.eta / qi(100)), r + 2).unwrap();
        assert!(create_gap_lks(&Graph::complete(8), &p, &omegas).is_err());
    }

    #[test]
    fn lks_random_minimal_instances() {
        let p = LksParams::new(6, q(1, 4)).unwrap();
        let r = lks_index_bound(&p.eta);
        let omegas = OmegaSequence::with_ratio(qi(3), &(&p.eta * &p.eta / qi(100)), r + 2).unwrap();
        let mut tried = 0;
        for seed in 0..30 {
            let g = random_graph(40, &EdgeModel::Probability(q(1, 2)), seed).unwrap();
            if !is_lks(&g, &p) {
                continue;
            }
            tried += 1;
            let min = minimize_to_lks_min(&g, &p).unwrap();
            let res = create_gap_lks(&min, &p, &omegas).unwrap();
            assert!(res.star_index <= r);
            assert!(has_degree_gap(&res.subgraph, p.k, &omegas, res.star_index));
            assert!(res.subgraph.is_subgraph_of(&min));
            let rep = lks_small_report(&res.subgraph, &p.halved());
            assert!(rep.passed(), "seed {seed}: {rep:?}");
        }
        assert!(tried > 10);
    }
}
