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


use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundedDecomposition, DecompParams, SparseDecomposition};
use crate::error::Result;
use crate::generators::rng_from_seed;
use crate::graph::{components, core_vertices, ordered_pair_count, Graph, Partition, VertexSet};
use crate::rational::{floor_u64, format_rational, qu, strictly_above, Q};
use crate::regularity::{check_pair, DEFAULT_REGULARITY_CAP};
use crate::report::ClauseReport;
use crate::spots::{find_dense_spot, is_dense_spot, DenseSpot, FinderConfig, SpotFamily};

/// Random challenge sets drawn by [`challenge_suite`].
pub const RANDOM_CHALLENGES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// Decided by exhaustive search.
    Exact,
    /// Only the heuristic finder was run; a miss is not a proof.
    Heuristic,
}

impl Certification {
    pub fn as_str(self) -> &'static str {
        match self {
            Certification::Exact => "exact",
            Certification::Heuristic => "heuristic",
        }
    }
}

/// Looks for an `(m, γ)`-dense spot exhaustively when the candidate core has
/// at most `cfg.exact_cap` vertices, heuristically otherwise.
pub fn certify_nowhere_dense(
    g: &Graph,
    m: &Q,
    gamma: &Q,
    cfg: &FinderConfig,
) -> Result<(Option<DenseSpot>, Certification)> {
    let thr = strictly_above(m).max(1) as usize;
    let core = core_vertices(g, thr);
    if let Some(found) = regular_core_certificate(g, &core, thr, gamma) {
        return Ok((found, Certification::Exact));
    }
    if core.len() <= cfg.exact_cap {
        let exact = FinderConfig { exact: true, ..cfg.clone() };
        Ok((find_dense_spot(g, m, gamma, &exact)?, Certification::Exact))
    } else {
        let heur = FinderConfig { exact: false, ..cfg.clone() };
        Ok((find_dense_spot(g, m, gamma, &heur)?, Certification::Heuristic))
    }
}

/// When the core is exactly `thr`-regular a spot must keep every core edge
/// at each of its vertices, so spots are unions of bipartite core
/// components, and a union is never denser than its densest part. Returns
/// `None` when the shortcut does not apply.
fn regular_core_certificate(g: &Graph, core: &VertexSet, thr: usize, gamma: &Q) -> Option<Option<DenseSpot>> {
    let mask = core.mask(g.n());
    if core.is_empty() || core.iter().any(|v| g.degree_into(v, &mask) != thr) {
        return None;
    }
    let inner = g.induced(core);
    for comp in components(&inner, core) {
        let mut side = vec![None; g.n()];
        let start = comp.as_slice()[0];
        side[start] = Some(false);
        let mut stack = vec![start];
        let mut bipartite = true;
        while let Some(v) = stack.pop() {
            let sv = side[v].unwrap_or(false);
            for &u in inner.neighbors(v) {
                match side[u] {
                    None => {
                        side[u] = Some(!sv);
                        stack.push(u);
                    }
                    Some(su) if su == sv => bipartite = false,
                    _ => {}
                }
            }
        }
        if !bipartite {
            continue;
        }
        let u = VertexSet::new(comp.iter().filter(|&v| side[v] == Some(false)));
        let w = VertexSet::new(comp.iter().filter(|&v| side[v] == Some(true)));
        if let Some(spot) = DenseSpot::from_pair(g, u, w) {
            if spot.density() > *gamma {
                return Some(Some(spot));
            }
        }
    }
    Some(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyOptions {
    pub finder: FinderConfig,
    pub regularity_cap: usize,
    /// Largest number of forbidden sets enumerated when `Λk <= 6`.
    pub exhaustive_limit: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { finder: FinderConfig::default(), regularity_cap: DEFAULT_REGULARITY_CAP, exhaustive_limit: 200_000 }
    }
}

/// Number of `v ∈ 𝔼` lying in no spot `D` with `|U ∩ V(D)| <= γ²k`.
pub fn avoiding_exceptions(fam: &SpotFamily, avoiding: &VertexSet, u: &VertexSet, gamma: &Q, k: usize) -> usize {
    exceptional_vertices(fam, avoiding, u, gamma, k).len()
}

/// The vertices counted by [`avoiding_exceptions`].
pub fn exceptional_vertices(fam: &SpotFamily, avoiding: &VertexSet, u: &VertexSet, gamma: &Q, k: usize) -> VertexSet {
    let limit = gamma * gamma * qu(k);
    let mut rescued = BTreeSet::new();
    for s in &fam.spots {
        let hit = s.u.intersection_len(u) + s.w.intersection_len(u);
        if qu(hit) <= limit {
            rescued.extend(s.u.iter().chain(s.w.iter()));
        }
    }
    avoiding.iter().filter(|v| !rescued.contains(v)).collect()
}

/// `∅`, `V(G)`, [`RANDOM_CHALLENGES`] random sets of size `⌊Λk⌋`, and a
/// greedy adversary that spends its `⌊Λk⌋` vertices pushing the spots
/// richest in `𝔼` over the `γ²k` overlap limit.
pub fn challenge_suite(g: &Graph, d: &BoundedDecomposition, params: &DecompParams, seed: u64) -> Vec<VertexSet> {
    let n = g.n();
    let budget = (floor_u64(&(&params.lambda * params.kq())) as usize).min(n);
    let mut out = vec![VertexSet::empty(), g.all_vertices()];
    let mut rng = rng_from_seed(seed);
    let all: Vec<usize> = (0..n).collect();
    for _ in 0..RANDOM_CHALLENGES {
        out.push(VertexSet::new(all.choose_multiple(&mut rng, budget).copied()));
    }
    out.push(greedy_adversary(&d.spots, &d.avoiding, budget, &params.gamma, params.k, n));
    out
}

fn greedy_adversary(fam: &SpotFamily, avoiding: &VertexSet, budget: usize, gamma: &Q, k: usize, n: usize) -> VertexSet {
    let need = strictly_above(&(gamma * gamma * qu(k))) as usize;
    let mut weight: Vec<(usize, usize)> = fam
        .spots
        .iter()
        .enumerate()
        .map(|(i, s)| (s.u.intersection_len(avoiding) + s.w.intersection_len(avoiding), i))
        .filter(|&(w, _)| w > 0)
        .collect();
    weight.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut mult = vec![0usize; n];
    for &(_, i) in &weight {
        for v in fam.spots[i].vertices().iter() {
            mult[v] += 1;
        }
    }
    let mut chosen = vec![false; n];
    let mut used = 0;
    for &(_, i) in &weight {
        let verts = fam.spots[i].vertices();
        let have = verts.iter().filter(|&v| chosen[v]).count();
        let missing = need.saturating_sub(have);
        if missing == 0 || used + missing > budget {
            continue;
        }
        let mut pool: Vec<usize> = verts.iter().filter(|&v| !chosen[v]).collect();
        pool.sort_by(|&a, &b| mult[b].cmp(&mult[a]).then(a.cmp(&b)));
        for &v in pool.iter().take(missing) {
            chosen[v] = true;
        }
        used += missing;
    }
    VertexSet::from_sorted((0..n).filter(|&v| chosen[v]).collect())
}

/// Lexicographic `r`-subsets of `0..len`, fed to `f` until it returns `false`.
fn for_each_subset(len: usize, r: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if r > len {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = r;
        while i > 0 && idx[i - 1] == len - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial_capped(n: usize, r: usize, cap: u64) -> u64 {
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > cap as u128 {
            return cap.saturating_add(1);
        }
    }
    acc as u64
}

/// Checks every clause of the bounded-decomposition definition plus the
/// avoiding-threshold dichotomy. Clause names are `cN.<detail>`; the
/// avoiding property is evaluated on every challenge of size at most `Λk`
/// (larger ones are counted and skipped) and, when `Λk <= 6` and the count
/// is within `opts.exhaustive_limit`, on every forbidden set that matters.
pub fn verify_bounded(
    g: &Graph,
    d: &BoundedDecomposition,
    prepartition: &Partition,
    params: &DecompParams,
    challenges: &[VertexSet],
    opts: &VerifyOptions,
) -> ClauseReport {
    let mut r = ClauseReport::new();
    let n = g.n();
    let in_range = |s: &VertexSet| s.max().is_none_or(|v| v < n);
    let well_formed = params.validate().is_ok()
        && d.g_reg.n() == n
        && d.g_exp.n() == n
        && d.clusters.iter().all(in_range)
        && in_range(&d.avoiding)
        && d.spots.spots.iter().all(|s| s.validate().is_ok() && in_range(&s.u) && in_range(&s.w));
    r.clause("well_formed", well_formed);
    if !well_formed {
        return r;
    }
    let kq = params.kq();
    let m = &params.gamma * &kq;

    // 1: the expander part.
    let v_exp = d.g_exp.non_isolated();
    r.clause("c1.subgraph", d.g_exp.is_subgraph_of(g));
    r.clause("c1.min_degree", v_exp.iter().all(|v| qu(d.g_exp.degree(v)) > &params.rho * &kq));
    match certify_nowhere_dense(&d.g_exp, &m, &params.gamma, &opts.finder) {
        Ok((found, cert)) => {
            r.clause("c1.nowhere_dense", found.is_none()).count("c1.certification", cert.as_str());
        }
        Err(e) => {
            r.clause("c1.nowhere_dense", false).count("c1.certification", e.to_string());
        }
    }

    // 2: clusters.
    let union = d.cluster_union();
    let total: usize = d.clusters.iter().map(VertexSet::len).sum();
    let disjoint = total == union.len() && d.clusters.iter().all(|c| !c.is_empty());
    r.clause("c2.disjoint", disjoint);
    let mut cluster_of = vec![usize::MAX; n];
    for (i, c) in d.clusters.iter().enumerate() {
        for v in c.iter() {
            cluster_of[v] = i;
        }
    }

    // 3: G_reg.
    let reg_edges = d.g_reg.edges();
    r.clause("c3.subgraph", d.g_reg.is_subgraph_of(g) && reg_edges.iter().all(|&(a, b)| !d.g_exp.has_edge(a, b)));
    let on_clusters = reg_edges.iter().all(|&(a, b)| {
        cluster_of[a] != usize::MAX && cluster_of[b] != usize::MAX && cluster_of[a] != cluster_of[b]
    });
    r.clause("c3.cross_cluster", on_clusters);
    let pairs: Vec<(usize, usize)> = if on_clusters {
        let set: BTreeSet<(usize, usize)> = reg_edges
            .iter()
            .map(|&(a, b)| (cluster_of[a].min(cluster_of[b]), cluster_of[a].max(cluster_of[b])))
            .collect();
        set.into_iter().collect()
    } else {
        Vec::new()
    };
    let gamma2 = &params.gamma * &params.gamma;
    let verdicts: Vec<(bool, bool, bool, bool)> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (cx, cy) = (&d.clusters[x], &d.clusters[y]);
            let ymask = cy.mask(n);
            let complete = cx
                .iter()
                .all(|v| g.neighbors(v).iter().filter(|&&u| ymask[u]).all(|&u| d.g_reg.has_edge(v, u)));
            let e = ordered_pair_count(g, cx, cy).unwrap_or(0);
            let dense = qu(e as usize) >= &gamma2 * qu(cx.len() * cy.len());
            match check_pair(g, cx, cy, &params.eps, opts.regularity_cap) {
                Ok(v) => (complete, dense, v.regular, v.exact),
                Err(_) => (complete, dense, false, false),
            }
        })
        .collect();
    r.clause("c3.whole_pairs", verdicts.iter().all(|v| v.0))
        .clause("c3.dense_pairs", verdicts.iter().all(|v| v.1))
        .clause("c3.regular_pairs", verdicts.iter().all(|v| v.2))
        .count("c3.pairs", pairs.len())
        .count("c3.pairs_decided_exactly", verdicts.iter().filter(|v| v.3).count());

    // 4: sizes.
    let size = d.cluster_size();
    r.clause("c4.equal", d.clusters.iter().all(|c| Some(c.len()) == size));
    r.clause(
        "c4.window",
        d.clusters.iter().all(|c| &params.nu * &kq <= qu(c.len()) && qu(c.len()) <= &params.eps * &kq),
    );
    if let Some(s) = size {
        r.count("c4.cluster_size", s);
    }

    // 5: spots.
    let g_minus_exp = g.without_edges(&d.g_exp.edges());
    r.clause("c5.edge_disjoint", d.spots.edges_disjoint());
    r.clause(
        "c5.dense",
        d.spots.spots.par_iter().all(|s| is_dense_spot(&g_minus_exp, s, &m, &params.gamma).unwrap_or(false)),
    );
    let gd = d.spots.captured_graph(n);
    let closed = d.spots.spots.iter().all(|s| {
        let wmask = s.w.mask(n);
        s.u.iter().all(|v| g.neighbors(v).iter().filter(|&&u| wmask[u]).all(|&u| gd.has_edge(v, u)))
    });
    r.clause("c5.closure", closed).count("c5.spots", d.spots.len());

    // 6: regular pairs sit inside spots.
    let inside = pairs.iter().all(|&(x, y)| {
        let (cx, cy) = (&d.clusters[x], &d.clusters[y]);
        d.spots
            .spots
            .iter()
            .any(|s| (cx.is_subset(&s.u) && cy.is_subset(&s.w)) || (cx.is_subset(&s.w) && cy.is_subset(&s.u)))
    });
    r.clause("c6.inside_spots", inside);

    // 7: granularity.
    let labels = prepartition.labels();
    let in_class = d.clusters.iter().all(|c| {
        let first = c.iter().next().and_then(|v| labels.get(&v));
        first.is_some() && c.iter().all(|v| labels.get(&v) == first)
    });
    let exp_split = d.clusters.iter().all(|c| c.is_subset(&v_exp) || c.is_disjoint(&v_exp));
    let spot_split = d.clusters.iter().all(|c| {
        d.spots.spots.iter().all(|s| {
            let (a, b) = (c.intersection_len(&s.u), c.intersection_len(&s.w));
            (a == 0 || a == c.len()) && (b == 0 || b == c.len())
        })
    });
    r.clause("c7.prepartition", in_class).clause("c7.expander_split", exp_split).clause("c7.spot_split", spot_split);

    // 8: the avoiding set.
    let spot_vertices = VertexSet::new(d.spots.spots.iter().flat_map(|s| s.vertices().into_vec()));
    r.clause("c8.inside_spots", d.avoiding.is_subset(&spot_vertices));
    r.clause("c8.outside_clusters", d.avoiding.is_disjoint(&union));
    let allowed = &params.lambda * &kq;
    let limit = &params.eps * &kq;
    let mut evaluated = 0;
    let mut skipped = 0;
    let mut worst = 0;
    for u in challenges {
        if qu(u.len()) > allowed {
            skipped += 1;
            continue;
        }
        evaluated += 1;
        worst = worst.max(avoiding_exceptions(&d.spots, &d.avoiding, u, &params.gamma, params.k));
    }
    let budget = floor_u64(&allowed) as usize;
    let mut exhaustive = "skipped";
    if d.avoiding.is_empty() {
        exhaustive = "trivial";
    } else if budget <= 6 {
        let touching: Vec<&DenseSpot> =
            d.spots.spots.iter().filter(|s| !s.vertices().is_disjoint(&d.avoiding)).collect();
        let relevant: Vec<usize> = VertexSet::new(touching.iter().flat_map(|s| s.vertices().into_vec())).into_vec();
        let r_size = budget.min(relevant.len());
        if binomial_capped(relevant.len(), r_size, opts.exhaustive_limit) <= opts.exhaustive_limit {
            exhaustive = "complete";
            for_each_subset(relevant.len(), r_size, |idx| {
                let u = VertexSet::from_sorted(idx.iter().map(|&i| relevant[i]).collect());
                worst = worst.max(avoiding_exceptions(&d.spots, &d.avoiding, &u, &params.gamma, params.k));
                qu(worst) <= limit
            });
        }
    }
    r.clause("c8.avoiding", qu(worst) <= limit)
        .count("c8.challenges_evaluated", evaluated)
        .count("c8.challenges_oversized", skipped)
        .count("c8.max_exceptions", worst)
        .count("c8.exception_limit", format_rational(&limit))
        .count("c8.exhaustive", exhaustive);

    // Avoiding threshold b.
    let e_mask = d.avoiding.mask(n);
    let heavy = strictly_above(&params.b) as usize;
    let dichotomy = d.clusters.iter().all(|c| {
        let mut it = c.iter().map(|v| g.degree_into(v, &e_mask) >= heavy);
        let first = it.next();
        it.all(|h| Some(h) == first)
    });
    r.clause("threshold_b", dichotomy);
    r
}

/// The huge-degree clause (`mindeg_G(ℍ) >= Ω**k`, and every other vertex has
/// at most `Ω*k` neighbours along spot edges, `G_exp` and `ℍ`), then the
/// bounded clauses for `G − ℍ` under `prefix bounded.`.
pub fn verify_sparse(
    g: &Graph,
    s: &SparseDecomposition,
    prepartition: &Partition,
    params: &DecompParams,
    challenges: &[VertexSet],
    opts: &VerifyOptions,
) -> ClauseReport {
    let mut r = ClauseReport::new();
    let n = g.n();
    if s.huge.as_slice().last().is_some_and(|&v| v >= n) || s.bounded.g_exp.n() != n {
        r.clause("well_formed", false);
        return r;
    }
    let kq = params.kq();
    r.clause("s1.huge_min_degree", s.huge.iter().all(|v| qu(g.degree(v)) >= &params.omega_star2 * &kq));
    let hmask = s.huge.mask(n);
    let mut aux = s.bounded.spots.captured_graph(n).union(&s.bounded.g_exp);
    let at_huge: Vec<_> = g.edges().into_iter().filter(|&(a, b)| hmask[a] || hmask[b]).collect();
    aux = aux.with_edges(&at_huge);
    r.clause(
        "s1.bounded_outside_huge",
        (0..n).filter(|&v| !hmask[v]).all(|v| qu(aux.degree(v)) <= &params.omega_star * &kq),
    );
    r.count("s1.huge", s.huge.len());
    let rest = g.isolate(&s.huge);
    let blocks: Vec<VertexSet> =
        prepartition.blocks().iter().map(|b| b.difference(&s.huge)).filter(|b| !b.is_empty()).collect();
    match Partition::new(blocks) {
        Ok(p) => r.absorb("bounded", &verify_bounded(&rest, &s.bounded, &p, params, challenges, opts)),
        Err(_) => {
            r.clause("well_formed", false);
        }
    }
    r
}
