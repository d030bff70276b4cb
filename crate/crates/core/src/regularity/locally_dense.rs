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

//! Simultaneous regularization of the pairs `(W_i, W_j)`, `ij ∈ E(F)`, of a
//! locally dense graph, plus a verifier for the five output conclusions and
//! the accounting of edges left outside dense regular pairs.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Edge, Graph, Partition, VertexSet};
use crate::rational::{ceil_u64, floor_u64, is_positive, pow, q, qu, Q};
use crate::regularity::index::{partition_regularity, GarbagePartition, PairPartitionState};
use crate::regularity::pair::{check_pair, DEFAULT_REGULARITY_CAP};
use crate::regularity::pump::{class_count_cap, refine_and_equalize, Limits};
use crate::regularity::vizing::{vizing_matchings, PatternGraph};
use crate::report::ClauseReport;

/// Hard ceiling on pumping rounds regardless of the formal budget.
pub const DEFAULT_ROUND_CAP: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegularizeOptions {
    /// Defaults to `ε/8`.
    #[serde(default, with = "crate::rational::serde_opt_q")]
    pub eps_tilde: Option<Q>,
    pub exact_cap: usize,
    pub round_cap: usize,
}

impl Default for RegularizeOptions {
    fn default() -> Self {
        RegularizeOptions { eps_tilde: None, exact_cap: DEFAULT_REGULARITY_CAP, round_cap: DEFAULT_ROUND_CAP }
    }
}

/// Per-set partitions. JSON: `{"sets": [{"garbage": [...], "clusters": [...]}, ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsemblePartition {
    pub sets: Vec<GarbagePartition>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizeOutcome {
    pub partition: EnsemblePartition,
    pub rounds: usize,
    /// Initial cluster size, relaxations applied, and the formal budget.
    pub diagnostics: ClauseReport,
}

/// `⌈3691(m+1)/ε̃⁶⌉`, saturating.
pub fn round_budget(m: usize, eps_tilde: &Q) -> u64 {
    let b = q(3691, 1) * qu(m + 1) / pow(eps_tilde, 6);
    let c = b.ceil().to_integer();
    num::ToPrimitive::to_u64(&c).unwrap_or(u64::MAX)
}

/// `p <= q_MAXCL`, where `q_MAXCL` iterates `q -> 2q·16^q` from `⌈4z/ε̃⌉`
/// `round_budget` times (at least once).
pub fn within_max_clusters(p: usize, z: usize, eps_tilde: &Q) -> bool {
    let q0 = ceil_u64(&(q(4, 1) * qu(z) / eps_tilde));
    if p as u64 <= q0 {
        return true;
    }
    (p as u128) <= class_count_cap(q0)
}

fn validate_inputs(h: &Graph, f: &PatternGraph, ensemble: &[VertexSet], z: &Partition, eps: &Q) -> Result<()> {
    if !is_positive(eps) {
        return input("epsilon must be positive");
    }
    if f.l() != ensemble.len() {
        return input(format!("pattern has {} vertices but the ensemble has {} sets", f.l(), ensemble.len()));
    }
    if f.graph().max_degree() > f.m() {
        return input("pattern degree exceeds its bound");
    }
    let mut seen = vec![false; h.n()];
    for w in ensemble {
        if w.is_empty() {
            return input("ensemble sets must be nonempty");
        }
        for v in w.iter() {
            if v >= h.n() || seen[v] {
                return input("ensemble sets must be disjoint vertex sets of the graph");
            }
            seen[v] = true;
        }
    }
    let (lo, hi) = (
        ensemble.iter().map(VertexSet::len).min().unwrap_or(0),
        ensemble.iter().map(VertexSet::len).max().unwrap_or(0),
    );
    if 2 * lo < hi {
        return input("ensemble violates 2|W_i| >= |W_j|");
    }
    let ground = z.ground();
    if ensemble.iter().any(|w| !w.is_subset(&ground)) {
        return input("prepartition must cover every ensemble set");
    }
    Ok(())
}

/// Initial partitions: every `W_i ∩ Z_x` is cut into pieces of one common
/// size `c`, remainders going to garbage. Prefers the largest `c` with
/// garbage `<= ε̃|W_i|` and `1 + 1/ε <= p_i <= 4z/ε`; falls back to dropping
/// the lower bound, then the upper bound. Returns the partitions, `c` and
/// the tier used (0 = all constraints met).
fn initial_partitions(ensemble: &[VertexSet], z: &Partition, eps: &Q, eps_t: &Q) -> Result<(Vec<GarbagePartition>, usize, u8)> {
    let labels = z.labels();
    let pieces: Vec<Vec<Vec<usize>>> = ensemble
        .iter()
        .map(|w| {
            let mut by: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for v in w.iter() {
                by.entry(labels[&v]).or_default().push(v);
            }
            by.into_values().collect()
        })
        .collect();
    let lower = q(1, 1) + eps.recip();
    let upper = q(4, 1) * qu(z.len()) / eps;
    let max_c = ensemble.iter().map(VertexSet::len).min().unwrap_or(1).max(1);
    let stats = |c: usize| -> Vec<(usize, usize)> {
        pieces
            .iter()
            .map(|ps| (ps.iter().map(|p| p.len() / c).sum(), ps.iter().map(|p| p.len() % c).sum()))
            .collect()
    };
    let garbage_ok = |c: usize| stats(c).iter().zip(ensemble).all(|(&(_, g), w)| qu(g) <= eps_t * qu(w.len()));
    let lower_ok = |c: usize| stats(c).iter().all(|&(p, _)| qu(p) >= lower);
    let upper_ok = |c: usize| stats(c).iter().all(|&(p, _)| p >= 1 && qu(p) <= upper);
    let tiers: [&dyn Fn(usize) -> bool; 3] = [
        &|c| garbage_ok(c) && lower_ok(c) && upper_ok(c),
        &|c| garbage_ok(c) && upper_ok(c),
        &|c| garbage_ok(c) && lower_ok(c),
    ];
    let mut chosen = (1usize, 3u8);
    'tiers: for (t, ok) in tiers.iter().enumerate() {
        for c in (1..=max_c).rev() {
            if ok(c) {
                chosen = (c, t as u8);
                break 'tiers;
            }
        }
    }
    let (c, tier) = chosen;
    let parts = pieces
        .iter()
        .map(|ps| {
            let mut clusters = Vec::new();
            let mut garbage = Vec::new();
            for p in ps {
                let full = p.len() / c;
                for i in 0..full {
                    clusters.push(VertexSet::from_sorted(p[i * c..(i + 1) * c].to_vec()));
                }
                garbage.extend_from_slice(&p[full * c..]);
            }
            GarbagePartition::new(VertexSet::new(garbage), clusters)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((parts, c, tier))
}

/// Regularizes `H` along the pattern `F`: starting from equal-size clusters
/// inside the prepartition classes, repeatedly picks a matching of a proper
/// edge colouring of `F` in which at least an `ε̃`-fraction of pairs are
/// `ε̃`-irregularly partitioned and pumps all of them at once (every other
/// set is re-equalized alongside), until no matching qualifies.
pub fn regularize_locally_dense(
    h: &Graph,
    f: &PatternGraph,
    ensemble: &[VertexSet],
    prepartition: &Partition,
    eps: &Q,
    opts: &RegularizeOptions,
) -> Result<RegularizeOutcome> {
    validate_inputs(h, f, ensemble, prepartition, eps)?;
    let eps_t = opts.eps_tilde.clone().unwrap_or_else(|| eps / q(8, 1));
    if !is_positive(&eps_t) || eps_t > *eps {
        return input("eps_tilde must lie in (0, eps]");
    }
    let (mut parts, c0, tier) = initial_partitions(ensemble, prepartition, eps, &eps_t)?;
    let matchings = vizing_matchings(f);
    let budget = round_budget(f.m(), &eps_t);
    let cap = (opts.round_cap as u64).min(budget);
    let base_p = ceil_u64(&eps.recip());
    let mut version = vec![0u64; parts.len()];
    let mut cache: HashMap<Edge, (u64, u64, bool)> = HashMap::new();
    let mut rounds = 0usize;
    let mut relaxed_lower = 0usize;
    loop {
        let mut chosen: Option<Vec<Edge>> = None;
        for m in &matchings {
            let mut irregular = Vec::new();
            for &(x, y) in m {
                let hit = cache.get(&(x, y)).filter(|c| c.0 == version[x] && c.1 == version[y]).map(|c| c.2);
                let irr = match hit {
                    Some(b) => b,
                    None => {
                        let st = PairPartitionState { a_side: parts[x].clone(), b_side: parts[y].clone() };
                        let b = !partition_regularity(h, &st, &eps_t, opts.exact_cap)?.regular;
                        cache.insert((x, y), (version[x], version[y], b));
                        b
                    }
                };
                if irr {
                    irregular.push((x, y));
                }
            }
            if !irregular.is_empty() && qu(irregular.len()) >= &eps_t * qu(m.len()) {
                chosen = Some(irregular);
                break;
            }
        }
        let Some(pairs) = chosen else { break };
        if rounds as u64 >= cap {
            return Err(Error::Budget(format!("regularization did not settle within {cap} pumping rounds")));
        }
        rounds += 1;
        let step = rounds as u64;
        let mut order: Vec<usize> = Vec::new();
        let mut idx = Vec::new();
        let mut in_pair = vec![false; parts.len()];
        for &(x, y) in &pairs {
            idx.push((order.len(), order.len() + 1));
            order.push(x);
            order.push(y);
            in_pair[x] = true;
            in_pair[y] = true;
        }
        order.extend((0..parts.len()).filter(|&z| !in_pair[z]));
        let sub: Vec<GarbagePartition> = order.iter().map(|&i| parts[i].clone()).collect();
        let mut splits: Vec<Vec<Vec<VertexSet>>> = sub.iter().map(|p| vec![Vec::new(); p.clusters().len()]).collect();
        for (pi, &(x, y)) in pairs.iter().enumerate() {
            let st = PairPartitionState { a_side: parts[x].clone(), b_side: parts[y].clone() };
            let reg = partition_regularity(h, &st, &eps_t, opts.exact_cap)?;
            for (i, j, w) in reg.irregular {
                splits[2 * pi][i].push(w.u);
                splits[2 * pi + 1][j].push(w.w);
            }
        }
        let qv = parts.iter().map(GarbagePartition::class_count).max().unwrap_or(1) as u64;
        let mut limits = Limits { p: base_p + step, q: qv, eps: eps_t.clone(), lower_count: true };
        let out = match refine_and_equalize(h, &sub, &splits, &idx, &limits) {
            Ok(o) => o,
            Err(Error::Unattainable(_)) => {
                limits.lower_count = false;
                relaxed_lower += 1;
                refine_and_equalize(h, &sub, &splits, &idx, &limits)?
            }
            Err(e) => return Err(e),
        };
        for (np, &i) in out.0.into_iter().zip(&order) {
            if np != parts[i] {
                parts[i] = np;
                version[i] += 1;
            }
        }
    }
    let mut diag = ClauseReport::new();
    diag.count("initial_cluster_size", c0)
        .count("initial_tier", tier)
        .count("rounds", rounds)
        .count("round_budget", budget)
        .count("lower_count_relaxed_rounds", relaxed_lower)
        .count("matchings", matchings.len());
    Ok(RegularizeOutcome { partition: EnsemblePartition { sets: parts }, rounds, diagnostics: diag })
}

/// Checks the five regularization conclusions on given partitions. Pair
/// regularity uses the exact oracle for clusters within `cap`
/// (`counts.all_pairs_exact` says whether every pair was decided exactly).
pub fn verify_locally_dense(
    h: &Graph,
    f: &PatternGraph,
    ensemble: &[VertexSet],
    prepartition: &Partition,
    eps: &Q,
    sets: &[GarbagePartition],
    cap: usize,
) -> Result<ClauseReport> {
    validate_inputs(h, f, ensemble, prepartition, eps)?;
    if sets.len() != ensemble.len() {
        return input("one partition per ensemble set is required");
    }
    let eps_t = eps / q(8, 1);
    let mut r = ClauseReport::new();
    r.clause("partitions_cover_sets", sets.iter().zip(ensemble).all(|(p, w)| p.ground() == w));
    let z = prepartition.len();
    let inv = eps.recip();
    r.clause(
        "cluster_counts",
        sets.iter().all(|p| qu(p.clusters().len()) >= inv && within_max_clusters(p.clusters().len(), z, &eps_t)),
    );
    let sizes: Vec<usize> = sets.iter().flat_map(|p| p.clusters().iter().map(VertexSet::len)).collect();
    r.clause("uniform_cluster_size", sizes.windows(2).all(|w| w[0] == w[1]));
    let labels = prepartition.labels();
    r.clause(
        "respects_prepartition",
        sets.iter().flat_map(|p| p.clusters()).all(|c| c.iter().all(|v| labels.get(&v) == labels.get(&c.as_slice()[0]))),
    );
    let garbage: usize = sets.iter().map(|p| p.garbage().len()).sum();
    let total: usize = ensemble.iter().map(VertexSet::len).sum();
    r.clause("garbage_small", qu(garbage) < eps * qu(total));
    let mut pairs = 0usize;
    let mut irregular = 0usize;
    let mut exact = true;
    for (x, y) in f.edges() {
        for a in sets[x].clusters() {
            for b in sets[y].clusters() {
                let v = check_pair(h, a, b, eps, cap)?;
                pairs += 1;
                exact &= v.exact;
                irregular += usize::from(!v.regular);
            }
        }
    }
    r.clause("few_irregular_pairs", qu(irregular) <= eps * qu(pairs));
    r.count("pairs", pairs)
        .count("irregular_pairs", irregular)
        .count("all_pairs_exact", exact)
        .count("garbage", garbage)
        .count("min_clusters", sets.iter().map(|p| p.clusters().len()).min().unwrap_or(0))
        .count("max_clusters", sets.iter().map(|p| p.clusters().len()).max().unwrap_or(0))
        .count("cluster_size", sizes.first().copied().unwrap_or(0));
    Ok(r)
}

/// Splits the edges of `H` into those in irregular cluster pairs, at garbage,
/// in cluster pairs of density below `γ²`, and the rest, and compares the
/// first three with `4εnk/γ`, `εΩnk` and `γkn`.
#[allow(clippy::too_many_arguments)]
pub fn account_uncaptured(
    h: &Graph,
    f: &PatternGraph,
    ensemble: &[VertexSet],
    sets: &[GarbagePartition],
    gamma: &Q,
    eps: &Q,
    omega: &Q,
    k: usize,
    cap: usize,
) -> Result<ClauseReport> {
    let n = h.n();
    if sets.len() != ensemble.len() || f.l() != ensemble.len() {
        return input("one partition per ensemble set and pattern vertex is required");
    }
    if qu(h.max_degree()) > omega * qu(k) {
        return input("maximum degree exceeds omega*k");
    }
    if h.edge_count() > k * n {
        return input("more than kn edges");
    }
    let mut set_of = vec![usize::MAX; n];
    for (i, w) in ensemble.iter().enumerate() {
        for v in w.iter() {
            set_of[v] = i;
        }
    }
    for (a, b) in h.edges() {
        let (i, j) = (set_of[a], set_of[b]);
        if i == usize::MAX || j == usize::MAX || i == j || !f.graph().has_edge(i, j) {
            return input(format!("edge ({a},{b}) is not captured by a pattern edge"));
        }
    }
    for (i, j) in f.edges() {
        if crate::graph::density(h, &ensemble[i], &ensemble[j])? < *gamma {
            return input(format!("pattern edge ({i},{j}) has density below gamma"));
        }
    }
    let mut cluster_of = vec![usize::MAX; n];
    let mut clusters: Vec<&VertexSet> = Vec::new();
    for p in sets {
        for c in p.clusters() {
            for v in c.iter() {
                cluster_of[v] = clusters.len();
            }
            clusters.push(c);
        }
    }
    let mut verdict: HashMap<(usize, usize), (bool, Q)> = HashMap::new();
    let (mut irregular, mut garbage, mut sparse, mut good) = (0usize, 0usize, 0usize, 0usize);
    let gamma2 = gamma * gamma;
    for (a, b) in h.edges() {
        let (ca, cb) = (cluster_of[a], cluster_of[b]);
        if ca == usize::MAX || cb == usize::MAX {
            garbage += 1;
            continue;
        }
        let key = (ca.min(cb), ca.max(cb));
        if !verdict.contains_key(&key) {
            let v = check_pair(h, clusters[key.0], clusters[key.1], eps, cap)?;
            let d = crate::graph::density(h, clusters[key.0], clusters[key.1])?;
            verdict.insert(key, (v.regular, d));
        }
        let (regular, d) = &verdict[&key];
        if !regular {
            irregular += 1;
        } else if *d < gamma2 {
            sparse += 1;
        } else {
            good += 1;
        }
    }
    let nk = qu(n) * qu(k);
    let b_irr = q(4, 1) * eps * &nk / gamma;
    let b_gar = eps * omega * &nk;
    let b_sp = gamma * &nk;
    let total = irregular + garbage + sparse;
    let mut r = ClauseReport::new();
    r.clause("irregular_within_bound", qu(irregular) <= b_irr)
        .clause("garbage_within_bound", qu(garbage) <= b_gar)
        .clause("sparse_within_bound", qu(sparse) <= b_sp)
        .clause("total_within_bound", qu(total) <= &b_irr + &b_gar + &b_sp)
        .clause("categories_partition_edges", total + good == h.edge_count())
        .count("irregular", irregular)
        .count("garbage", garbage)
        .count("sparse", sparse)
        .count("good", good)
        .count("uncaptured", total)
        .count("bound_total_floor", floor_u64(&(&b_irr + &b_gar + &b_sp)));
    Ok(r)
}
