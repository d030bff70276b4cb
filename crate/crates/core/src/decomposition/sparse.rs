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

use super::pipeline::{decompose_bounded, PipelineTrace};
use super::{BoundedDecomposition, DecompParams, PipelineOptions, SparseDecomposition};
use crate::error::{input, precondition, Result};
use crate::gap::{create_gap_generic, create_gap_lks, generic_index_bound, lks_index_bound, OmegaSequence};
use crate::graph::{Edge, Graph, Partition, VertexSet};
use crate::lks::{degree_split, is_lks, minimize_to_lks_min, LksParams};
use crate::rational::{ceil_u64, format_rational, is_positive, q, qu, Q};
use crate::report::ClauseReport;

/// Output of the sparse wrappers. `subgraph` is the gap-creating subgraph
/// `G'` the decomposition is of; `params` carries `Ω* = Ω_i`, `Ω** = Ω_{i+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseRun {
    pub decomposition: SparseDecomposition,
    pub index: usize,
    pub subgraph: Graph,
    pub prepartition: Partition,
    pub params: DecompParams,
    pub trace: PipelineTrace,
    pub accounting: ClauseReport,
}

/// `{v : deg(v) >= Ωk}`.
pub fn huge_set(g: &Graph, k: usize, omega: &Q) -> VertexSet {
    let t = ceil_u64(&(omega * qu(k))) as usize;
    VertexSet::from_sorted((0..g.n()).filter(|&v| g.degree(v) >= t).collect())
}

/// `G_∇`: `E(G_reg) ∪ E(G_exp) ∪ E_G(ℍ, V) ∪ E_{G_𝒟}(𝔼, 𝔼 ∪ ⋃𝐕)`.
pub fn captured_edges(g: &Graph, s: &SparseDecomposition) -> Graph {
    let n = g.n();
    let hmask = s.huge.mask(n);
    let at_huge: Vec<Edge> = g.edges().into_iter().filter(|&(a, b)| hmask[a] || hmask[b]).collect();
    let inner = s.bounded.captured(n);
    let keep: Vec<Edge> = inner.edges().into_iter().filter(|&(a, b)| g.has_edge(a, b)).collect();
    Graph::from_edges_lossy(n, keep.into_iter().chain(at_huge))
}

fn run_bounded_part(
    gp: &Graph,
    huge: VertexSet,
    blocks: Vec<VertexSet>,
    params: &DecompParams,
    opts: &PipelineOptions,
) -> Result<(SparseDecomposition, Partition, PipelineTrace)> {
    let blocks: Vec<VertexSet> = blocks.into_iter().map(|b| b.difference(&huge)).filter(|b| !b.is_empty()).collect();
    let prepartition = Partition::new(blocks)?;
    let run = decompose_bounded(&gp.isolate(&huge), &prepartition, params, opts)?;
    Ok((SparseDecomposition { huge, bounded: run.decomposition }, prepartition, run.trace))
}

fn sparse_accounting(g: &Graph, gp: &Graph, s: &SparseDecomposition, extra: &Q, bound_params: &DecompParams) -> ClauseReport {
    let n = g.n();
    let captured = captured_edges(gp, s);
    let uncaptured = g.edge_count() - captured.edge_count();
    let ub = extra * bound_params.kq() * qu(n) + bound_params.uncaptured_bound(n);
    let loss = s.bounded.spot_loss(n);
    let sb = bound_params.spot_loss_bound(n);
    let mut r = ClauseReport::new();
    r.clause("uncaptured_within_bound", qu(uncaptured) <= ub)
        .clause("spot_loss_within_bound", qu(loss) <= sb)
        .count("edges", g.edge_count())
        .count("gap_removed_edges", g.edge_count() - gp.edge_count())
        .count("uncaptured", uncaptured)
        .count("uncaptured_bound", format_rational(&ub))
        .count("spot_loss", loss)
        .count("spot_loss_bound", format_rational(&sb))
        .count("huge", s.huge.len())
        .count("huge_edges", gp.edges().iter().filter(|&&(a, b)| s.huge.contains(a) || s.huge.contains(b)).count())
        .count("g_reg_edges", s.bounded.g_reg.edge_count())
        .count("g_exp_edges", s.bounded.g_exp.edge_count())
        .count("clusters", s.bounded.clusters.len())
        .count("avoiding", s.bounded.avoiding.len());
    r
}

/// Minimizes an LKS graph, creates the degree gap at some `i <= 100/η²`,
/// puts the vertices of `G'`-degree at least `Ω_{i+1}k` into `ℍ` and
/// decomposes `G' − ℍ` with respect to its `η/2`-small and large vertices.
/// Capture bounds use `Ω_{⌊100/η²⌋}`.
pub fn decompose_sparse_lks(
    g: &Graph,
    p: &LksParams,
    omegas: &OmegaSequence,
    params: &DecompParams,
    opts: &PipelineOptions,
) -> Result<SparseRun> {
    if !is_positive(&p.eta) {
        return input("eta must be positive");
    }
    if params.k != p.k {
        return input("decomposition k and LKS k differ");
    }
    if !is_lks(g, p) {
        return precondition("graph is not in LKS(n, k, eta)");
    }
    let minimal = minimize_to_lks_min(g, p)?;
    let gap = create_gap_lks(&minimal, p, omegas)?;
    let i = gap.star_index;
    let gp = gap.subgraph;
    let mut bp = params.clone();
    bp.omega_star = omegas.value(i);
    bp.omega_star2 = omegas.value(i + 1);
    bp.s = 2;
    let huge = huge_set(&gp, p.k, &bp.omega_star2);
    let split = degree_split(&gp, &p.halved());
    let (decomposition, prepartition, trace) = run_bounded_part(&gp, huge, vec![split.small, split.large], &bp, opts)?;
    let mut bound_params = bp.clone();
    bound_params.omega_star = bound_omega(omegas, lks_index_bound(&p.eta), g.n(), params);
    let mut accounting = sparse_accounting(&gp, &gp, &decomposition, &Q::from_integer(0.into()), &bound_params);
    accounting.count("index", i);
    Ok(SparseRun { decomposition, index: i, subgraph: gp, prepartition, params: bp, trace, accounting })
}

/// Creates a degree gap at some `i <= 4/η` (losing at most `ηkn` edges) and
/// decomposes the bounded part of the resulting `G'`. The accounting is
/// against the input graph, with the extra `ηkn` allowance.
pub fn decompose_generic(
    g: &Graph,
    eta: &Q,
    omegas: &OmegaSequence,
    params: &DecompParams,
    opts: &PipelineOptions,
) -> Result<SparseRun> {
    if !is_positive(eta) {
        return input("eta must be positive");
    }
    omegas.validate()?;
    if let Some(ratio) = omegas.max_ratio() {
        if ratio > eta / q(4, 1) {
            return precondition("omega ratios must be at most eta/4");
        }
    }
    let gap = create_gap_generic(g, params.k, eta, omegas)?;
    let i = gap.star_index;
    let gp = gap.subgraph;
    let mut bp = params.clone();
    bp.omega_star = omegas.value(i);
    bp.omega_star2 = omegas.value(i + 1);
    bp.s = 1;
    let huge = huge_set(&gp, params.k, &bp.omega_star2);
    let (decomposition, prepartition, trace) = run_bounded_part(&gp, huge, vec![g.all_vertices()], &bp, opts)?;
    let mut bound_params = bp.clone();
    bound_params.omega_star = bound_omega(omegas, generic_index_bound(eta), g.n(), params);
    let mut accounting = sparse_accounting(g, &gp, &decomposition, eta, &bound_params);
    accounting.count("index", i);
    Ok(SparseRun { decomposition, index: i, subgraph: gp, prepartition, params: bp, trace, accounting })
}

/// `Ω_j` for the capture bounds, capped at `⌈n/(εk)⌉`: beyond the cap the
/// `εΩ*kn` term alone exceeds `n²`, so the capped bound is still vacuous for
/// every graph on `n` vertices while avoiding arithmetic on numbers with
/// hundreds of thousands of digits.
fn bound_omega(omegas: &OmegaSequence, j: usize, n: usize, params: &DecompParams) -> Q {
    let omega = omegas.value(j.min(omegas.len()));
    if !is_positive(&params.eps) {
        return omega;
    }
    let cap = (qu(n.max(1)) / (&params.eps * qu(params.k))).ceil();
    if omega > cap {
        cap
    } else {
        omega
    }
}

/// `𝐆_reg`: one node per cluster, an edge where `G_reg` has density at
/// least `γ²` between the two clusters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterGraph {
    pub graph: Graph,
}

pub fn cluster_graph(d: &BoundedDecomposition, gamma: &Q) -> ClusterGraph {
    let n = d.g_reg.n();
    let mut cluster_of = vec![usize::MAX; n];
    for (i, c) in d.clusters.iter().enumerate() {
        for v in c.iter() {
            cluster_of[v] = i;
        }
    }
    let mut count: std::collections::BTreeMap<Edge, usize> = Default::default();
    for (a, b) in d.g_reg.edges() {
        let (x, y) = (cluster_of[a], cluster_of[b]);
        if x != usize::MAX && y != usize::MAX && x != y {
            *count.entry((x.min(y), x.max(y))).or_default() += 1;
        }
    }
    let g2 = gamma * gamma;
    let edges = count
        .into_iter()
        .filter(|&((x, y), e)| qu(e) >= &g2 * qu(d.clusters[x].len() * d.clusters[y].len()))
        .map(|(p, _)| p);
    ClusterGraph { graph: Graph::from_edges_lossy(d.clusters.len(), edges) }
}

impl ClusterGraph {
    /// Degree bound `Ω*k/(γ²𝔠) <= Ω*/(γ²ν)` and, for every vertex outside
    /// `ℍ`, fewer than `2(Ω*)²k/(γ²𝔠) <= 2(Ω*)²/(γ²ν)` clusters reached
    /// along spot edges.
    pub fn check_bounds(&self, s: &SparseDecomposition, params: &DecompParams) -> ClauseReport {
        let mut r = ClauseReport::new();
        let d = &s.bounded;
        let g2 = &params.gamma * &params.gamma;
        let maxdeg = self.graph.max_degree();
        r.count("max_degree", maxdeg).count("clusters", d.clusters.len());
        let Some(c) = d.cluster_size() else {
            r.clause("max_degree_bound", true).clause("spot_reach_bound", true);
            return r;
        };
        let deg_sharp = &params.omega_star * params.kq() / (&g2 * qu(c));
        let deg_nu = &params.omega_star / (&g2 * &params.nu);
        let reach_sharp = q(2, 1) * &params.omega_star * &params.omega_star * params.kq() / (&g2 * qu(c));
        let reach_nu = q(2, 1) * &params.omega_star * &params.omega_star / (&g2 * &params.nu);
        let n = d.g_reg.n();
        let gd = d.spots.captured_graph(n);
        let mut cluster_of = vec![usize::MAX; n];
        for (i, cl) in d.clusters.iter().enumerate() {
            for v in cl.iter() {
                cluster_of[v] = i;
            }
        }
        let reach = (0..n)
            .filter(|&x| !s.huge.contains(x))
            .map(|x| {
                let mut seen: Vec<usize> =
                    gd.neighbors(x).iter().map(|&u| cluster_of[u]).filter(|&c| c != usize::MAX).collect();
                seen.sort_unstable();
                seen.dedup();
                seen.len()
            })
            .max()
            .unwrap_or(0);
        r.clause("max_degree_bound", qu(maxdeg) <= deg_sharp && qu(maxdeg) <= deg_nu)
            .clause("spot_reach_bound", qu(reach) < reach_sharp && qu(reach) < reach_nu)
            .count("max_spot_reach", reach)
            .count("degree_bound", format_rational(&deg_nu))
            .count("reach_bound", format_rational(&reach_nu));
        r
    }
}

/// For a dense graph with `k = cn`: `ℍ` empty, `V(G_exp)` empty and
/// `|𝔼| <= εk`. The parameter relations the argument needs are reported
/// under `counts.pre_*`; `counts.applicable` is their conjunction.
pub fn check_dense_degeneration(g: &Graph, s: &SparseDecomposition, params: &DecompParams, a: &Q, c: &Q) -> ClauseReport {
    let n = g.n();
    let nq = qu(n);
    let kq = params.kq();
    let cn = c * &nq;
    let dense = qu(g.edge_count()) >= a * &nq * &nq;
    let one = Q::from_integer(1.into());
    let linear = &kq - &cn < one && &cn - &kq < one;
    let huge_threshold = &params.omega_star2 * &kq > nq;
    let lambda_covers = nq <= &params.lambda * &kq;
    let c_rho = c * &params.rho;
    let expander_forced = c_rho > params.gamma;
    let applicable = dense && linear && huge_threshold && lambda_covers && expander_forced;
    let mut r = ClauseReport::new();
    r.clause("huge_empty", s.huge.is_empty())
        .clause("expander_empty", s.bounded.g_exp.edge_count() == 0)
        .clause("avoiding_small", qu(s.bounded.avoiding.len()) <= &params.eps * &kq)
        .count("pre_dense", dense)
        .count("pre_k_linear", linear)
        .count("pre_huge_threshold_above_n", huge_threshold)
        .count("pre_lambda_k_covers_n", lambda_covers)
        .count("pre_c_rho_above_gamma", expander_forced)
        .count("c_rho_over_gamma", format_rational(&(c_rho / &params.gamma)))
        .count("vacuous_capture_risk", params.k > n)
        .count("applicable", applicable)
        .count("avoiding", s.bounded.avoiding.len());
    r
}
