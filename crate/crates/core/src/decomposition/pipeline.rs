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


use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::verify::{certify_nowhere_dense, Certification};
use super::{BoundedDecomposition, DecompParams, PipelineOptions};
use crate::error::{input, precondition, Result};
use crate::graph::{min_degree_subgraph, ordered_pair_count, Edge, Graph, Partition, VertexSet};
use crate::rational::{ceil_u64, floor_u64, format_rational, qu, strictly_above, Q};
use crate::regularity::{check_pair, regularize_locally_dense, PatternGraph};
use crate::report::ClauseReport;
use crate::spots::{extract_spot_family, DenseSpot, SpotFamily};

/// Intermediate quantities of one pipeline run, kept for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineTrace {
    #[serde(with = "crate::rational::serde_q")]
    pub nu_tilde: Q,
    pub extraction_passes: usize,
    /// Spots found inside the candidate expander after plain extraction stopped.
    pub expander_spots: usize,
    pub expander_certification: Certification,
    pub atoms: usize,
    pub chunked_atoms: usize,
    pub small_atoms: usize,
    pub chunks: usize,
    pub pattern_edges: usize,
    pub pattern_max_degree: usize,
    pub prepartition_classes: usize,
    /// `|V_⇝𝔼|`: vertices with more than `b` neighbours in `𝔼`.
    pub heavy_towards_avoiding: usize,
    /// Vertices of chunks left out of every cluster.
    pub regularity_garbage: usize,
    pub cluster_pairs_checked: usize,
    pub regularize: Option<ClauseReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedRun {
    pub decomposition: BoundedDecomposition,
    pub trace: PipelineTrace,
    pub accounting: ClauseReport,
}

fn check_preconditions(g: &Graph, prepartition: &Partition, params: &DecompParams) -> Result<()> {
    params.validate()?;
    let n = g.n();
    let kq = params.kq();
    if qu(g.edge_count()) > &kq * qu(n) {
        return precondition(format!("e(G) = {} exceeds k·n = {}", g.edge_count(), params.k * n));
    }
    if qu(g.max_degree()) > &params.omega_star * &kq {
        return precondition(format!(
            "maxdeg(G) = {} exceeds Ω*·k = {}",
            g.max_degree(),
            format_rational(&(&params.omega_star * &kq))
        ));
    }
    if prepartition.len() > params.s {
        return precondition(format!("prepartition has {} classes, more than s = {}", prepartition.len(), params.s));
    }
    let ground = prepartition.ground();
    if ground.as_slice().last().is_some_and(|&v| v >= n) {
        return input("prepartition names a vertex outside the graph");
    }
    if !g.non_isolated().is_subset(&ground) {
        return input("prepartition must cover every non-isolated vertex");
    }
    Ok(())
}

/// Greedy extraction, then spots hidden in the `(⌊ρk⌋+1)`-core of the
/// remainder are pulled out one at a time until that core certifies as
/// nowhere-dense. Returns the family, `G_exp`, and bookkeeping.
fn spots_and_expander(
    g: &Graph,
    params: &DecompParams,
    opts: &PipelineOptions,
) -> Result<(SpotFamily, Graph, usize, usize, Certification)> {
    let m = &params.gamma * params.kq();
    let ell = strictly_above(&(&params.rho * params.kq())) as usize;
    let mut fam = SpotFamily::default();
    let mut residual = g.clone();
    let mut passes = 0;
    let mut hidden = 0;
    loop {
        passes += 1;
        for s in extract_spot_family(&residual, &m, &params.gamma, &opts.finder)?.spots {
            residual = residual.without_edges(&s.f);
            fam.spots.push(s);
        }
        let core = min_degree_subgraph(&residual, ell);
        match certify_nowhere_dense(&core, &m, &params.gamma, &opts.finder)? {
            (None, cert) => return Ok((fam, core, passes, hidden, cert)),
            (Some(s), _) => {
                // Widen to every remaining edge between the sides so the
                // family stays closed under G[U, W].
                let full = DenseSpot::from_pair(&residual, s.u, s.w).expect("a spot has edges");
                residual = residual.without_edges(&full.f);
                fam.spots.push(full);
                hidden += 1;
            }
        }
    }
}

/// Atoms of `⊞_D {U, W, V ∖ V(D)}` inside `V(G_𝒟)`, with their side
/// signatures `(spot, 0 for U / 1 for W)`, ordered by smallest vertex.
fn atoms(n: usize, fam: &SpotFamily) -> Vec<(Vec<(usize, u8)>, Vec<usize>)> {
    let mut sig: Vec<Vec<(usize, u8)>> = vec![Vec::new(); n];
    for (i, s) in fam.spots.iter().enumerate() {
        for v in s.u.iter() {
            sig[v].push((i, 0));
        }
        for v in s.w.iter() {
            sig[v].push((i, 1));
        }
    }
    let mut groups: BTreeMap<Vec<(usize, u8)>, Vec<usize>> = BTreeMap::new();
    for (v, s) in sig.into_iter().enumerate() {
        if !s.is_empty() {
            groups.entry(s).or_default().push(v);
        }
    }
    let mut out: Vec<_> = groups.into_iter().collect();
    out.sort_by_key(|(_, vs)| vs[0]);
    out
}

/// Some spot has `a` on one side and `b` on the other.
fn opposite_in_some_spot(a: &[(usize, u8)], b: &[(usize, u8)]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i].1 != b[j].1 {
                    return true;
                }
                i += 1;
                j += 1;
            }
        }
    }
    false
}

/// `⌈|B| / (2ν̃k)⌉` near-equal consecutive pieces, at most `|B|` of them.
fn chunk(atom: &[usize], two_nu_k: &Q) -> Vec<VertexSet> {
    let parts = (ceil_u64(&(qu(atom.len()) / two_nu_k)) as usize).clamp(1, atom.len());
    let (base, extra) = (atom.len() / parts, atom.len() % parts);
    let mut out = Vec::with_capacity(parts);
    let mut at = 0;
    for i in 0..parts {
        let len = base + usize::from(i < extra);
        out.push(VertexSet::from_sorted(atom[at..at + len].to_vec()));
        at += len;
    }
    out
}

/// Builds a bounded decomposition of `g` with respect to `prepartition`:
/// dense spots, the expander core of what they leave, atoms of the spot
/// sides cut into chunks (small atoms form `𝔼`), regularization of the spot
/// graph along chunk pairs that share a spot and have density at least `γ`,
/// and finally `G_reg` from the regular cluster pairs of density above `γ²`.
pub fn decompose_bounded(
    g: &Graph,
    prepartition: &Partition,
    params: &DecompParams,
    opts: &PipelineOptions,
) -> Result<BoundedRun> {
    check_preconditions(g, prepartition, params)?;
    let n = g.n();
    let kq = params.kq();
    let (fam, g_exp, passes, hidden, cert) = spots_and_expander(g, params, opts)?;
    let gd = fam.captured_graph(n);

    let nu_t = params.nu_tilde();
    let two_nu_k = qu(2) * &nu_t * &kq;
    let atom_list = atoms(n, &fam);
    let mut chunks: Vec<VertexSet> = Vec::new();
    let mut chunk_sig: Vec<&[(usize, u8)]> = Vec::new();
    let mut avoiding = Vec::new();
    let mut chunked_atoms = 0;
    for (sig, vs) in &atom_list {
        if qu(vs.len()) > two_nu_k {
            chunked_atoms += 1;
            for c in chunk(vs, &two_nu_k) {
                chunks.push(c);
                chunk_sig.push(sig);
            }
        } else {
            avoiding.extend_from_slice(vs);
        }
    }
    let avoiding = VertexSet::new(avoiding);
    if !chunks.is_empty() && ceil_u64(&(&params.nu * &kq)) > floor_u64(&(&params.eps * &kq)) {
        return precondition("the cluster size window [νk, εk] contains no integer");
    }

    let mut chunk_of = vec![usize::MAX; n];
    for (i, c) in chunks.iter().enumerate() {
        for v in c.iter() {
            chunk_of[v] = i;
        }
    }
    let mut between: HashMap<Edge, u64> = HashMap::new();
    for (a, b) in g.edges() {
        let (x, y) = (chunk_of[a], chunk_of[b]);
        if x != usize::MAX && y != usize::MAX && x != y {
            *between.entry((x.min(y), x.max(y))).or_default() += 1;
        }
    }
    let mut pattern_edges: Vec<Edge> = between
        .into_iter()
        .filter(|&((x, y), e)| {
            opposite_in_some_spot(chunk_sig[x], chunk_sig[y])
                && qu(e as usize) >= &params.gamma * qu(chunks[x].len() * chunks[y].len())
        })
        .map(|(p, _)| p)
        .collect();
    pattern_edges.sort_unstable();
    let pattern_graph = Graph::from_edges_lossy(chunks.len(), pattern_edges.iter().copied());
    let pattern_max_degree = pattern_graph.max_degree();

    let labels = prepartition.labels();
    let heavy = strictly_above(&params.b) as usize;
    let e_mask = avoiding.mask(n);
    let exp_vertices = g_exp.non_isolated().mask(n);
    let heavy_mask: Vec<bool> = (0..n).map(|v| g.degree_into(v, &e_mask) >= heavy).collect();
    let z = Partition::by_key(&g.all_vertices(), |v| {
        (labels.get(&v).copied().unwrap_or(usize::MAX), exp_vertices[v], heavy_mask[v])
    });

    let mut clusters: Vec<VertexSet> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    let mut garbage = 0;
    let mut regularize_diag = None;
    if !chunks.is_empty() {
        let f = PatternGraph::new(chunks.len(), pattern_edges.iter().copied(), pattern_max_degree)?;
        let out = regularize_locally_dense(&gd, &f, &chunks, &z, &params.eps, &opts.regularize)?;
        for (i, part) in out.partition.sets.iter().enumerate() {
            garbage += part.garbage().len();
            for c in part.clusters() {
                clusters.push(c.clone());
                owner.push(i);
            }
        }
        regularize_diag = Some(out.diagnostics);
    }

    let mut by_chunk: Vec<Vec<usize>> = vec![Vec::new(); chunks.len()];
    for (ci, &o) in owner.iter().enumerate() {
        by_chunk[o].push(ci);
    }
    let candidates: Vec<(usize, usize)> = pattern_edges
        .iter()
        .flat_map(|&(a, b)| {
            let (xs, ys) = (&by_chunk[a], &by_chunk[b]);
            xs.iter().flat_map(move |&x| ys.iter().map(move |&y| (x, y)))
        })
        .collect();
    let gamma2 = &params.gamma * &params.gamma;
    let kept: Vec<Option<Vec<Edge>>> = candidates
        .par_iter()
        .map(|&(x, y)| -> Result<Option<Vec<Edge>>> {
            let (cx, cy) = (&clusters[x], &clusters[y]);
            let e = ordered_pair_count(g, cx, cy)?;
            if qu(e as usize) <= &gamma2 * qu(cx.len() * cy.len()) {
                return Ok(None);
            }
            if !check_pair(g, cx, cy, &params.eps, opts.regularity_cap)?.regular {
                return Ok(None);
            }
            let ymask = cy.mask(n);
            Ok(Some(
                cx.iter()
                    .flat_map(|v| g.neighbors(v).iter().filter(|&&u| ymask[u]).map(move |&u| (v.min(u), v.max(u))))
                    .collect(),
            ))
        })
        .collect::<Result<_>>()?;
    let g_reg = Graph::from_edges_lossy(n, kept.into_iter().flatten().flatten());

    let trace = PipelineTrace {
        nu_tilde: nu_t,
        extraction_passes: passes,
        expander_spots: hidden,
        expander_certification: cert,
        atoms: atom_list.len(),
        chunked_atoms,
        small_atoms: atom_list.len() - chunked_atoms,
        chunks: chunks.len(),
        pattern_edges: pattern_edges.len(),
        pattern_max_degree,
        prepartition_classes: z.len(),
        heavy_towards_avoiding: heavy_mask.iter().filter(|&&h| h).count(),
        regularity_garbage: garbage,
        cluster_pairs_checked: candidates.len(),
        regularize: regularize_diag,
    };
    let decomposition = BoundedDecomposition { clusters, spots: fam, g_reg, g_exp, avoiding };
    let accounting = decomposition.accounting(g, params);
    Ok(BoundedRun { decomposition, trace, accounting })
}
