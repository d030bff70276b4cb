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


use super::*;
use crate::gap::{lks_index_bound, OmegaSequence};
use crate::generators::{disjoint_union, random_graph, regular_graph, EdgeModel};
use crate::graph::{Edge, Partition};
use crate::lks::LksParams;
use crate::rational::{q, qi};

fn params(k: usize, gamma: Q, eps: Q, nu: Q, rho: Q, omega: Q) -> DecompParams {
    DecompParams {
        k,
        gamma,
        eps,
        nu,
        rho,
        lambda: qi(3),
        omega_star: omega.clone(),
        omega_star2: omega * qi(2),
        b: qu(k),
        s: 2,
        nu_tilde: None,
    }
}

fn kbip(a: usize) -> Graph {
    Graph::from_edges_lossy(2 * a, (0..a).flat_map(|i| (a..2 * a).map(move |j| (i, j))))
}

fn run_and_verify(g: &Graph, p: &DecompParams) -> (BoundedRun, ClauseReport) {
    let prep = Partition::trivial(g.all_vertices());
    let run = decompose_bounded(g, &prep, p, &PipelineOptions::default()).unwrap();
    let ch = challenge_suite(g, &run.decomposition, p, 7);
    let rep = verify_bounded(g, &run.decomposition, &prep, p, &ch, &VerifyOptions::default());
    (run, rep)
}

#[test]
fn edgeless_graph_gives_empty_decomposition() {
    let g = Graph::empty(10);
    let p = params(4, q(1, 4), q(1, 4), q(1, 50), q(1, 10), qi(3));
    let (run, rep) = run_and_verify(&g, &p);
    assert_eq!(run.decomposition, BoundedDecomposition::empty(10));
    assert!(rep.passed(), "{:?}", rep.failed());
    assert_eq!(run.accounting.counts["uncaptured"], 0);
}

#[test]
fn cubic_graph_lands_in_expander() {
    let g = regular_graph(60, 3, 5).unwrap();
    let p = params(4, q(1, 2), q(1, 2), q(1, 50), q(1, 2), qi(3));
    let (run, rep) = run_and_verify(&g, &p);
    assert!(rep.passed(), "{:?}", rep.failed());
    assert!(run.decomposition.spots.is_empty());
    assert_eq!(run.decomposition.g_exp, g);
    assert_eq!(run.accounting.counts["uncaptured"], 0);
}

#[test]
fn bipartite_blocks_become_spots_and_regular_pairs() {
    let g = disjoint_union(&[kbip(6), kbip(6), Graph::empty(5)]);
    let p = params(4, q(1, 4), q(1, 4), q(1, 50), q(1, 10), qi(3));
    let (run, rep) = run_and_verify(&g, &p);
    assert!(rep.passed(), "{:?}", rep.failed());
    let d = &run.decomposition;
    assert_eq!(d.spots.len(), 2);
    assert_eq!(d.g_reg.edge_count(), 72);
    assert_eq!(run.accounting.counts["uncaptured"], 0);
    let cg = cluster_graph(d, &p.gamma);
    assert_eq!(cg.graph.edge_count(), 72);
    let sd = SparseDecomposition { huge: VertexSet::empty(), bounded: d.clone() };
    assert!(cg.check_bounds(&sd, &p).passed());
}

fn chunky() -> (Graph, DecompParams, BoundedRun) {
    let g = disjoint_union(&[kbip(12), kbip(12)]);
    let mut p = params(8, q(1, 4), q(1, 2), q(1, 50), q(1, 10), qi(3));
    p.nu_tilde = Some(q(1, 4));
    let prep = Partition::trivial(g.all_vertices());
    let run = decompose_bounded(&g, &prep, &p, &PipelineOptions::default()).unwrap();
    (g, p, run)
}

#[test]
fn coarser_chunks_with_override() {
    let (g, p, run) = chunky();
    assert_eq!(run.trace.chunks, 12);
    let prep = Partition::trivial(g.all_vertices());
    let rep = verify_bounded(&g, &run.decomposition, &prep, &p, &[], &VerifyOptions::default());
    assert!(rep.passed(), "{:?}", rep.failed());
}

#[test]
fn injected_faults_are_named() {
    let (g, p, run) = chunky();
    let prep = Partition::trivial(g.all_vertices());
    let opts = VerifyOptions::default();
    let mut bad = run.decomposition.clone();
    let c0 = bad.clusters[0].clone();
    if c0.len() >= 2 {
        bad.clusters[0] = VertexSet::new(c0.iter().skip(1));
    } else {
        let c1 = bad.clusters.remove(1);
        bad.clusters[0] = c0.union(&c1);
    }
    let rep = verify_bounded(&g, &bad, &prep, &p, &[], &opts);
    assert_eq!(rep.get("c4.equal"), Some(false));

    let mut bad = run.decomposition.clone();
    bad.avoiding = VertexSet::new([bad.clusters[0].as_slice()[0]]);
    let rep = verify_bounded(&g, &bad, &prep, &p, &[], &opts);
    assert_eq!(rep.get("c8.outside_clusters"), Some(false));
}

#[test]
fn small_atoms_form_an_avoiding_set() {
    // Under a chunk scale of 10 the sides of the small block are small atoms.
    let g = disjoint_union(&[kbip(10), kbip(30)]);
    let mut p = params(20, q(1, 4), q(1, 2), q(1, 50), q(1, 10), qi(3));
    p.nu_tilde = Some(q(1, 4));
    let prep = Partition::trivial(g.all_vertices());
    let run = decompose_bounded(&g, &prep, &p, &PipelineOptions::default()).unwrap();
    let d = &run.decomposition;
    assert_eq!(d.avoiding, VertexSet::new(0..20));
    assert!(d.avoiding.is_subset(&VertexSet::new(d.spots.spots.iter().flat_map(|s| s.vertices().into_vec()))));
    assert!(d.avoiding.is_disjoint(&d.cluster_union()));
    // Shrinking an avoiding set never creates exceptions.
    let u = VertexSet::new(0..3);
    let full = avoiding_exceptions(&d.spots, &d.avoiding, &u, &p.gamma, p.k);
    let half = VertexSet::new(d.avoiding.iter().step_by(2));
    assert!(avoiding_exceptions(&d.spots, &half, &u, &p.gamma, p.k) <= full);
}

#[test]
fn random_graphs_round_trip() {
    for seed in 0..4u64 {
        let g = random_graph(80, &EdgeModel::Probability(q(1, 8)), seed).unwrap();
        let k = 8;
        let omega = Q::new((g.max_degree() as i64 + 8).into(), (k as i64).into()).max(qi(3));
        let p = params(k, q(1, 4), q(1, 4), q(1, 50), q(1, 10), omega);
        let (run, rep) = run_and_verify(&g, &p);
        assert!(rep.passed(), "seed {seed}: {:?}", rep.failed());
        assert!(run.accounting.passed(), "seed {seed}: {:?}", run.accounting);
    }
}

#[test]
fn preconditions_name_the_clause() {
    let g = Graph::complete(12);
    let p = params(2, q(1, 4), q(1, 4), q(1, 50), q(1, 10), qi(3));
    let prep = Partition::trivial(g.all_vertices());
    let err = decompose_bounded(&g, &prep, &p, &PipelineOptions::default()).unwrap_err();
    assert!(err.to_string().contains("e(G)"), "{err}");
    let star = Graph::from_edges_lossy(30, (1..30).map(|v| (0, v)));
    let err = decompose_bounded(&star, &Partition::trivial(VertexSet::new(0..30)), &p, &PipelineOptions::default())
        .unwrap_err();
    assert!(err.to_string().contains("maxdeg"), "{err}");
}

#[test]
fn captured_edges_follow_the_definition() {
    let (g, _, run) = chunky();
    let sd = SparseDecomposition { huge: VertexSet::empty(), bounded: run.decomposition.clone() };
    let cap = captured_edges(&g, &sd);
    assert!(cap.is_subgraph_of(&g));
    assert_eq!(cap, run.decomposition.g_reg.union(&run.decomposition.g_exp));
    // A spot edge between clusters that is not in G_reg is not captured.
    let mut d = run.decomposition.clone();
    let (a, b) = d.g_reg.edges()[0];
    d.g_reg = d.g_reg.without_edges(&[(a, b)]);
    let sd = SparseDecomposition { huge: VertexSet::empty(), bounded: d };
    assert!(!captured_edges(&g, &sd).has_edge(a, b));
}

#[test]
fn huge_vertices_are_split_off() {
    let mut edges: Vec<Edge> = (1..60).map(|v| (0, v)).collect();
    edges.extend((1..59).map(|v| (v, v + 1)));
    let g = Graph::from_edges_lossy(60, edges);
    // With two candidate indices the first window is empty, so the centre
    // sits above the gap.
    let eta = qi(2);
    let omegas = OmegaSequence::with_ratio(qi(3), &q(1, 2), 3).unwrap();
    let p = params(2, q(1, 4), q(1, 2), q(1, 50), q(1, 10), qi(3));
    let run = decompose_generic(&g, &eta, &omegas, &p, &PipelineOptions::default()).unwrap();
    assert!(run.decomposition.huge.contains(0));
    let ch = challenge_suite(&run.subgraph, &run.decomposition.bounded, &run.params, 1);
    let rep = verify_sparse(&run.subgraph, &run.decomposition, &run.prepartition, &run.params, &ch, &VerifyOptions::default());
    assert!(rep.passed(), "{:?}", rep.failed());
    assert!(run.accounting.passed(), "{:?}", run.accounting);
}

#[test]
fn lks_member_decomposes() {
    let n = 40;
    let g = Graph::from_edges_lossy(n, (0..22).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
    let lp = LksParams::new(20, q(1, 20)).unwrap();
    let omegas = OmegaSequence::with_ratio(qi(3), &(&lp.eta * &lp.eta / qi(100)), lks_index_bound(&lp.eta) + 2).unwrap();
    let p = params(20, q(1, 4), q(1, 4), q(1, 50), q(1, 10), qi(3));
    let run = decompose_sparse_lks(&g, &lp, &omegas, &p, &PipelineOptions::default()).unwrap();
    assert!(run.decomposition.huge.is_empty());
    let ch = challenge_suite(&run.subgraph, &run.decomposition.bounded, &run.params, 1);
    let rep = verify_sparse(&run.subgraph, &run.decomposition, &run.prepartition, &run.params, &ch, &VerifyOptions::default());
    assert!(rep.passed(), "{:?}", rep.failed());
    let d = &run.decomposition.bounded;
    assert!(d.g_reg.edge_count() > d.g_exp.edge_count());
    assert!(d.avoiding.is_empty());
}

#[test]
fn non_member_is_rejected() {
    let g = Graph::empty(10);
    let lp = LksParams::new(3, q(1, 4)).unwrap();
    let omegas = OmegaSequence::with_ratio(qi(3), &q(1, 1600), lks_index_bound(&lp.eta) + 2).unwrap();
    let p = params(3, q(1, 4), q(1, 4), q(1, 50), q(1, 10), qi(3));
    assert!(decompose_sparse_lks(&g, &lp, &omegas, &p, &PipelineOptions::default()).is_err());
}

#[test]
fn dense_graph_degenerates() {
    let g = random_graph(60, &EdgeModel::Probability(q(1, 2)), 3).unwrap();
    let k = 15;
    let mut p = params(k, q(1, 64), q(1, 4), q(1, 50), q(1, 2), qi(4));
    p.lambda = qi(4);
    let eta = q(1, 2);
    let omegas = OmegaSequence::with_ratio(qi(3), &q(1, 8), 10).unwrap();
    let run = decompose_generic(&g, &eta, &omegas, &p, &PipelineOptions::default()).unwrap();
    let rep = check_dense_degeneration(&g, &run.decomposition, &run.params, &q(1, 8), &q(1, 4));
    assert!(rep.passed(), "{rep:?}");
    assert_eq!(rep.counts["applicable"], true);
    let sparse = Graph::from_edges_lossy(60, (0..59).map(|v| (v, v + 1)));
    let rep = check_dense_degeneration(&sparse, &run.decomposition, &run.params, &q(1, 8), &q(1, 4));
    assert_eq!(rep.counts["applicable"], false);
}

#[test]
fn params_round_trip_as_strings() {
    let p = params(4, q(1, 4), q(1, 4), q(1, 50), q(1, 10), qi(3));
    let s = serde_json::to_string(&p).unwrap();
    assert!(s.contains("\"gamma\":\"1/4\""));
    assert_eq!(serde_json::from_str::<DecompParams>(&s).unwrap(), p);
    let bad = s.replace("\"1/4\"", "0.25");
    assert!(serde_json::from_str::<DecompParams>(&bad).is_err());
}
