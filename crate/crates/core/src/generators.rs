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

//! Example graphs: the extremal constructions, locally dense ensembles,
//! random and regular graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Edge, Graph, VertexSet};
use crate::rational::{bernoulli, one, serde_opt_q, serde_q, zero, Q};
use crate::regularity::PatternGraph;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every pair with at least one endpoint in `0..s`.
fn dominated_by_prefix(n: usize, s: usize) -> Graph {
    let edges = (0..s.min(n)).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_edges_lossy(n, edges)
}

/// `K_n` with the clique on the last `n/2 + 1` vertices removed. The first
/// `n/2 - 1` vertices have degree `n - 1`.
pub fn lks_extremal(n: usize) -> Result<Graph> {
    if n < 4 || n % 2 == 1 {
        return input(format!("lks_extremal needs an even n >= 4, got {n}"));
    }
    Ok(dominated_by_prefix(n, n / 2 - 1))
}

/// A set of `⌊(k-2)/2⌋` vertices joined to everything, nothing else.
pub fn es_extremal(n: usize, k: usize) -> Result<Graph> {
    let s = k.saturating_sub(2) / 2;
    if s >= n {
        return input(format!("es_extremal needs floor((k-2)/2) < n, got k={k}, n={n}"));
    }
    Ok(dominated_by_prefix(n, s))
}

/// Output of [`locally_dense`]: the host graph, the pattern and the sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocallyDenseInstance {
    pub graph: Graph,
    pub pattern: PatternGraph,
    pub ensemble: Vec<VertexSet>,
}

/// `ell` consecutive blocks of `set_size` vertices, a random pattern of
/// maximum degree at most `pattern_maxdeg`, and an independent random
/// bipartite graph of edge probability `density` on each pattern edge.
pub fn locally_dense(
    ell: usize,
    set_size: usize,
    pattern_maxdeg: usize,
    density: &Q,
    seed: u64,
) -> Result<LocallyDenseInstance> {
    if ell == 0 || set_size == 0 {
        return input("locally_dense needs positive ell and set_size");
    }
    if *density < zero() || *density > one() {
        return input("density must lie in [0, 1]");
    }
    let mut rng = rng_from_seed(seed);
    let mut pairs: Vec<Edge> = (0..ell).flat_map(|i| (i + 1..ell).map(move |j| (i, j))).collect();
    pairs.shuffle(&mut rng);
    let mut deg = vec![0usize; ell];
    let mut pattern_edges = Vec::new();
    for (i, j) in pairs {
        if deg[i] < pattern_maxdeg && deg[j] < pattern_maxdeg {
            deg[i] += 1;
            deg[j] += 1;
            pattern_edges.push((i, j));
        }
    }
    pattern_edges.sort_unstable();
    let ensemble: Vec<VertexSet> =
        (0..ell).map(|i| VertexSet::from_sorted((i * set_size..(i + 1) * set_size).collect())).collect();
    let mut edges = Vec::new();
    for &(i, j) in &pattern_edges {
        for u in ensemble[i].iter() {
            for w in ensemble[j].iter() {
                if bernoulli(&mut rng, density) {
                    edges.push((u, w));
                }
            }
        }
    }
    Ok(LocallyDenseInstance {
        graph: Graph::from_edges_lossy(ell * set_size, edges),
        pattern: PatternGraph::new(ell, pattern_edges, pattern_maxdeg)?,
        ensemble,
    })
}

/// Binomial `G(n, p)` or uniform `G(n, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeModel {
    Probability(Q),
    Count(usize),
}

pub fn random_graph(n: usize, model: &EdgeModel, seed: u64) -> Result<Graph> {
    let mut rng = rng_from_seed(seed);
    match model {
        EdgeModel::Probability(p) => {
            if *p < zero() || *p > one() {
                return input("edge probability must lie in [0, 1]");
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if bernoulli(&mut rng, p) {
                        edges.push((u, v));
                    }
                }
            }
            Ok(Graph::from_edges_lossy(n, edges))
        }
        EdgeModel::Count(m) => {
            let total = n * n.saturating_sub(1) / 2;
            if *m > total {
                return input(format!("cannot place {m} edges on {n} vertices"));
            }
            let mut all: Vec<Edge> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            let (chosen, _) = all.partial_shuffle(&mut rng, *m);
            Ok(Graph::from_edges_lossy(n, chosen.iter().copied()))
        }
    }
}

/// Attempts of the configuration model before giving up.
const REGULAR_ATTEMPTS: usize = 10_000;

/// Uniform-ish `d`-regular graph: configuration model, rejecting loops and
/// repeated edges.
pub fn regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if (d > 0 && d >= n) || (n * d) % 2 == 1 {
        return input(format!("no {d}-regular graph on {n} vertices"));
    }
    let mut rng = rng_from_seed(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..REGULAR_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut edges: Vec<Edge> = Vec::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks(2) {
            if pair[0] == pair[1] {
                continue 'attempt;
            }
            edges.push(crate::graph::norm(pair[0], pair[1]));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        return Graph::from_edges(n, edges);
    }
    Err(Error::Budget(format!("configuration model failed {REGULAR_ATTEMPTS} times for n={n}, d={d}")))
}

/// Vertex ids of later parts are shifted past the earlier ones.
pub fn disjoint_union(gs: &[Graph]) -> Graph {
    let n = gs.iter().map(Graph::n).sum();
    let mut edges = Vec::new();
    let mut offset = 0;
    for g in gs {
        edges.extend(g.edges().into_iter().map(|(u, v)| (u + offset, v + offset)));
        offset += g.n();
    }
    Graph::from_edges_lossy(n, edges)
}

/// JSON description of a generated graph, e.g.
/// `{"kind": "random", "n": 50, "p": "1/10", "seed": 7}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    LksExtremal {
        n: usize,
    },
    EsExtremal {
        n: usize,
        k: usize,
    },
    LocallyDense {
        ell: usize,
        set_size: usize,
        pattern_maxdeg: usize,
        #[serde(with = "serde_q")]
        density: Q,
    },
    Random {
        n: usize,
        #[serde(default, with = "serde_opt_q", skip_serializing_if = "Option::is_none")]
        p: Option<Q>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
    },
    Regular {
        n: usize,
        d: usize,
    },
    Complete {
        n: usize,
    },
    /// Parts are generated with their own seeds and placed side by side.
    Union {
        parts: Vec<GeneratorSpec>,
    },
}

/// A generated graph plus, for locally dense instances, its pattern and sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generated {
    pub graph: Graph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Vec<VertexSet>>,
}

impl From<Graph> for Generated {
    fn from(graph: Graph) -> Self {
        Generated { graph, pattern: None, ensemble: None }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    let seed = spec.seed;
    Ok(match &spec.kind {
        GeneratorKind::LksExtremal { n } => lks_extremal(*n)?.into(),
        GeneratorKind::EsExtremal { n, k } => es_extremal(*n, *k)?.into(),
        GeneratorKind::LocallyDense { ell, set_size, pattern_maxdeg, density } => {
            let inst = locally_dense(*ell, *set_size, *pattern_maxdeg, density, seed)?;
            Generated { graph: inst.graph, pattern: Some(inst.pattern), ensemble: Some(inst.ensemble) }
        }
        GeneratorKind::Random { n, p, m } => {
            let model = match (p, m) {
                (Some(p), None) => EdgeModel::Probability(p.clone()),
                (None, Some(m)) => EdgeModel::Count(*m),
                _ => return input("random generator needs exactly one of p and m"),
            };
            random_graph(*n, &model, seed)?.into()
        }
        GeneratorKind::Regular { n, d } => regular_graph(*n, *d, seed)?.into(),
        GeneratorKind::Complete { n } => Graph::complete(*n).into(),
        GeneratorKind::Union { parts } => {
            let gs = parts.iter().map(|p| generate(p).map(|g| g.graph)).collect::<Result<Vec<_>>>()?;
            disjoint_union(&gs).into()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn binom(n: usize, r: usize) -> usize {
        if r > n {
            return 0;
        }
        (0..r).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn lks_extremal_shape() {
        let g = lks_extremal(8).unwrap();
        assert_eq!(g.edge_count(), binom(8, 2) - binom(5, 2));
        for n in (4..=20).step_by(2) {
            let g = lks_extremal(n).unwrap();
            let full = (0..n).filter(|&v| g.degree(v) == n - 1).count();
            assert_eq!(full, n / 2 - 1);
            let rest: Vec<usize> = (0..n).filter(|&v| g.degree(v) != n - 1).collect();
            assert_eq!(rest.len(), n / 2 + 1);
            assert!(rest.iter().all(|&v| g.degree(v) == n / 2 - 1));
            assert!(rest.iter().all(|&u| rest.iter().all(|&v| !g.has_edge(u, v))));
        }
        assert!(lks_extremal(9).is_err());
        assert!(lks_extremal(2).is_err());
    }

    #[test]
    fn es_extremal_shape() {
        let g = es_extremal(10, 6).unwrap();
        assert_eq!(g.edge_count(), 17);
        for (n, k) in [(12, 8), (9, 7), (20, 10), (5, 3)] {
            let s = (k - 2) / 2;
            let g = es_extremal(n, k).unwrap();
            assert_eq!(g.edge_count(), s * (n - s) + binom(s, 2));
            assert!((0..s).all(|v| g.degree(v) == n - 1));
        }
        assert_eq!(es_extremal(5, 2).unwrap().edge_count(), 0);
        assert!(es_extremal(3, 10).is_err());
    }

    #[test]
    fn locally_dense_trivial_cases() {
        let inst = locally_dense(2, 4, 1, &q(1, 1), 3).unwrap();
        assert_eq!(inst.pattern.edges(), vec![(0, 1)]);
        assert_eq!(inst.graph.edge_count(), 16);
        let inst = locally_dense(5, 4, 0, &q(1, 2), 3).unwrap();
        assert_eq!(inst.graph.edge_count(), 0);
    }

    #[test]
    fn locally_dense_edge_counts_near_expectation() {
        let inst = locally_dense(6, 30, 2, &q(1, 2), 11).unwrap();
        assert!(inst.pattern.graph().max_degree() <= 2);
        let masks: Vec<Vec<bool>> = inst.ensemble.iter().map(|w| w.mask(inst.graph.n())).collect();
        for (i, j) in inst.pattern.edges() {
            let e: usize = inst.ensemble[i].iter().map(|u| inst.graph.degree_into(u, &masks[j])).sum();
            // Binomial(900, 1/2): mean 450, sigma 15.
            assert!((405..=495).contains(&e), "pair ({i},{j}) has {e} edges");
        }
    }

    #[test]
    fn random_extremes() {
        assert_eq!(random_graph(10, &EdgeModel::Probability(q(0, 1)), 1).unwrap().edge_count(), 0);
        assert_eq!(random_graph(10, &EdgeModel::Probability(q(1, 1)), 1).unwrap(), Graph::complete(10));
        assert_eq!(random_graph(10, &EdgeModel::Count(7), 1).unwrap().edge_count(), 7);
        assert!(random_graph(4, &EdgeModel::Count(7), 1).is_err());
    }

    #[test]
    fn regular_graphs() {
        let g = regular_graph(6, 2, 5).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 2));
        assert_eq!(g.edge_count(), 6);
        assert!(regular_graph(5, 3, 1).is_err());
        assert!(regular_graph(4, 4, 1).is_err());
        assert_eq!(regular_graph(4, 0, 1).unwrap().edge_count(), 0);
    }

    #[test]
    fn deterministic_by_seed() {
        let a = random_graph(40, &EdgeModel::Probability(q(1, 5)), 9).unwrap();
        let b = random_graph(40, &EdgeModel::Probability(q(1, 5)), 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(regular_graph(30, 4, 2).unwrap(), regular_graph(30, 4, 2).unwrap());
    }

    #[test]
    fn spec_round_trip() {
        for text in [
            r#"{"kind":"lks_extremal","n":10,"seed":0}"#,
            r#"{"kind":"random","n":20,"p":"1/4","seed":3}"#,
            r#"{"kind":"union","parts":[{"kind":"lks_extremal","n":6,"seed":0},{"kind":"complete","n":3,"seed":0}],"seed":0}"#,
        ] {
            let spec: GeneratorSpec = serde_json::from_str(text).unwrap();
            assert_eq!(serde_json::to_string(&spec).unwrap(), text);
            let g = generate(&spec).unwrap();
            let back: Generated = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
            assert_eq!(back, g);
        }
        let g = generate(&serde_json::from_str(
            r#"{"kind":"union","parts":[{"kind":"lks_extremal","n":6},{"kind":"complete","n":3}]}"#,
        )
        .unwrap())
        .unwrap();
        assert_eq!(g.graph.n(), 9);
        assert_eq!(g.graph.edge_count(), 9 + 3);
    }
}
