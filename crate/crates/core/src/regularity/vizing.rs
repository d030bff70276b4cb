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

//! Pattern graphs over ensemble indices and their proper edge colouring.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{norm, Edge, Graph};

/// A bounded-degree graph on ensemble indices `0..l`: `ij` is an edge when
/// the pair `(W_i, W_j)` is to be regularized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern", into = "RawPattern")]
pub struct PatternGraph {
    graph: Graph,
    max_degree_bound: usize,
}

#[derive(Serialize, Deserialize)]
struct RawPattern {
    l: usize,
    edges: Vec<Edge>,
    m: usize,
}

impl TryFrom<RawPattern> for PatternGraph {
    type Error = crate::error::Error;
    fn try_from(r: RawPattern) -> Result<Self> {
        PatternGraph::new(r.l, r.edges, r.m)
    }
}

impl From<PatternGraph> for RawPattern {
    fn from(p: PatternGraph) -> Self {
        RawPattern { l: p.l(), edges: p.edges(), m: p.max_degree_bound }
    }
}

impl PatternGraph {
    pub fn new(l: usize, edges: impl IntoIterator<Item = Edge>, m: usize) -> Result<Self> {
        let graph = Graph::from_edges(l, edges)?;
        if graph.max_degree() > m {
            return input(format!("pattern graph has degree {} above its bound {m}", graph.max_degree()));
        }
        Ok(PatternGraph { graph, max_degree_bound: m })
    }

    /// Uses the actual maximum degree as the bound.
    pub fn from_graph(graph: Graph) -> Self {
        let m = graph.max_degree();
        PatternGraph { graph, max_degree_bound: m }
    }

    /// Every pair among `l` indices.
    pub fn complete(l: usize) -> Self {
        Self::from_graph(Graph::complete(l))
    }

    pub fn l(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.max_degree_bound
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.graph.edges()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

/// Partitions the pattern edges into at most `maxdeg + 1` nonempty matchings
/// (Misra–Gries edge colouring). Matchings are listed by colour, each sorted.
pub fn vizing_matchings(f: &PatternGraph) -> Vec<Vec<Edge>> {
    let g = f.graph();
    let n = g.n();
    let colors = g.max_degree() + 1;
    // at[v][c] = neighbour joined to v by an edge of colour c.
    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; colors]; n];
    let mut color_of = std::collections::HashMap::<Edge, usize>::new();

    let free = |at: &Vec<Vec<Option<usize>>>, v: usize, c: usize| at[v][c].is_none();
    let first_free = |at: &Vec<Vec<Option<usize>>>, v: usize| (0..colors).find(|&c| at[v][c].is_none()).unwrap();

    fn set(at: &mut [Vec<Option<usize>>], cmap: &mut std::collections::HashMap<Edge, usize>, u: usize, v: usize, c: usize) {
        at[u][c] = Some(v);
        at[v][c] = Some(u);
        cmap.insert(norm(u, v), c);
    }
    fn unset(at: &mut [Vec<Option<usize>>], cmap: &mut std::collections::HashMap<Edge, usize>, u: usize, v: usize) {
        if let Some(c) = cmap.remove(&norm(u, v)) {
            at[u][c] = None;
            at[v][c] = None;
        }
    }

    for (u, v0) in g.edges() {
        // Maximal fan of u starting at v0.
        let mut fan = vec![v0];
        let mut in_fan = vec![false; n];
        in_fan[v0] = true;
        loop {
            let last = *fan.last().unwrap();
            let next = g.neighbors(u).iter().copied().find(|&x| {
                !in_fan[x] && color_of.get(&norm(u, x)).is_some_and(|&c| free(&at, last, c))
            });
            match next {
                Some(x) => {
                    in_fan[x] = true;
                    fan.push(x);
                }
                None => break,
            }
        }
        let c = first_free(&at, u);
        let d = first_free(&at, *fan.last().unwrap());
        // Invert the cd-path starting at u (its first edge has colour d).
        if c != d && !free(&at, u, d) {
            let mut path = vec![u];
            let mut cur = u;
            let mut want = d;
            while let Some(nx) = at[cur][want] {
                path.push(nx);
                cur = nx;
                want = if want == d { c } else { d };
            }
            let mut edges_on_path = Vec::with_capacity(path.len());
            for w in path.windows(2) {
                edges_on_path.push((w[0], w[1], color_of[&norm(w[0], w[1])]));
            }
            for &(a, b, _) in &edges_on_path {
                unset(&mut at, &mut color_of, a, b);
            }
            for &(a, b, col) in &edges_on_path {
                set(&mut at, &mut color_of, a, b, if col == c { d } else { c });
            }
        }
        // First fan vertex where d is free such that the prefix is still a fan.
        let mut w_idx = fan.len() - 1;
        for (i, &x) in fan.iter().enumerate() {
            let prefix_ok = (1..=i).all(|j| {
                color_of.get(&norm(u, fan[j])).is_some_and(|&col| free(&at, fan[j - 1], col))
            });
            if !prefix_ok {
                break;
            }
            if free(&at, x, d) {
                w_idx = i;
                break;
            }
        }
        // Rotate the prefix and colour (u, fan[w_idx]) with d.
        for i in 0..w_idx {
            let col = color_of[&norm(u, fan[i + 1])];
            unset(&mut at, &mut color_of, u, fan[i + 1]);
            set(&mut at, &mut color_of, u, fan[i], col);
        }
        set(&mut at, &mut color_of, u, fan[w_idx], d);
    }

    let mut classes: Vec<Vec<Edge>> = vec![Vec::new(); colors];
    for (e, c) in color_of {
        classes[c].push(e);
    }
    let mut out: Vec<Vec<Edge>> = classes.into_iter().filter(|m| !m.is_empty()).collect();
    for m in &mut out {
        m.sort_unstable();
    }
    out
}
