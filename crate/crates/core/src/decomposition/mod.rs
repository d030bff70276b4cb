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


//! Bounded and sparse decompositions: the pipeline that builds them, the
//! clause-by-clause verifier, and the derived objects (captured edges, the
//! cluster graph).

mod pipeline;
mod sparse;
mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{Graph, VertexSet};
use crate::rational::{ceil_u64, format_rational, is_positive, one, pow, q, qu, Q};
use crate::regularity::{RegularizeOptions, DEFAULT_REGULARITY_CAP};
use crate::report::ClauseReport;
use crate::spots::{FinderConfig, SpotFamily};

pub use pipeline::{decompose_bounded, BoundedRun, PipelineTrace};
pub use sparse::{
    captured_edges, check_dense_degeneration, cluster_graph, decompose_generic, decompose_sparse_lks, huge_set,
    ClusterGraph, SparseRun,
};
pub use verify::{
    avoiding_exceptions, challenge_suite, certify_nowhere_dense, exceptional_vertices, verify_bounded, verify_sparse, Certification,
    VerifyOptions,
};

/// Exponents of `3` beyond this are clamped when computing the default
/// chunk scale; the resulting value is already far below `1/(2k)` for any
/// `k` that fits in memory.
pub const NU_TILDE_EXPONENT_CAP: u64 = 4096;

/// Parameters `(k, Λ, γ, ε, ν, ρ, Ω*, Ω**, b, s)`. Rationals travel as strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompParams {
    pub k: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub gamma: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub eps: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub nu: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub rho: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub lambda: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub omega_star: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub omega_star2: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub b: Q,
    pub s: usize,
    /// Chunk scale override; `None` uses `ε·3^{-⌈Ω*Λ/γ³⌉}`.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::rational::serde_opt_q")]
    pub nu_tilde: Option<Q>,
}

impl DecompParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return input("k must be at least 1");
        }
        if self.s == 0 {
            return input("s must be at least 1");
        }
        for (name, x) in [("gamma", &self.gamma), ("eps", &self.eps), ("nu", &self.nu), ("rho", &self.rho)] {
            if !is_positive(x) || *x >= one() {
                return input(format!("{name} = {} must lie in (0, 1)", format_rational(x)));
            }
        }
        let two = q(2, 1);
        if self.lambda < two {
            return input(format!("lambda = {} must be at least 2", format_rational(&self.lambda)));
        }
        for (name, x) in [("omega_star", &self.omega_star), ("omega_star2", &self.omega_star2)] {
            if *x <= two {
                return input(format!("{name} = {} must exceed 2", format_rational(x)));
            }
        }
        if self.b < Q::from_integer(0.into()) {
            return input("b must be nonnegative");
        }
        if let Some(t) = &self.nu_tilde {
            if !is_positive(t) || *t > &self.eps / q(2, 1) {
                return input("nu_tilde must lie in (0, eps/2]");
            }
        }
        Ok(())
    }

    pub fn kq(&self) -> Q {
        qu(self.k)
    }

    /// `ν̃`: the override when present, else `ε·3^{-⌈Ω*Λ/γ³⌉}`.
    pub fn nu_tilde(&self) -> Q {
        if let Some(t) = &self.nu_tilde {
            return t.clone();
        }
        let e = ceil_u64(&(&self.omega_star * &self.lambda / pow(&self.gamma, 3))).min(NU_TILDE_EXPONENT_CAP);
        &self.eps / pow(&q(3, 1), e as u32)
    }

    /// `(4ε/γ + εΩ* + γ)kn`, the bound on spot edges left unexplained.
    pub fn spot_loss_bound(&self, n: usize) -> Q {
        (q(4, 1) * &self.eps / &self.gamma + &self.eps * &self.omega_star + &self.gamma) * self.kq() * qu(n)
    }

    /// `(4ε/γ + εΩ* + γ + ρ)kn`.
    pub fn uncaptured_bound(&self, n: usize) -> Q {
        self.spot_loss_bound(n) + &self.rho * self.kq() * qu(n)
    }
}

/// `(𝐕, 𝒟, G_reg, G_exp, 𝔼)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedDecomposition {
    pub clusters: Vec<VertexSet>,
    pub spots: SpotFamily,
    pub g_reg: Graph,
    pub g_exp: Graph,
    pub avoiding: VertexSet,
}

impl BoundedDecomposition {
    pub fn empty(n: usize) -> Self {
        BoundedDecomposition {
            clusters: Vec::new(),
            spots: SpotFamily::default(),
            g_reg: Graph::empty(n),
            g_exp: Graph::empty(n),
            avoiding: VertexSet::empty(),
        }
    }

    pub fn cluster_union(&self) -> VertexSet {
        VertexSet::new(self.clusters.iter().flat_map(|c| c.iter()))
    }

    pub fn cluster_size(&self) -> Option<usize> {
        self.clusters.first().map(VertexSet::len)
    }

    /// Captured edges: `E(G_reg) ∪ E(G_exp) ∪ E_{G_𝒟}(𝔼, 𝔼 ∪ ⋃𝐕)`.
    pub fn captured(&self, n: usize) -> Graph {
        let gd = self.spots.captured_graph(n);
        let e_mask = self.avoiding.mask(n);
        let mut reach = self.cluster_union().mask(n);
        for v in self.avoiding.iter() {
            reach[v] = true;
        }
        let at_avoiding = gd.edges().into_iter().filter(|&(a, b)| (e_mask[a] && reach[b]) || (e_mask[b] && reach[a]));
        let mut edges: Vec<_> = self.g_reg.edges();
        edges.extend(self.g_exp.edges());
        edges.extend(at_avoiding);
        Graph::from_edges_lossy(n, edges)
    }

    /// `|E(𝒟) ∖ (E(G_reg) ∪ E_{G_𝒟}[𝔼, 𝔼 ∪ ⋃𝐕])|`.
    pub fn spot_loss(&self, n: usize) -> usize {
        let captured = self.captured(n);
        self.spots.captured_graph(n).edges().into_iter().filter(|&(a, b)| !captured.has_edge(a, b)).count()
    }

    /// Uncaptured-edge count of `g` against the two bounds, compared exactly.
    pub fn accounting(&self, g: &Graph, params: &DecompParams) -> ClauseReport {
        let n = g.n();
        let captured = self.captured(n);
        let kept = g.edges().into_iter().filter(|&(a, b)| captured.has_edge(a, b)).count();
        let uncaptured = g.edge_count() - kept;
        let loss = self.spot_loss(n);
        let ub = params.uncaptured_bound(n);
        let sb = params.spot_loss_bound(n);
        let mut r = ClauseReport::new();
        r.clause("uncaptured_within_bound", qu(uncaptured) <= ub)
            .clause("spot_loss_within_bound", qu(loss) <= sb)
            .count("edges", g.edge_count())
            .count("uncaptured", uncaptured)
            .count("uncaptured_bound", format_rational(&ub))
            .count("spot_loss", loss)
            .count("spot_loss_bound", format_rational(&sb))
            .count("g_reg_edges", self.g_reg.edge_count())
            .count("g_exp_edges", self.g_exp.edge_count())
            .count("spot_edges", self.spots.spots.iter().map(|s| s.f.len()).sum::<usize>())
            .count("clusters", self.clusters.len())
            .count("avoiding", self.avoiding.len());
        r
    }
}

/// `(ℍ, 𝐕, 𝒟, G_reg, G_exp, 𝔼)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseDecomposition {
    pub huge: VertexSet,
    #[serde(flatten)]
    pub bounded: BoundedDecomposition,
}

/// Knobs that do not change what a valid output is, only how hard the
/// pipeline searches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineOptions {
    pub finder: FinderConfig,
    /// Exact pair-regularity oracle up to this many vertices per side.
    pub regularity_cap: usize,
    pub regularize: RegularizeOptions,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            finder: FinderConfig::default(),
            regularity_cap: DEFAULT_REGULARITY_CAP,
            regularize: RegularizeOptions::default(),
        }
    }
}

#[cfg(test)]
mod tests;
