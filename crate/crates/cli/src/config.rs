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


//! Configuration and artifact schemas. Rationals are strings like `"1/4"`.

use serde::{Deserialize, Serialize};
use sparsedecomp::decomposition::{DecompParams, PipelineOptions, SparseDecomposition, VerifyOptions};
use sparsedecomp::embed::{ReserveParams, ShrubParams};
use sparsedecomp::gap::OmegaSequence;
use sparsedecomp::rational::{qi, serde_q};
use sparsedecomp::spots::{FinderConfig, SpotFamily};
use sparsedecomp::{Graph, Partition, RootedTree, VertexSet, Q};

#[derive(Clone, Debug, Deserialize)]
pub struct DecomposeConfig {
    #[serde(flatten)]
    pub mode: DecomposeMode,
    pub params: DecompParams,
    #[serde(default)]
    pub pipeline: PipelineOptions,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DecomposeMode {
    /// Prepartition defaults to one class holding every vertex.
    Bounded {
        #[serde(default)]
        prepartition: Option<Partition>,
    },
    Lks {
        #[serde(with = "serde_q")]
        eta: Q,
        omegas: OmegaSequence,
    },
    Generic {
        #[serde(with = "serde_q")]
        eta: Q,
        omegas: OmegaSequence,
    },
}

impl DecomposeMode {
    pub fn name(&self) -> &'static str {
        match self {
            DecomposeMode::Bounded { .. } => "bounded",
            DecomposeMode::Lks { .. } => "lks",
            DecomposeMode::Generic { .. } => "generic",
        }
    }
}

/// The decomposition artifact. `subgraph` is present when the decomposition
/// is of a gap-creating subgraph of the input rather than the input itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub mode: String,
    #[serde(flatten)]
    pub decomposition: SparseDecomposition,
    pub params: DecompParams,
    pub prepartition: Partition,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgraph: Option<Graph>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub options: VerifyOptions,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    /// `k = c·n` and `e(G) >= a·n²` for the dense-graph check.
    pub dense: Option<DenseCheck>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct DenseCheck {
    #[serde(with = "serde_q")]
    pub a: Q,
    #[serde(with = "serde_q")]
    pub c: Q,
}

/// A tree given explicitly or by shape.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum TreeSpec {
    Shape(TreeShape),
    Explicit(RootedTree),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum TreeShape {
    Path { k: usize },
    Star { k: usize },
    CompleteBinary { depth: u32 },
}

impl TreeSpec {
    pub fn build(&self) -> sparsedecomp::Result<RootedTree> {
        match self {
            TreeSpec::Explicit(t) => Ok(t.clone()),
            TreeSpec::Shape(TreeShape::Path { k }) => RootedTree::path(*k),
            TreeSpec::Shape(TreeShape::Star { k }) => RootedTree::star(*k),
            TreeSpec::Shape(TreeShape::CompleteBinary { depth }) => {
                if *depth > 20 {
                    return Err(sparsedecomp::Error::Input("complete binary trees are capped at depth 20".into()));
                }
                Ok(RootedTree::complete_binary(*depth))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum EmbedConfig {
    Greedy {
        tree: TreeSpec,
    },
    /// Backtracking search; small hosts only.
    Exhaustive {
        tree: TreeSpec,
    },
    PathExpander {
        k: usize,
        #[serde(with = "serde_q")]
        gamma: Q,
        #[serde(with = "serde_q")]
        rho: Q,
        #[serde(default)]
        finder: FinderConfig,
    },
    ShrubAvoiding {
        tree: TreeSpec,
        spots: SpotFamily,
        avoiding: VertexSet,
        anchor: usize,
        #[serde(default)]
        used: VertexSet,
        params: ShrubParams,
    },
    Reserve {
        tree: TreeSpec,
        /// Defaults to every vertex.
        #[serde(default)]
        seeds: Option<VertexSet>,
        params: ReserveParams,
        #[serde(default)]
        finder: FinderConfig,
    },
    /// Greedy embedding of every tree of order `1..=k_max`.
    Sweep {
        k_max: usize,
    },
}

/// Parameter relations the theory expects; reported, never enforced.
pub fn relation_warnings(p: &DecompParams) -> Vec<String> {
    let mut w = Vec::new();
    if p.nu > p.eps {
        w.push("expected ν <= ε".to_string());
    }
    if p.eps >= p.gamma {
        w.push("expected ε well below γ".to_string());
    }
    if p.rho <= p.gamma {
        w.push("expected ρ above γ".to_string());
    }
    if p.omega_star2 <= p.omega_star {
        w.push("expected Ω** above Ω*".to_string());
    }
    if p.b > qi(p.k as i64) * qi(2) {
        w.push("avoiding threshold b is above 2k".to_string());
    }
    w
}
