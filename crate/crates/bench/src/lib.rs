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


//! Fixtures shared by the benchmarks.

use num::{BigInt, BigRational};
use sparsedecomp::decomposition::DecompParams;
use sparsedecomp::generators::{disjoint_union, random_graph, EdgeModel};
use sparsedecomp::rational::{q, qi, qu};
use sparsedecomp::Graph;

/// γ=ε=1/4, ρ=1/10, ν=1/50, Λ=2, b=k, `Ω* = max(⌊Δ/k⌋+1, 3)`.
pub fn desk_params(g: &Graph, k: usize) -> DecompParams {
    let omega = qu(g.max_degree() / k + 1).max(qi(3));
    DecompParams {
        k,
        gamma: q(1, 4),
        eps: q(1, 4),
        nu: q(1, 50),
        rho: q(1, 10),
        lambda: qi(2),
        omega_star: omega.clone(),
        omega_star2: omega + qi(1),
        b: qu(k),
        s: 1,
        nu_tilde: None,
    }
}

/// A sparse `G(n, 2n)` next to a dense 40-vertex block.
pub fn sparse_with_block(n: usize, seed: u64) -> Graph {
    let sparse = random_graph(n, &EdgeModel::Count(2 * n), seed).expect("valid G(n, m)");
    let block = random_graph(40, &EdgeModel::Probability(q(1, 2)), seed + 1).expect("valid G(n, p)");
    disjoint_union(&[sparse, block])
}

pub fn gnp(n: usize, num: i64, den: i64, seed: u64) -> Graph {
    random_graph(n, &EdgeModel::Probability(q(num, den)), seed).expect("valid G(n, p)")
}

pub fn ratio(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}
