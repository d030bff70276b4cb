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


//! Exhaustive containment oracles for small graphs.

use std::collections::BTreeMap;

use super::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tree::RootedTree;

/// Largest host the Hamilton path dynamic programme accepts.
pub const HAMILTON_CAP: usize = 24;

/// Backtracking search for a copy of `t` in `g` (not necessarily induced).
pub fn find_tree_copy(g: &Graph, t: &RootedTree) -> Option<Embedding> {
    let k = t.k();
    if g.n() < k {
        return None;
    }
    let order = t.bfs_order();
    let mut host = vec![usize::MAX; k];
    let mut used = vec![false; g.n()];
    for r in 0..g.n() {
        if g.degree(r) < t.degree(order[0]) {
            continue;
        }
        host[order[0]] = r;
        used[r] = true;
        if extend(g, t, &order, 1, &mut host, &mut used) {
            let map: BTreeMap<usize, usize> = host.iter().copied().enumerate().collect();
            return Some(Embedding::from_map(t, map));
        }
        used[r] = false;
    }
    None
}

fn extend(g: &Graph, t: &RootedTree, order: &[usize], i: usize, host: &mut [usize], used: &mut [bool]) -> bool {
    if i == order.len() {
        return true;
    }
    let v = order[i];
    let p = t.parent(v).expect("BFS order puts the root first");
    for &w in g.neighbors(host[p]) {
        if used[w] || g.degree(w) < t.degree(v) {
            continue;
        }
        host[v] = w;
        used[w] = true;
        if extend(g, t, order, i + 1, host, used) {
            return true;
        }
        used[w] = false;
    }
    false
}

/// Whether `g` has a path through all its vertices, by dynamic programming
/// over (visited set, endpoint).
pub fn has_hamilton_path(g: &Graph) -> Result<bool> {
    let n = g.n();
    if n == 0 {
        return Ok(false);
    }
    if n > HAMILTON_CAP {
        return Err(Error::OverCap(format!("Hamilton path search on {n} vertices exceeds {HAMILTON_CAP}")));
    }
    let adj: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    let full = (1u32 << n) - 1;
    // reach[mask] = endpoints of paths covering exactly `mask`.
    let mut reach = vec![0u32; 1 << n];
    for v in 0..n {
        reach[1 << v] = 1 << v;
    }
    for mask in 1..=full {
        let ends = reach[mask as usize];
        if ends == 0 {
            continue;
        }
        for v in 0..n {
            if ends & (1 << v) == 0 {
                continue;
            }
            let mut next = adj[v] & !mask;
            while next != 0 {
                let u = next.trailing_zeros();
                next &= next - 1;
                reach[(mask | 1 << u) as usize] |= 1 << u;
            }
        }
    }
    Ok(reach[full as usize] != 0)
}
