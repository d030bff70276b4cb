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

//! ε-regularity of a single pair: an exact oracle for small sides and a
//! sound witness search for larger ones.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rational::{ceil_u64, is_positive, qu, SmallFrac, Q};

/// Largest side the exact oracle accepts by default.
pub const DEFAULT_REGULARITY_CAP: usize = 16;

/// Subsets `U' ⊆ U`, `W' ⊆ W` whose density deviates from `d(U, W)` by at
/// least `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub u: VertexSet,
    pub w: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub regular: bool,
    /// `false` when a "regular" verdict is only advisory.
    pub exact: bool,
    pub witness: Option<Witness>,
}

/// Neighbourhood data of a pair, oriented so that `a` is the side whose
/// subsets get enumerated.
struct PairData {
    a: Vec<usize>,
    b: Vec<usize>,
    /// `nbr[j]` = indices into `a` adjacent to `b[j]`.
    nbr: Vec<Vec<usize>>,
    edges: u64,
    flipped: bool,
}

impl PairData {
    fn new(g: &Graph, u: &VertexSet, w: &VertexSet, flip: bool) -> Self {
        let (a, b) = if flip { (w, u) } else { (u, w) };
        let mut index = vec![usize::MAX; g.n()];
        for (i, v) in a.iter().enumerate() {
            index[v] = i;
        }
        let nbr: Vec<Vec<usize>> = b
            .iter()
            .map(|v| g.neighbors(v).iter().filter_map(|&x| (index[x] != usize::MAX).then_some(index[x])).collect())
            .collect();
        let edges = nbr.iter().map(|l| l.len() as u64).sum();
        PairData { a: a.as_slice().to_vec(), b: b.as_slice().to_vec(), nbr, edges, flipped: flip }
    }

    /// Given the degrees of `b` into some `A'` of size `a_size`, finds the
    /// subset `W'` (top or bottom degrees) deviating most, if any deviates.
    fn best_w(&self, degs: &mut [(u64, usize)], a_size: u64, eps: SmallFrac, min_b: usize) -> Option<Vec<usize>> {
        let nb = self.b.len();
        degs.sort_unstable_by(|x, y| y.cmp(x));
        let total_ab = (self.a.len() as u128) * (nb as u128);
        let mut prefix = vec![0u64; nb + 1];
        for i in 0..nb {
            prefix[i + 1] = prefix[i] + degs[i].0;
        }
        let sum = prefix[nb];
        let e = self.edges as u128;
        // |x/(a't) - e/(|A||B|)| >= ε  <=>  den·|x|A||B| - e a' t| >= num·a' t |A||B|
        let deviates = |x: u64, t: usize| {
            let at = (a_size as u128) * (t as u128);
            let lhs = (x as u128) * total_ab;
            let rhs = e * at;
            let diff = lhs.abs_diff(rhs);
            diff * eps.den >= eps.num * at * total_ab
        };
        for t in min_b.max(1)..=nb {
            if deviates(prefix[t], t) {
                return Some(degs[..t].iter().map(|&(_, j)| j).collect());
            }
            if deviates(sum - prefix[nb - t], t) {
                return Some(degs[nb - t..].iter().map(|&(_, j)| j).collect());
            }
        }
        None
    }

    fn witness(&self, a_sel: &[usize], b_sel: &[usize]) -> Witness {
        let wa = VertexSet::new(a_sel.iter().map(|&i| self.a[i]));
        let wb = VertexSet::new(b_sel.iter().map(|&j| self.b[j]));
        if self.flipped {
            Witness { u: wb, w: wa }
        } else {
            Witness { u: wa, w: wb }
        }
    }

    fn try_subset(&self, in_a: &[bool], eps: SmallFrac, min_b: usize) -> Option<Witness> {
        let a_sel: Vec<usize> = (0..self.a.len()).filter(|&i| in_a[i]).collect();
        let mut degs: Vec<(u64, usize)> =
            self.nbr.iter().enumerate().map(|(j, l)| (l.iter().filter(|&&i| in_a[i]).count() as u64, j)).collect();
        self.best_w(&mut degs, a_sel.len() as u64, eps, min_b).map(|b_sel| self.witness(&a_sel, &b_sel))
    }
}

fn check_inputs(g: &Graph, u: &VertexSet, w: &VertexSet, eps: &Q) -> Result<SmallFrac> {
    if u.is_empty() || w.is_empty() {
        return input("regularity needs nonempty sides");
    }
    if !u.is_disjoint(w) {
        return input("regularity needs disjoint sides");
    }
    if u.max().unwrap().max(w.max().unwrap()) >= g.n() {
        return input("pair vertex out of range");
    }
    if !is_positive(eps) {
        return input("epsilon must be positive");
    }
    SmallFrac::new(eps)
}

fn min_size(eps: &Q, n: usize) -> usize {
    (ceil_u64(&(eps * qu(n))) as usize).max(1)
}

/// Exact decision when `exact` (both sides at most [`DEFAULT_REGULARITY_CAP`]),
/// witness search otherwise.
pub fn is_regular_pair(g: &Graph, u: &VertexSet, w: &VertexSet, eps: &Q, exact: bool) -> Result<RegularityVerdict> {
    if exact {
        exact_regularity(g, u, w, eps, DEFAULT_REGULARITY_CAP)
    } else {
        heuristic_regularity(g, u, w, eps)
    }
}

/// Exact when both sides fit under `cap`, heuristic otherwise.
pub fn check_pair(g: &Graph, u: &VertexSet, w: &VertexSet, eps: &Q, cap: usize) -> Result<RegularityVerdict> {
    if u.len() <= cap && w.len() <= cap {
        exact_regularity(g, u, w, eps, cap)
    } else {
        heuristic_regularity(g, u, w, eps)
    }
}

/// Enumerates every large subset of the smaller side; for each, the extreme
/// subsets of the other side (top or bottom degrees) decide whether any
/// subset of that side deviates.
pub fn exact_regularity(g: &Graph, u: &VertexSet, w: &VertexSet, eps: &Q, cap: usize) -> Result<RegularityVerdict> {
    let e = check_inputs(g, u, w, eps)?;
    if u.len() > cap || w.len() > cap || u.len().min(w.len()) > 24 {
        return Err(Error::OverCap(format!(
            "exact regularity over sides {} x {} exceeds the cap of {cap}",
            u.len(),
            w.len()
        )));
    }
    let data = PairData::new(g, u, w, u.len() > w.len());
    let na = data.a.len();
    let min_a = min_size(eps, na);
    let min_b = min_size(eps, data.b.len());
    let masks: Vec<u32> = data.nbr.iter().map(|l| l.iter().fold(0u32, |m, &i| m | 1 << i)).collect();
    let mut degs = vec![(0u64, 0usize); data.b.len()];
    for sub in 1u32..(1u32 << na) {
        let size = sub.count_ones() as usize;
        if size < min_a {
            continue;
        }
        for (j, m) in masks.iter().enumerate() {
            degs[j] = ((m & sub).count_ones() as u64, j);
        }
        if let Some(b_sel) = data.best_w(&mut degs, size as u64, e, min_b) {
            let a_sel: Vec<usize> = (0..na).filter(|&i| sub >> i & 1 == 1).collect();
            return Ok(RegularityVerdict { regular: false, exact: true, witness: Some(data.witness(&a_sel, &b_sel)) });
        }
    }
    Ok(RegularityVerdict { regular: true, exact: true, witness: None })
}

/// Neighbourhoods sampled per side by the witness search.
const HEURISTIC_NEIGHBOURHOODS: usize = 64;

/// Tries degree-ordered and neighbourhood subsets of each side. Any witness
/// returned is genuine; a "regular" answer is advisory.
pub fn heuristic_regularity(g: &Graph, u: &VertexSet, w: &VertexSet, eps: &Q) -> Result<RegularityVerdict> {
    let e = check_inputs(g, u, w, eps)?;
    for flip in [false, true] {
        let data = PairData::new(g, u, w, flip);
        let na = data.a.len();
        let min_a = min_size(eps, na);
        let min_b = min_size(eps, data.b.len());
        let mut a_deg = vec![0usize; na];
        for l in &data.nbr {
            for &i in l {
                a_deg[i] += 1;
            }
        }
        let mut order: Vec<usize> = (0..na).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(a_deg[i]), i));
        let mut candidates: Vec<Vec<bool>> = Vec::new();
        let from = |idx: &[usize]| {
            let mut m = vec![false; na];
            for &i in idx {
                m[i] = true;
            }
            m
        };
        candidates.push(vec![true; na]);
        for size in [min_a, na.div_ceil(2).max(min_a)] {
            if size <= na {
                candidates.push(from(&order[..size]));
                candidates.push(from(&order[na - size..]));
            }
        }
        let mut bs: Vec<usize> = (0..data.b.len()).collect();
        bs.sort_by_key(|&j| (std::cmp::Reverse(data.nbr[j].len()), j));
        let step = (bs.len() / HEURISTIC_NEIGHBOURHOODS).max(1);
        for &j in bs.iter().step_by(step) {
            let nb = from(&data.nbr[j]);
            let cnt = data.nbr[j].len();
            if cnt >= min_a {
                candidates.push(nb.clone());
            }
            if na - cnt >= min_a {
                candidates.push(nb.iter().map(|x| !x).collect());
            }
        }
        for cand in candidates {
            if let Some(wit) = data.try_subset(&cand, e, min_b) {
                return Ok(RegularityVerdict { regular: false, exact: false, witness: Some(wit) });
            }
        }
    }
    Ok(RegularityVerdict { regular: true, exact: false, witness: None })
}

/// Independent check that `wit` really certifies ε-irregularity of `(u, w)`.
pub fn is_witness(g: &Graph, u: &VertexSet, w: &VertexSet, eps: &Q, wit: &Witness) -> bool {
    if !wit.u.is_subset(u) || !wit.w.is_subset(w) || wit.u.is_empty() || wit.w.is_empty() {
        return false;
    }
    if qu(wit.u.len()) < eps * qu(u.len()) || qu(wit.w.len()) < eps * qu(w.len()) {
        return false;
    }
    match (crate::graph::density(g, u, w), crate::graph::density(g, &wit.u, &wit.w)) {
        (Ok(d), Ok(d2)) => {
            let diff = if d > d2 { d - d2 } else { d2 - d };
            diff >= *eps
        }
        _ => false,
    }
}
