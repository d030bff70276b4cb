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

//! Dense spots: bipartite subgraphs of density above `γ` whose vertices all
//! have more than `m` spot neighbours. Exact and heuristic finders, greedy
//! extraction of edge-disjoint families, and the thick-graph conversion.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::generators::rng_from_seed;
use crate::graph::{components, core_vertices, norm, Edge, Graph, VertexSet};
use crate::rational::{qu, strictly_above, SmallFrac, Q};
use crate::report::ClauseReport;

/// Default vertex cap of the exact finder.
pub const DEFAULT_EXACT_CAP: usize = 14;

/// Unoriented bipartite subgraph `(U, W; F)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DenseSpot {
    pub u: VertexSet,
    pub w: VertexSet,
    pub f: Vec<Edge>,
}

impl DenseSpot {
    /// Checks the structural requirements (disjoint sides, every edge across,
    /// every vertex covered, edges normalized and distinct).
    pub fn new(u: VertexSet, w: VertexSet, f: Vec<Edge>) -> Result<Self> {
        let mut f: Vec<Edge> = f.into_iter().map(|(a, b)| norm(a, b)).collect();
        f.sort_unstable();
        let spot = DenseSpot { u, w, f };
        spot.validate()?;
        Ok(spot)
    }

    pub fn validate(&self) -> Result<()> {
        if self.f.is_empty() {
            return input("dense spot has no edges");
        }
        if !self.u.is_disjoint(&self.w) {
            return input("dense spot sides overlap");
        }
        if self.f.windows(2).any(|w| w[0] >= w[1]) || self.f.iter().any(|&(a, b)| a >= b) {
            return input("dense spot edges must be normalized, sorted and distinct");
        }
        let mut touched = BTreeMap::<usize, usize>::new();
        for &(a, b) in &self.f {
            let across = (self.u.contains(a) && self.w.contains(b)) || (self.u.contains(b) && self.w.contains(a));
            if !across {
                return input(format!("spot edge ({a},{b}) does not join the two sides"));
            }
            *touched.entry(a).or_default() += 1;
            *touched.entry(b).or_default() += 1;
        }
        if touched.len() != self.u.len() + self.w.len() {
            return input("every spot vertex needs an incident spot edge");
        }
        Ok(())
    }

    /// `(U, W; E_g(U, W))`. Panics-free: returns `None` if no edge crosses.
    pub fn from_pair(g: &Graph, u: VertexSet, w: VertexSet) -> Option<Self> {
        let wmask = w.mask(g.n());
        let mut f = Vec::new();
        for a in u.iter() {
            for &b in g.neighbors(a) {
                if wmask[b] {
                    f.push(norm(a, b));
                }
            }
        }
        f.sort_unstable();
        let spot = DenseSpot { u, w, f };
        spot.validate().ok().map(|_| spot)
    }

    pub fn vertices(&self) -> VertexSet {
        self.u.union(&self.w)
    }

    pub fn edge_count(&self) -> usize {
        self.f.len()
    }

    pub fn density(&self) -> Q {
        Q::new((self.f.len() as i64).into(), ((self.u.len() * self.w.len()) as i64).into())
    }

    /// Degrees inside `F`, keyed by vertex.
    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut d = BTreeMap::new();
        for &(a, b) in &self.f {
            *d.entry(a).or_default() += 1;
            *d.entry(b).or_default() += 1;
        }
        d
    }

    pub fn min_degree(&self) -> usize {
        self.degrees().values().copied().min().unwrap_or(0)
    }

    pub fn as_graph(&self, n: usize) -> Graph {
        Graph::from_edges_lossy(n, self.f.iter().copied())
    }
}

/// Edge-disjoint dense spots. JSON: `{"spots": [...]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotFamily {
    pub spots: Vec<DenseSpot>,
}

impl SpotFamily {
    /// `G_𝒟` on `n` vertices: the union of all spot edges.
    pub fn captured_graph(&self, n: usize) -> Graph {
        Graph::from_edges_lossy(n, self.spots.iter().flat_map(|s| s.f.iter().copied()))
    }

    pub fn edges_disjoint(&self) -> bool {
        let mut all: Vec<Edge> = self.spots.iter().flat_map(|s| s.f.iter().copied()).collect();
        let total = all.len();
        all.sort_unstable();
        all.dedup();
        all.len() == total
    }

    /// Number of spots containing each vertex.
    pub fn vertex_multiplicity(&self, n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for s in &self.spots {
            for v in s.vertices().iter() {
                c[v] += 1;
            }
        }
        c
    }

    pub fn len(&self) -> usize {
        self.spots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spots.is_empty()
    }
}

/// `true` iff `cand` is a valid spot of `g` with density `> γ` and every spot
/// degree `> m`.
pub fn is_dense_spot(g: &Graph, cand: &DenseSpot, m: &Q, gamma: &Q) -> Result<bool> {
    cand.validate()?;
    if let Some(&(a, b)) = cand.f.iter().find(|&&(a, b)| !g.has_edge(a, b)) {
        return input(format!("spot edge ({a},{b}) is not an edge of the graph"));
    }
    Ok(cand.density() > *gamma && qu(cand.min_degree()) > *m)
}

/// Finder settings. Exact mode enumerates all bipartitions of the candidate
/// vertices (those of the core where every degree exceeds `m`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FinderConfig {
    pub exact: bool,
    pub exact_cap: usize,
    pub seed: u64,
    pub random_restarts: usize,
}

impl Default for FinderConfig {
    fn default() -> Self {
        FinderConfig { exact: false, exact_cap: DEFAULT_EXACT_CAP, seed: 0, random_restarts: 2 }
    }
}

impl FinderConfig {
    pub fn exact() -> Self {
        FinderConfig { exact: true, ..Self::default() }
    }
}

/// Returns a spot of `g` if the configured finder locates one. Exact mode
/// decides existence and returns a spot with the most edges; heuristic mode
/// is sound but may miss spots.
pub fn find_dense_spot(g: &Graph, m: &Q, gamma: &Q, cfg: &FinderConfig) -> Result<Option<DenseSpot>> {
    let thr = strictly_above(m) as usize;
    let gam = SmallFrac::new(gamma)?;
    if cfg.exact {
        exact_search(g, thr.max(1), gam, cfg.exact_cap, false)
    } else {
        Ok(heuristic_search(g, thr.max(1), gam, cfg))
    }
}

/// `true` iff the configured finder finds no spot (a true decision in exact mode).
pub fn is_nowhere_dense(g: &Graph, m: &Q, gamma: &Q, cfg: &FinderConfig) -> Result<bool> {
    let thr = strictly_above(m) as usize;
    let gam = SmallFrac::new(gamma)?;
    let found = if cfg.exact {
        exact_search(g, thr.max(1), gam, cfg.exact_cap, true)?
    } else {
        heuristic_search(g, thr.max(1), gam, cfg)
    };
    Ok(found.is_none())
}

/// Repeatedly takes a spot from the residual graph (with all residual edges
/// between its sides) until the finder returns nothing.
pub fn extract_spot_family(g: &Graph, m: &Q, gamma: &Q, cfg: &FinderConfig) -> Result<SpotFamily> {
    let mut residual = g.clone();
    let mut fam = SpotFamily::default();
    while let Some(spot) = find_dense_spot(&residual, m, gamma, cfg)? {
        residual = residual.without_edges(&spot.f);
        fam.spots.push(spot);
    }
    Ok(fam)
}

/// Exhaustive search over ordered pairs of disjoint subsets of the candidate
/// set. `any` stops at the first spot; otherwise the spot with the most
/// edges wins (first found on ties).
fn exact_search(g: &Graph, thr: usize, gam: SmallFrac, cap: usize, any: bool) -> Result<Option<DenseSpot>> {
    let cand = core_vertices(g, thr);
    let s = cand.len();
    if s < 2 * thr {
        return Ok(None);
    }
    if s > cap || s > 30 {
        return Err(Error::OverCap(format!(
            "exact spot search over {s} candidate vertices exceeds the cap of {cap}"
        )));
    }
    let ids = cand.as_slice();
    let mut index = vec![usize::MAX; g.n()];
    for (i, &v) in ids.iter().enumerate() {
        index[v] = i;
    }
    let adj: Vec<u32> = ids
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&u| index[u] != usize::MAX).fold(0u32, |m, &u| m | 1 << index[u]))
        .collect();
    let full: u32 = if s == 32 { u32::MAX } else { (1u32 << s) - 1 };
    let thr32 = thr as u32;
    let mut best: Option<(u32, u32, u32)> = None;
    for um in 1..=full {
        if um.count_ones() < thr32 {
            continue;
        }
        let rest = full & !um;
        if rest.count_ones() < thr32 {
            continue;
        }
        let low_u = um.trailing_zeros();
        if bits(um).any(|i| (adj[i] & rest).count_ones() < thr32) {
            continue;
        }
        // Neighbourhood of U inside the rest bounds W.
        let reach = bits(um).fold(0u32, |m, i| m | adj[i]) & rest;
        let mut wm = reach;
        while wm != 0 {
            if wm.trailing_zeros() > low_u && wm.count_ones() >= thr32 {
                if let Some(e) = spot_edges(&adj, um, wm, thr32) {
                    let (a, b) = (um.count_ones() as u64, wm.count_ones() as u64);
                    if gam.lt_ratio(e as u64, a * b) && best.is_none_or(|(_, _, be)| e > be) {
                        best = Some((um, wm, e));
                        if any {
                            break;
                        }
                    }
                }
            }
            wm = (wm - 1) & reach;
        }
        if any && best.is_some() {
            break;
        }
    }
    Ok(best.and_then(|(um, wm, _)| {
        let u = VertexSet::from_sorted(bits(um).map(|i| ids[i]).collect());
        let w = VertexSet::from_sorted(bits(wm).map(|i| ids[i]).collect());
        DenseSpot::from_pair(g, u, w)
    }))
}

fn bits(mut m: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

/// Edge count of `G[U, W]` if every vertex has at least `thr` neighbours on
/// the other side.
fn spot_edges(adj: &[u32], um: u32, wm: u32, thr: u32) -> Option<u32> {
    let mut e = 0;
    for i in bits(um) {
        let d = (adj[i] & wm).count_ones();
        if d < thr {
            return None;
        }
        e += d;
    }
    if bits(wm).any(|j| (adj[j] & um).count_ones() < thr) {
        return None;
    }
    Some(e)
}

const SIDE_NONE: u8 = 0;
const SIDE_U: u8 = 1;
const SIDE_W: u8 = 2;

/// Trims a labelled bipartition until every vertex has at least `thr`
/// neighbours across and the density exceeds `γ`: vertices with too few
/// cross neighbours go first, then the one with the fewest while the density
/// is too low. Returns the sides, or `None` once a side is empty.
fn normalize(g: &Graph, side: &mut [u8], thr: usize, gam: SmallFrac) -> Option<(VertexSet, VertexSet)> {
    let n = g.n();
    let cross = |side: &[u8], v: usize| g.neighbors(v).iter().filter(|&&u| side[u] != SIDE_NONE && side[u] != side[v]).count();
    let mut cd = vec![0usize; n];
    for v in 0..n {
        if side[v] != SIDE_NONE {
            cd[v] = cross(side, v);
        }
    }
    let remove = |side: &mut [u8], cd: &mut [usize], v: usize| {
        let s = side[v];
        side[v] = SIDE_NONE;
        for &u in g.neighbors(v) {
            if side[u] != SIDE_NONE && side[u] != s {
                cd[u] -= 1;
            }
        }
    };
    loop {
        let mut stack: Vec<usize> = (0..n).filter(|&v| side[v] != SIDE_NONE && cd[v] < thr).collect();
        while let Some(v) = stack.pop() {
            if side[v] == SIDE_NONE {
                continue;
            }
            let s = side[v];
            remove(side, &mut cd, v);
            for &u in g.neighbors(v) {
                if side[u] != SIDE_NONE && side[u] != s && cd[u] < thr {
                    stack.push(u);
                }
            }
        }
        let (mut a, mut b, mut e) = (0u64, 0u64, 0u64);
        for v in 0..n {
            match side[v] {
                SIDE_U => {
                    a += 1;
                    e += cd[v] as u64;
                }
                SIDE_W => b += 1,
                _ => {}
            }
        }
        if a == 0 || b == 0 {
            return None;
        }
        if gam.lt_ratio(e, a * b) {
            let u = VertexSet::from_sorted((0..n).filter(|&v| side[v] == SIDE_U).collect());
            let w = VertexSet::from_sorted((0..n).filter(|&v| side[v] == SIDE_W).collect());
            return Some((u, w));
        }
        let worst = (0..n).filter(|&v| side[v] != SIDE_NONE).min_by_key(|&v| (cd[v], v))?;
        remove(side, &mut cd, worst);
    }
}

/// Local search for a large cut inside `within`: flip any vertex with more
/// neighbours on its own side until stable. Starts from `side` where set,
/// otherwise from a BFS 2-colouring.
fn local_max_cut(g: &Graph, within: &[bool], side: &mut [u8]) {
    let n = g.n();
    for s in 0..n {
        if !within[s] || side[s] != SIDE_NONE {
            continue;
        }
        side[s] = SIDE_U;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if within[u] && side[u] == SIDE_NONE {
                    side[u] = if side[v] == SIDE_U { SIDE_W } else { SIDE_U };
                    queue.push_back(u);
                }
            }
        }
    }
    loop {
        let mut changed = false;
        for v in (0..n).filter(|&v| within[v]) {
            let same = g.neighbors(v).iter().filter(|&&u| within[u] && side[u] == side[v]).count();
            let other = g.neighbors(v).iter().filter(|&&u| within[u] && side[u] != side[v]).count();
            if same > other {
                side[v] = if side[v] == SIDE_U { SIDE_W } else { SIDE_U };
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

/// Min-degree peeling inside `within`; returns the surviving prefix with the
/// largest `e / v²` among those of at least `min_size` vertices.
fn densest_by_peeling(g: &Graph, within: &[bool], min_size: usize) -> Option<Vec<bool>> {
    let n = g.n();
    let mut alive = within.to_vec();
    let mut deg: Vec<usize> = (0..n).map(|v| if alive[v] { g.degree_into(v, within) } else { 0 }).collect();
    let mut size = alive.iter().filter(|&&a| a).count();
    let mut edges: u64 = deg.iter().map(|&d| d as u64).sum::<u64>() / 2;
    let mut best: Option<(u64, u64, Vec<bool>)> = None;
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(usize, usize)>> =
        (0..n).filter(|&v| alive[v]).map(|v| std::cmp::Reverse((deg[v], v))).collect();
    while size >= min_size.max(2) {
        let better = match &best {
            None => true,
            Some((be, bs, _)) => (edges as u128) * (*bs as u128) * (*bs as u128) > (*be as u128) * (size as u128) * (size as u128),
        };
        if better {
            best = Some((edges, size as u64, alive.clone()));
        }
        let v = loop {
            let std::cmp::Reverse((d, v)) = heap.pop()?;
            if alive[v] && deg[v] == d {
                break v;
            }
        };
        alive[v] = false;
        size -= 1;
        edges -= deg[v] as u64;
        for &u in g.neighbors(v) {
            if alive[u] {
                deg[u] -= 1;
                heap.push(std::cmp::Reverse((deg[u], u)));
            }
        }
    }
    best.map(|(_, _, m)| m)
}

/// Number of highest-degree seeds tried per component.
const SEEDS_PER_COMPONENT: usize = 8;

fn heuristic_search(g: &Graph, thr: usize, gam: SmallFrac, cfg: &FinderConfig) -> Option<DenseSpot> {
    let n = g.n();
    let core = core_vertices(g, thr);
    if core.len() < 2 * thr {
        return None;
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut best: Option<(VertexSet, VertexSet, u64)> = None;
    let consider = |cand: Option<(VertexSet, VertexSet)>, best: &mut Option<(VertexSet, VertexSet, u64)>| {
        if let Some((u, w)) = cand {
            let wm = w.mask(n);
            let e: u64 = u.iter().map(|v| g.degree_into(v, &wm) as u64).sum();
            if best.as_ref().is_none_or(|b| e > b.2) {
                *best = Some((u, w, e));
            }
        }
    };
    for comp in components(g, &core) {
        if comp.len() < 2 * thr {
            continue;
        }
        let within = comp.mask(n);
        // Whole component, max-cut split.
        let mut side = vec![SIDE_NONE; n];
        local_max_cut(g, &within, &mut side);
        consider(normalize(g, &mut side, thr, gam), &mut best);
        // Densest peeled core, max-cut split.
        if let Some(dense) = densest_by_peeling(g, &within, 2 * thr) {
            let mut side = vec![SIDE_NONE; n];
            local_max_cut(g, &dense, &mut side);
            consider(normalize(g, &mut side, thr, gam), &mut best);
        }
        // Neighbourhood seeds: W = N(v), U = vertices with many neighbours in W.
        let mut by_degree: Vec<usize> = comp.iter().collect();
        by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree_into(v, &within)), v));
        let mut seeds: Vec<usize> = by_degree.iter().copied().take(SEEDS_PER_COMPONENT).collect();
        for _ in 0..SEEDS_PER_COMPONENT / 2 {
            seeds.push(by_degree[rng.gen_range(0..by_degree.len())]);
        }
        for v in seeds {
            let mut side = vec![SIDE_NONE; n];
            for &u in g.neighbors(v) {
                if within[u] {
                    side[u] = SIDE_W;
                }
            }
            for x in comp.iter() {
                if side[x] == SIDE_NONE && g.neighbors(x).iter().filter(|&&u| side[u] == SIDE_W).count() >= thr {
                    side[x] = SIDE_U;
                }
            }
            side[v] = SIDE_U;
            consider(normalize(g, &mut side, thr, gam), &mut best);
        }
        // Random starts refined by max-cut.
        for _ in 0..cfg.random_restarts {
            let mut side = vec![SIDE_NONE; n];
            let mut vs: Vec<usize> = comp.iter().collect();
            vs.shuffle(&mut rng);
            for (i, v) in vs.into_iter().enumerate() {
                side[v] = if i % 2 == 0 { SIDE_U } else { SIDE_W };
            }
            local_max_cut(g, &within, &mut side);
            consider(normalize(g, &mut side, thr, gam), &mut best);
        }
    }
    best.and_then(|(u, w, _)| DenseSpot::from_pair(g, u, w))
}

/// `v(H) >= ell` and `e(H) >= d v(H)²` for `H = g[vertices]`.
pub fn is_thick(g: &Graph, vertices: &VertexSet, d: &Q, ell: usize) -> bool {
    let h = vertices.len();
    let mask = vertices.mask(g.n());
    let e: u64 = vertices.iter().map(|v| g.degree_into(v, &mask) as u64).sum::<u64>() / 2;
    h >= ell && h > 0 && qu(e as usize) >= d * qu(h * h)
}

/// Converts a `β`-thick induced subgraph on at least `k` vertices into a spot
/// with density `> β/4` and minimum degree `> βk/4`: peel vertices of degree
/// `<= βh/2` (`h` the order), then split by a local max-cut.
pub fn thick_to_spot(g: &Graph, vertices: &VertexSet, beta: &Q, k: usize) -> Result<DenseSpot> {
    if !is_thick(g, vertices, beta, k.max(1)) {
        return input("vertex set does not induce a thick graph");
    }
    let n = g.n();
    let h = vertices.len();
    // deg <= βh/2  iff  2·den·deg <= num·h
    let b = SmallFrac::new(beta)?;
    let low = |d: usize| 2 * b.den * (d as u128) <= b.num * (h as u128);
    let mut alive = vertices.mask(n);
    loop {
        let drop: Vec<usize> = (0..n).filter(|&v| alive[v] && low(g.degree_into(v, &alive))).collect();
        if drop.is_empty() {
            break;
        }
        for v in drop {
            alive[v] = false;
        }
    }
    let mut side = vec![SIDE_NONE; n];
    local_max_cut(g, &alive, &mut side);
    let u = VertexSet::from_sorted((0..n).filter(|&v| alive[v] && side[v] == SIDE_U).collect());
    let w = VertexSet::from_sorted((0..n).filter(|&v| alive[v] && side[v] == SIDE_W).collect());
    DenseSpot::from_pair(g, u, w).ok_or_else(|| Error::Unattainable("thick graph peeled to nothing".into()))
}

/// Size and multiplicity bounds for `(γk, γ)`-dense spots in a graph of
/// maximum degree at most `Ω*k`: each side has at most `(Ω*/γ)k` vertices and
/// each vertex lies in fewer than `Ω*/γ` spots.
pub fn check_spot_facts(g: &Graph, fam: &SpotFamily, omega_star: &Q, gamma: &Q, k: usize) -> ClauseReport {
    let mut r = ClauseReport::new();
    let cap_ok = qu(g.max_degree()) <= omega_star * qu(k);
    let ratio = omega_star / gamma;
    let size_bound = &ratio * qu(k);
    let sizes_ok = fam.spots.iter().all(|s| qu(s.u.len().max(s.w.len())) <= size_bound);
    let mult = fam.vertex_multiplicity(g.n());
    let max_mult = mult.iter().copied().max().unwrap_or(0);
    let mult_ok = qu(max_mult) < ratio;
    let dense_ok = fam.spots.iter().all(|s| is_dense_spot(g, s, &(gamma * qu(k)), gamma).unwrap_or(false));
    r.clause("degree_cap", cap_ok)
        .clause("spot_sides_bounded", sizes_ok)
        .clause("vertex_multiplicity_bounded", mult_ok)
        .clause("edge_disjoint", fam.edges_disjoint())
        .clause("spots_dense", dense_ok)
        .count("spots", fam.len())
        .count("max_side", fam.spots.iter().map(|s| s.u.len().max(s.w.len())).max().unwrap_or(0))
        .count("max_multiplicity", max_mult);
    r
}
