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


use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Embedding;
use crate::decomposition::{certify_nowhere_dense, Certification};
use crate::error::{input, precondition, Error, Result};
use crate::generators::rng_from_seed;
use crate::graph::{Graph, VertexSet};
use crate::rational::{ceil_u64, is_positive, one, qi, qu, serde_q, strictly_above, Q};
use crate::spots::FinderConfig;
use crate::tree::RootedTree;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpanderOptions {
    pub finder: FinderConfig,
    pub seed: u64,
}

/// One extension step of the path embedding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    /// Index of the path vertex placed in this step.
    pub position: usize,
    pub host: usize,
    /// Neighbours of the chosen host inside the image before placement.
    pub image_degree: usize,
    /// Unused neighbours of the active vertex's image.
    pub candidates: usize,
    /// Candidates ruled out by the look-ahead condition.
    pub disqualified: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRun {
    pub embedding: Option<Embedding>,
    pub steps: Vec<PathStep>,
    pub certification: Certification,
}

fn check_unit(name: &str, x: &Q) -> Result<()> {
    if !is_positive(x) || *x >= one() {
        return input(format!("{name} must lie in (0, 1)"));
    }
    Ok(())
}

/// Minimum degree over non-isolated vertices above `ρk` and no
/// `(γk, γ)`-dense spot.
fn check_expander(g: &Graph, k: usize, gamma: &Q, rho: &Q, finder: &FinderConfig) -> Result<Certification> {
    let need = strictly_above(&(rho * qu(k))) as usize;
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > 0 && g.degree(v) < need) {
        return precondition(format!("vertex {v} has degree {} which is not above ρk", g.degree(v)));
    }
    let (spot, cert) = certify_nowhere_dense(g, &(gamma * qu(k)), gamma, finder)?;
    if let Some(s) = spot {
        return precondition(format!(
            "host contains a (γk, γ)-dense spot on {} + {} vertices",
            s.u.len(),
            s.w.len()
        ));
    }
    Ok(cert)
}

fn pick_start<R: Rng>(g: &Graph, rng: &mut R) -> Option<usize> {
    let live: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) > 0).collect();
    if live.is_empty() {
        (g.n() > 0).then(|| rng.gen_range(0..g.n()))
    } else {
        live.choose(rng).copied()
    }
}

/// Embeds the path `u_1 ... u_k` (`k = path_len`) into `gexp`, always
/// extending to a neighbour `w` of the last image with
/// `deg(w, image) < √γ k`. Candidates are compared through squares, so the
/// test is exact.
pub fn embed_path_expander(
    path_len: usize,
    gexp: &Graph,
    gamma: &Q,
    rho: &Q,
    opts: &ExpanderOptions,
) -> Result<PathRun> {
    check_unit("gamma", gamma)?;
    check_unit("rho", rho)?;
    if path_len == 0 {
        return input("path order must be positive");
    }
    if rho * rho <= qi(289) * gamma {
        return precondition("need ρ > 17√γ");
    }
    let certification = check_expander(gexp, path_len, gamma, rho, &opts.finder)?;
    look_ahead_path(gexp, path_len, gamma, opts.seed, certification)
}

/// The look-ahead walk without the host checks.
pub(crate) fn look_ahead_path(
    gexp: &Graph,
    k: usize,
    gamma: &Q,
    seed: u64,
    certification: Certification,
) -> Result<PathRun> {
    let mut rng = rng_from_seed(seed);
    let Some(start) = pick_start(gexp, &mut rng) else {
        return input("host graph has no vertices");
    };
    let kk = qu(k * k);
    let bar = gamma * &kk;
    let spare = qi(256) * gamma * &kk;
    let n = gexp.n();
    let mut used = vec![false; n];
    let mut image_deg = vec![0usize; n];
    let place = |h: usize, used: &mut Vec<bool>, image_deg: &mut Vec<usize>| {
        used[h] = true;
        for &w in gexp.neighbors(h) {
            image_deg[w] += 1;
        }
    };
    place(start, &mut used, &mut image_deg);
    let mut hosts = vec![start];
    let mut steps = Vec::with_capacity(k);
    for position in 1..k {
        let cur = hosts[position - 1];
        let free: Vec<usize> = gexp.neighbors(cur).iter().copied().filter(|&w| !used[w]).collect();
        let (ok, bad): (Vec<usize>, Vec<usize>) = free.iter().partition(|&&w| qu(image_deg[w] * image_deg[w]) < bar);
        if qu(bad.len() * bad.len()) > spare {
            return Err(Error::Precondition(format!(
                "step {position}: {} neighbours disqualified, more than 16√γk; the host is not nowhere-dense",
                bad.len()
            )));
        }
        let Some(&w) = ok.choose(&mut rng) else {
            return Ok(PathRun { embedding: None, steps, certification });
        };
        steps.push(PathStep {
            position,
            host: w,
            image_degree: image_deg[w],
            candidates: free.len(),
            disqualified: bad.len(),
        });
        place(w, &mut used, &mut image_deg);
        hosts.push(w);
    }
    let t = RootedTree::path(k)?;
    let map = hosts.into_iter().enumerate().collect();
    Ok(PathRun { embedding: Some(Embedding::from_map(&t, map)), steps, certification })
}

/// Parameters of the reserve-set embedding. The tree order is `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReserveParams {
    #[serde(with = "serde_q")]
    pub gamma: Q,
    #[serde(with = "serde_q")]
    pub rho: Q,
    #[serde(with = "serde_q")]
    pub delta: Q,
    /// The first `q` levels of the tree are cut vertices.
    pub q: u32,
    pub retries: usize,
}

/// Free-degree margin of a shrub root's image against `δk/2 - 2h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MagicMargin {
    pub shrub_root: usize,
    pub host: usize,
    #[serde(with = "serde_q")]
    pub at_start: Q,
    #[serde(with = "serde_q")]
    pub at_end: Q,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReserveRun {
    pub embedding: Option<Embedding>,
    pub cut_vertices: VertexSet,
    pub shrub_roots: Vec<usize>,
    #[serde(with = "serde_q")]
    pub threshold: Q,
    /// Margins of the successful attempt.
    pub margins: Vec<MagicMargin>,
    pub attempts: usize,
    /// Failed attempts by stage: `cut_vertices`, `shrub_root`, `shrub_fill`, `magic`.
    pub failures: BTreeMap<String, usize>,
    pub certification: Certification,
}

struct Attempt {
    host: Vec<usize>,
    reserve: Vec<usize>,
    margins: Vec<MagicMargin>,
}

/// Embeds a tree of maximum degree 3: the first `q` levels go into `seeds`,
/// then each shrub below them is embedded on its own. Inside a shrub every
/// branching step draws twice as many admissible neighbours as there are
/// children, hosts the children on a random half and reserves the other
/// half; admissible means fewer than `ρk/100` neighbours in the image before
/// the shrub plus the reserve (the parent's image not counted). Reserved
/// vertices may later host shrub roots only. An attempt also fails when a
/// shrub root's free degree drops below `δk/2 - 2h`, `h` the number of
/// shrubs.
pub fn embed_tree_reserve(
    t: &RootedTree,
    gexp: &Graph,
    seeds: &VertexSet,
    params: &ReserveParams,
    opts: &ExpanderOptions,
) -> Result<ReserveRun> {
    check_unit("gamma", &params.gamma)?;
    check_unit("rho", &params.rho)?;
    check_unit("delta", &params.delta)?;
    let k = t.k();
    let kq = qu(k);
    if t.max_degree() > 3 {
        return precondition("tree has a vertex of degree above 3");
    }
    if params.q == 0 || params.q >= 63 {
        return input("q must lie in 1..63");
    }
    if qu(1usize << params.q) > &params.rho * &kq {
        return precondition(format!("2^q = {} exceeds ρk", 1u64 << params.q));
    }
    let n = gexp.n();
    if seeds.as_slice().last().is_some_and(|&v| v >= n) {
        return input("seed vertex outside the host graph");
    }
    let certification = check_expander(gexp, k, &params.gamma, &params.rho, &opts.finder)?;
    let seed_need = ceil_u64(&(&params.delta * &kq)) as usize;
    if let Some(v) = seeds.iter().find(|&v| gexp.degree(v) < seed_need) {
        return precondition(format!("seed {v} has degree {} below δk", gexp.degree(v)));
    }
    let order = t.bfs_order();
    let mut depth = vec![0u32; k];
    for &v in &order {
        if let Some(p) = t.parent(v) {
            depth[v] = depth[p] + 1;
        }
    }
    let cut: Vec<usize> = order.iter().copied().filter(|&v| depth[v] < params.q).collect();
    let roots: Vec<usize> = order.iter().copied().filter(|&v| depth[v] == params.q).collect();
    if seeds.len() < cut.len() {
        return precondition("fewer seeds than cut vertices");
    }
    let threshold = &params.delta * &kq / qi(2) - qu(2 * roots.len());
    let mut run = ReserveRun {
        embedding: None,
        cut_vertices: VertexSet::new(cut.iter().copied()),
        shrub_roots: roots.clone(),
        threshold: threshold.clone(),
        margins: Vec::new(),
        attempts: 0,
        failures: BTreeMap::new(),
        certification,
    };
    let ctx = Ctx { t, g: gexp, seeds: seeds.mask(n), cut: &cut, roots: &roots, params, threshold };
    let mut rng = rng_from_seed(opts.seed);
    for _ in 0..params.retries.max(1) {
        run.attempts += 1;
        match ctx.attempt(&mut rng) {
            Ok(a) => {
                let map = a.host.iter().copied().enumerate().collect();
                let mut e = Embedding::from_map(t, map);
                e.reserve = VertexSet::new(a.reserve);
                run.embedding = Some(e);
                run.margins = a.margins;
                break;
            }
            Err(stage) => *run.failures.entry(stage.to_string()).or_default() += 1,
        }
    }
    Ok(run)
}

struct Ctx<'a> {
    t: &'a RootedTree,
    g: &'a Graph,
    seeds: Vec<bool>,
    cut: &'a [usize],
    roots: &'a [usize],
    params: &'a ReserveParams,
    threshold: Q,
}

impl Ctx<'_> {
    /// `100 · deg(w, frozen ∪ reserve ∖ {skip}) < ρk`.
    fn admissible(&self, w: usize, frozen: &[bool], reserve: &[bool], skip: usize) -> bool {
        let d = self.g.neighbors(w).iter().filter(|&&x| x != skip && (frozen[x] || reserve[x])).count();
        qu(100 * d) < &self.params.rho * qu(self.t.k())
    }

    fn free_degree(&self, v: usize, used: &[bool]) -> usize {
        self.g.neighbors(v).iter().filter(|&&x| !used[x]).count()
    }

    fn attempt<R: Rng>(&self, rng: &mut R) -> std::result::Result<Attempt, &'static str> {
        let (t, g) = (self.t, self.g);
        let n = g.n();
        let mut used = vec![false; n];
        let mut reserve = vec![false; n];
        let mut reserved = Vec::new();
        let mut host = vec![usize::MAX; t.k()];

        for &v in self.cut {
            let mut pool: Vec<usize> = match t.parent(v) {
                None => (0..n).filter(|&x| self.seeds[x]).collect(),
                Some(p) => g.neighbors(host[p]).iter().copied().filter(|&x| self.seeds[x] && !used[x]).collect(),
            };
            pool.shuffle(rng);
            let pick = pool
                .into_iter()
                .min_by_key(|&x| g.neighbors(x).iter().filter(|&&y| used[y]).count())
                .ok_or("cut_vertices")?;
            host[v] = pick;
            used[pick] = true;
        }

        let mut margins = Vec::with_capacity(self.roots.len());
        for &r in self.roots {
            let frozen = used.clone();
            let ph = host[t.parent(r).expect("shrub roots sit below the cut levels")];
            let mut pool: Vec<usize> = g
                .neighbors(ph)
                .iter()
                .copied()
                .filter(|&w| !used[w] && self.admissible(w, &frozen, &reserve, ph))
                .collect();
            pool.shuffle(rng);
            let pick = pool.iter().copied().find(|&w| self.seeds[w]).or(pool.first().copied()).ok_or("shrub_root")?;
            host[r] = pick;
            used[pick] = true;
            margins.push(MagicMargin {
                shrub_root: r,
                host: pick,
                at_start: qu(self.free_degree(pick, &used)) - &self.threshold,
                at_end: Q::default(),
            });
            let mut queue = std::collections::VecDeque::from([r]);
            while let Some(v) = queue.pop_front() {
                let cs = t.children(v);
                if cs.is_empty() {
                    continue;
                }
                let hv = host[v];
                let mut pool: Vec<usize> = g.neighbors(hv).iter().copied().filter(|&w| !used[w] && !reserve[w]).collect();
                pool.shuffle(rng);
                let mut chosen: Vec<usize> = pool
                    .into_iter()
                    .filter(|&w| self.admissible(w, &frozen, &reserve, hv))
                    .take(2 * cs.len())
                    .collect();
                if chosen.len() < 2 * cs.len() {
                    return Err("shrub_fill");
                }
                chosen.shuffle(rng);
                for (&c, &w) in cs.iter().zip(&chosen) {
                    host[c] = w;
                    used[w] = true;
                    queue.push_back(c);
                }
                for &w in &chosen[cs.len()..] {
                    reserve[w] = true;
                    reserved.push(w);
                }
            }
        }
        debug_assert!(host.iter().all(|&h| h != usize::MAX));
        for m in &mut margins {
            m.at_end = qu(self.free_degree(m.host, &used)) - &self.threshold;
        }
        if margins.iter().any(|m| m.at_start < Q::default() || m.at_end < Q::default()) {
            return Err("magic");
        }
        Ok(Attempt { host, reserve: reserved, margins })
    }
}
