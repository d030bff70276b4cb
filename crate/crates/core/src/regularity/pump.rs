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

//! Index pumping: refine an irregular pair partition along irregularity
//! witnesses and re-equalize cluster sizes, gaining index.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rational::{pow, q, qu, Q};
use crate::regularity::index::{index, partition_regularity, GarbagePartition, PairPartitionState};

/// Guaranteed index increase per pump: `ε⁵/3691`.
pub fn pump_gain(eps: &Q) -> Q {
    pow(eps, 5) / q(3691, 1)
}

/// `2q·16^q`, saturating at `u128::MAX`.
pub fn class_count_cap(qv: u64) -> u128 {
    let mut x: u128 = 2u128.saturating_mul(qv as u128);
    for _ in 0..qv {
        x = x.saturating_mul(16);
        if x == u128::MAX {
            break;
        }
    }
    x
}

/// `growth · 2^p <= size`.
fn growth_ok(growth: usize, size: usize, p: u64) -> bool {
    if growth == 0 {
        return true;
    }
    match 1u128.checked_shl(p as u32).filter(|_| p < 127) {
        Some(f) => (growth as u128).saturating_mul(f) <= size as u128,
        None => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpOutcome {
    pub state: PairPartitionState,
    #[serde(with = "crate::rational::serde_q")]
    pub gain: Q,
    pub cluster_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimultaneousOutcome {
    pub pairs: Vec<PairPartitionState>,
    pub spectators: Vec<GarbagePartition>,
    #[serde(with = "crate::rational::serde_vec_q")]
    pub gains: Vec<Q>,
    pub cluster_size: usize,
}

/// Which conclusions the common-size search must enforce.
#[derive(Clone, Debug)]
pub(crate) struct Limits {
    pub p: u64,
    pub q: u64,
    pub eps: Q,
    pub lower_count: bool,
}

/// Splits every cluster by the given witness subsets, then cuts all atoms
/// into pieces of one common size `s'` (remainders become garbage), trying
/// `s'` from the current cluster size downwards and returning the first that
/// satisfies the class-count bounds, the garbage-growth bound and, for every
/// listed pair, the index gain.
pub(crate) fn refine_and_equalize(
    g: &Graph,
    parts: &[GarbagePartition],
    splits: &[Vec<Vec<VertexSet>>],
    pairs: &[(usize, usize)],
    limits: &Limits,
) -> Result<(Vec<GarbagePartition>, Vec<Q>, usize)> {
    let atoms: Vec<Vec<Vec<usize>>> = parts
        .iter()
        .zip(splits)
        .map(|(part, sp)| {
            part.clusters()
                .iter()
                .zip(sp)
                .flat_map(|(c, subsets)| {
                    let mut by_key: BTreeMap<Vec<bool>, Vec<usize>> = BTreeMap::new();
                    for v in c.iter() {
                        by_key.entry(subsets.iter().map(|s| s.contains(v)).collect()).or_default().push(v);
                    }
                    let mut groups: Vec<Vec<usize>> = by_key.into_values().collect();
                    groups.sort();
                    groups
                })
                .collect()
        })
        .collect();
    let before: Vec<Q> = pairs
        .iter()
        .map(|&(a, b)| index(g, &PairPartitionState { a_side: parts[a].clone(), b_side: parts[b].clone() }))
        .collect();
    let target = pump_gain(&limits.eps);
    let cap = class_count_cap(limits.q);
    let start = parts.iter().filter_map(GarbagePartition::cluster_size).max().unwrap_or(0);
    let mut reasons = Vec::new();
    'size: for s in (1..=start).rev() {
        let mut out = Vec::with_capacity(parts.len());
        for (part, atoms) in parts.iter().zip(&atoms) {
            let mut clusters = Vec::new();
            let mut garbage: Vec<usize> = part.garbage().as_slice().to_vec();
            for atom in atoms {
                let full = atom.len() / s;
                for c in 0..full {
                    clusters.push(VertexSet::from_sorted(atom[c * s..(c + 1) * s].to_vec()));
                }
                garbage.extend_from_slice(&atom[full * s..]);
            }
            let np = GarbagePartition::new(VertexSet::new(garbage), clusters)?;
            let count = np.class_count() as u128;
            if (limits.lower_count && count < limits.p as u128 + 1) || count > cap {
                reasons.push(format!("size {s}: class count {count} outside [p+1, 2q16^q]"));
                continue 'size;
            }
            let growth = np.garbage().len() - part.garbage().len();
            if !growth_ok(growth, part.ground().len(), limits.p) {
                reasons.push(format!("size {s}: garbage growth {growth} above |side|/2^p"));
                continue 'size;
            }
            out.push(np);
        }
        let mut gains = Vec::with_capacity(pairs.len());
        for (&(a, b), old) in pairs.iter().zip(&before) {
            let st = PairPartitionState { a_side: out[a].clone(), b_side: out[b].clone() };
            let gain = index(g, &st) - old;
            if gain < target {
                reasons.push(format!("size {s}: index gain {gain} below eps^5/3691"));
                continue 'size;
            }
            gains.push(gain);
        }
        return Ok((out, gains, s));
    }
    Err(Error::Unattainable(format!(
        "no common cluster size satisfies the pumping conclusions; last reasons: {}",
        reasons.iter().rev().take(3).cloned().collect::<Vec<_>>().join("; ")
    )))
}

fn check_eps(eps: &Q) -> Result<()> {
    if *eps <= q(0, 1) || *eps > q(1, 4) {
        return input("pumping needs 0 < eps <= 1/4");
    }
    Ok(())
}

/// Hypotheses on a single partition: class count in `[p, q]`, garbage below
/// `ε|side|`.
fn check_partition(part: &GarbagePartition, eps: &Q, p: u64, qv: u64, what: &str) -> Result<()> {
    let c = part.class_count() as u64;
    if c < p || c > qv {
        return input(format!("{what}: class count {c} outside [p, q] = [{p}, {qv}]"));
    }
    if qu(part.garbage().len()) >= eps * qu(part.ground().len()) {
        return input(format!("{what}: garbage cluster not smaller than eps times the side"));
    }
    Ok(())
}

fn common_size(parts: &[&GarbagePartition]) -> Result<usize> {
    let sizes: Vec<usize> = parts.iter().filter_map(|p| p.cluster_size()).collect();
    match sizes.first() {
        None => input("no clusters to pump"),
        Some(&s) if sizes.iter().all(|&x| x == s) && sizes.len() == parts.len() => Ok(s),
        _ => input("all partitions must share one non-garbage cluster size"),
    }
}

fn sizes_comparable(a: usize, b: usize) -> bool {
    2 * a >= b && 2 * b >= a
}

/// Witness subsets per cluster for both sides of an irregular pair.
fn witness_splits(g: &Graph, st: &PairPartitionState, eps: &Q, cap: usize) -> Result<(Vec<Vec<VertexSet>>, Vec<Vec<VertexSet>>)> {
    let reg = partition_regularity(g, st, eps, cap)?;
    if reg.regular {
        return Err(Error::NoWitness(format!(
            "pair partition is eps-regular: {} of {} cluster pairs irregular",
            reg.irregular.len(),
            reg.cluster_pairs
        )));
    }
    let mut a = vec![Vec::new(); st.a_side.clusters().len()];
    let mut b = vec![Vec::new(); st.b_side.clusters().len()];
    for (i, j, w) in reg.irregular {
        a[i].push(w.u);
        b[j].push(w.w);
    }
    Ok((a, b))
}

/// Refines an ε-irregular pair partition. The output has between `p+1` and
/// `2q·16^q` classes per side, garbage growth at most `|side|/2^p`, equal
/// cluster sizes, refines the input up to garbage, and index at least
/// `ε⁵/3691` higher. Witnesses come from the exact oracle for clusters of
/// at most `cap` vertices.
pub fn pump(g: &Graph, state: &PairPartitionState, eps: &Q, p: u64, qv: u64, cap: usize) -> Result<PumpOutcome> {
    check_eps(eps)?;
    let (na, nb) = (state.a_side.ground().len(), state.b_side.ground().len());
    if !sizes_comparable(na, nb) {
        return input("pair sides must satisfy |A|/2 <= |B| <= 2|A|");
    }
    check_partition(&state.a_side, eps, p, qv, "a_side")?;
    check_partition(&state.b_side, eps, p, qv, "b_side")?;
    common_size(&[&state.a_side, &state.b_side])?;
    let (sa, sb) = witness_splits(g, state, eps, cap)?;
    let limits = Limits { p, q: qv, eps: eps.clone(), lower_count: true };
    let parts = [state.a_side.clone(), state.b_side.clone()];
    let (mut out, gains, s) = refine_and_equalize(g, &parts, &[sa, sb], &[(0, 1)], &limits)?;
    let b_side = out.pop().unwrap();
    let a_side = out.pop().unwrap();
    Ok(PumpOutcome { state: PairPartitionState { a_side, b_side }, gain: gains[0].clone(), cluster_size: s })
}

/// Pumps several pairwise disjoint irregular pairs at once, re-equalizing the
/// spectator partitions to the same common cluster size.
pub fn pump_simultaneous(
    g: &Graph,
    pairs: &[PairPartitionState],
    spectators: &[GarbagePartition],
    eps: &Q,
    p: u64,
    qv: u64,
    cap: usize,
) -> Result<SimultaneousOutcome> {
    check_eps(eps)?;
    if pairs.is_empty() {
        return input("pump_simultaneous needs at least one pair");
    }
    let mut all: Vec<&GarbagePartition> = Vec::new();
    for (i, st) in pairs.iter().enumerate() {
        let (na, nb) = (st.a_side.ground().len(), st.b_side.ground().len());
        if !sizes_comparable(na, nb) {
            return input(format!("pair {i}: sides must satisfy |A|/2 <= |B| <= 2|A|"));
        }
        check_partition(&st.a_side, eps, p, qv, &format!("pair {i} a_side"))?;
        check_partition(&st.b_side, eps, p, qv, &format!("pair {i} b_side"))?;
        for (j, c) in spectators.iter().enumerate() {
            let cs = c.ground().len();
            if 2 * cs < na.max(nb) || cs > 2 * na.min(nb) {
                return input(format!("spectator {j} size incompatible with pair {i}"));
            }
        }
        all.push(&st.a_side);
        all.push(&st.b_side);
    }
    for (j, c) in spectators.iter().enumerate() {
        check_partition(c, eps, p, qv, &format!("spectator {j}"))?;
        all.push(c);
    }
    for (x, a) in all.iter().enumerate() {
        for b in &all[x + 1..] {
            if !a.ground().is_disjoint(b.ground()) {
                return input("all partitioned sets must be pairwise disjoint");
            }
        }
    }
    common_size(&all)?;
    let mut parts = Vec::new();
    let mut splits = Vec::new();
    let mut idx = Vec::new();
    for st in pairs {
        let (sa, sb) = witness_splits(g, st, eps, cap)?;
        idx.push((parts.len(), parts.len() + 1));
        parts.push(st.a_side.clone());
        parts.push(st.b_side.clone());
        splits.push(sa);
        splits.push(sb);
    }
    for c in spectators {
        parts.push(c.clone());
        splits.push(vec![Vec::new(); c.clusters().len()]);
    }
    let limits = Limits { p, q: qv, eps: eps.clone(), lower_count: true };
    let (out, gains, s) = refine_and_equalize(g, &parts, &splits, &idx, &limits)?;
    let mut it = out.into_iter();
    let mut new_pairs = Vec::new();
    for _ in pairs {
        let a_side = it.next().unwrap();
        let b_side = it.next().unwrap();
        new_pairs.push(PairPartitionState { a_side, b_side });
    }
    Ok(SimultaneousOutcome { pairs: new_pairs, spectators: it.collect(), gains, cluster_size: s })
}
