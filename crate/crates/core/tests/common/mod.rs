//! Brute-force reference oracles shared by the integration tests. None of
//! them call into the library's search code: solutions come from plain
//! tuple enumeration and counts from plain subset enumeration.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use lfree::gadgets::{GadgetSet, Role};
use lfree::graphs::{all_graphs, generate, GraphKind};
use lfree::{Graph, LinearEquation};
use num_bigint::BigUint;

/// The equation catalog: `(coefficients, K)`.
pub const CATALOG: &[(&[i64], i64)] = &[
    (&[1, 1, -1], 0),
    (&[1, 1, -2], 0),
    (&[1, 1, 1], 0),
    (&[2, 3, -5], 0),
    (&[1, 1, 1, -1], 0),
    (&[1, -1, 1, -1], 0),
    (&[1, 1, -1], 1),
    (&[1, 1, 1], 6),
];

pub fn eq(c: &[i64], k: i64) -> LinearEquation {
    LinearEquation::new(c.to_vec(), k).unwrap()
}

pub fn catalog() -> Vec<LinearEquation> {
    CATALOG.iter().map(|&(c, k)| eq(c, k)).collect()
}

/// Every graph on at most 4 vertices plus 20 seeded random 5-vertex graphs.
pub fn corpus() -> Vec<Graph> {
    let mut out: Vec<Graph> = (0..=4).flat_map(all_graphs).collect();
    out.extend((0..20).map(|seed| generate(&GraphKind::Random { n: 5, p: 0.5, seed })));
    out
}

pub fn solves(c: &[i64], k: i64, t: &[i64]) -> bool {
    c.iter().zip(t).map(|(&a, &x)| a as i128 * x as i128).sum::<i128>() == k as i128
}

/// Each distinct value carries total coefficient zero.
pub fn trivial(c: &[i64], t: &[i64]) -> bool {
    let mut by_value: BTreeMap<i64, i128> = BTreeMap::new();
    for (&a, &x) in c.iter().zip(t) {
        *by_value.entry(x).or_default() += a as i128;
    }
    by_value.values().all(|&s| s == 0)
}

/// Distinct-value sets of the non-trivial solutions in `set^l`. The last
/// coordinate is solved for rather than looped over.
pub fn supports(c: &[i64], k: i64, set: &[i64]) -> BTreeSet<Vec<i64>> {
    let l = c.len();
    let mut out = BTreeSet::new();
    if set.is_empty() {
        return out;
    }
    let members: HashSet<i64> = set.iter().copied().collect();
    let last = c[l - 1] as i128;
    let mut idx = vec![0usize; l - 1];
    loop {
        let mut t: Vec<i64> = idx.iter().map(|&i| set[i]).collect();
        let partial: i128 = c.iter().zip(&t).map(|(&a, &x)| a as i128 * x as i128).sum();
        let rest = k as i128 - partial;
        if rest % last == 0 {
            if let Ok(x) = i64::try_from(rest / last) {
                if members.contains(&x) {
                    t.push(x);
                    debug_assert!(solves(c, k, &t));
                    if !trivial(c, &t) {
                        let s: BTreeSet<i64> = t.iter().copied().collect();
                        out.insert(s.into_iter().collect());
                    }
                }
            }
        }
        let mut j = 0;
        while j < idx.len() {
            idx[j] += 1;
            if idx[j] < set.len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == idx.len() {
            break;
        }
    }
    out
}

pub fn is_free(c: &[i64], k: i64, set: &[i64]) -> bool {
    supports(c, k, set).is_empty()
}

/// Supports as bitmasks over the positions of `set`.
pub fn conflict_masks(c: &[i64], k: i64, set: &[i64]) -> Vec<u64> {
    assert!(set.len() <= 63);
    let pos: BTreeMap<i64, usize> = set.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut masks: Vec<u64> = supports(c, k, set)
        .iter()
        .map(|s| s.iter().fold(0u64, |m, x| m | 1 << pos[x]))
        .collect();
    // drop supersets of other conflicts, they never decide anything
    masks.sort_by_key(|m| m.count_ones());
    let mut kept: Vec<u64> = Vec::new();
    for m in masks {
        if !kept.iter().any(|&k| k & !m == 0) {
            kept.push(m);
        }
    }
    kept
}

pub fn mask_free(masks: &[u64], sub: u64) -> bool {
    masks.iter().all(|&m| sub & m != m)
}

/// Number of free subsets, by enumerating all `2^|set|` of them.
pub fn count_free(c: &[i64], k: i64, set: &[i64]) -> u64 {
    let masks = conflict_masks(c, k, set);
    (0u64..1 << set.len()).filter(|&s| mask_free(&masks, s)).count() as u64
}

pub fn max_free(c: &[i64], k: i64, set: &[i64]) -> usize {
    let masks = conflict_masks(c, k, set);
    (0u64..1 << set.len())
        .filter(|&s| mask_free(&masks, s))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

fn independent(g: &Graph, s: u64) -> bool {
    g.edges().iter().all(|&(v, w)| s >> v & 1 == 0 || s >> w & 1 == 0)
}

pub fn count_independent(g: &Graph) -> BigUint {
    BigUint::from((0u64..1 << g.n()).filter(|&s| independent(g, s)).count())
}

pub fn max_independent(g: &Graph) -> usize {
    (0u64..1 << g.n())
        .filter(|&s| independent(g, s))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Labels of a gadget read straight from its role table.
pub struct Labels {
    pub vertex: Vec<i64>,
    /// Per edge: every edge label over all copies.
    pub edge: Vec<Vec<i64>>,
    pub other: Vec<i64>,
}

pub fn labels(gs: &GadgetSet) -> Labels {
    let mut vertex = vec![None; gs.graph.n()];
    let mut edge = vec![Vec::new(); gs.graph.m()];
    let mut other = Vec::new();
    for (&a, r) in &gs.roles {
        match *r {
            Role::VertexLabel { vertex: v } => vertex[v] = Some(a),
            Role::EdgeLabel { edge: e, .. } | Role::EdgeLabelCopy { edge: e, .. } => edge[e].push(a),
            _ => other.push(a),
        }
    }
    Labels {
        vertex: vertex.into_iter().map(|x| x.expect("every vertex labelled")).collect(),
        edge,
        other,
    }
}
