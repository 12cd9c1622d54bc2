//! Counting and maximisation over the conflict hypergraph.
//!
//! Elements are mapped to bit positions of a `u128`, so these routines accept
//! ground sets of at most 128 elements.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{build_conflict_hypergraph, normalize_set, ConflictHypergraph, SearchConfig};
use crate::eqmodel::LinearEquation;
use crate::error::{Error, Result};
use crate::par;

const ENUMERATION_FALLBACK: usize = 25;

/// Polynomial in one variable marking how many layer elements a subset uses.
type Poly = Vec<BigUint>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(mut a: Poly, b: &Poly) -> Poly {
    if a.len() < b.len() {
        a.resize(b.len(), BigUint::zero());
    }
    for (i, y) in b.iter().enumerate() {
        a[i] += y;
    }
    a
}

fn shift(mut a: Poly) -> Poly {
    a.insert(0, BigUint::zero());
    a
}

/// `(1 + x)^k`.
fn binomial_row(k: u32) -> Poly {
    let mut row = vec![BigUint::one()];
    for _ in 0..k {
        row = poly_add(row.clone(), &shift(row));
    }
    row
}

struct Indexed {
    ground: Vec<i64>,
    edges: Vec<u128>,
}

fn index_hypergraph(h: &ConflictHypergraph) -> Result<Indexed> {
    if h.ground.len() > 128 {
        return Err(Error::BudgetExceeded(format!(
            "ground set of {} elements exceeds the 128-element search limit",
            h.ground.len()
        )));
    }
    let bit = |x: &i64| -> u128 { 1u128 << h.ground.binary_search(x).expect("edge within ground") };
    let edges = h
        .hyperedges
        .iter()
        .map(|e| e.iter().map(bit).fold(0, |m, b| m | b))
        .collect();
    Ok(Indexed {
        ground: h.ground.clone(),
        edges,
    })
}

fn mask_of(ground: &[i64], subset: &[i64]) -> Result<u128> {
    let mut m = 0u128;
    for x in subset {
        let i = ground
            .binary_search(x)
            .map_err(|_| Error::Precondition(format!("{x} is not an element of the ground set")))?;
        m |= 1 << i;
    }
    Ok(m)
}

fn full_mask(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Drops duplicate and non-minimal edges; keeps a canonical order for
/// memoisation.
fn minimize(mut edges: Vec<u128>) -> Vec<u128> {
    edges.sort_by_key(|e| (e.count_ones(), *e));
    edges.dedup();
    let mut kept: Vec<u128> = Vec::with_capacity(edges.len());
    for e in edges {
        if !kept.iter().any(|k| k & e == *k) {
            kept.push(e);
        }
    }
    kept.sort_unstable();
    kept
}

struct Counter {
    layer: u128,
    memo: HashMap<(u128, Vec<u128>), Poly>,
    nodes: u64,
    node_budget: u64,
}

impl Counter {
    fn count(&mut self, vertices: u128, edges: Vec<u128>) -> Result<Poly> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::BudgetExceeded(format!(
                "hypergraph counting exceeded {} nodes",
                self.node_budget
            )));
        }
        let covered = edges.iter().fold(0u128, |m, e| m | e);
        let free = vertices & !covered;
        let free_layer = (free & self.layer).count_ones();
        let free_plain = (free & !self.layer).count_ones();
        let mut factor = binomial_row(free_layer);
        let pow2 = BigUint::one() << free_plain;
        for c in factor.iter_mut() {
            *c *= &pow2;
        }
        if edges.is_empty() {
            return Ok(factor);
        }

        let components = split_components(&edges);
        if components.len() > 1 {
            let mut acc = factor;
            for (verts, comp) in components {
                let p = self.count(verts, comp)?;
                acc = poly_mul(&acc, &p);
            }
            return Ok(acc);
        }

        let key = (covered, edges);
        if let Some(p) = self.memo.get(&key) {
            return Ok(poly_mul(&factor, p));
        }
        let (covered, edges) = key;

        let v = pick_vertex(covered, &edges);
        let bit = 1u128 << v;
        let rest = covered & !bit;

        let without: Vec<u128> = edges.iter().copied().filter(|e| e & bit == 0).collect();
        let mut result = self.count(rest, without)?;

        let mut with = Vec::with_capacity(edges.len());
        let mut blocked = false;
        for &e in &edges {
            let shrunk = e & !bit;
            if shrunk == 0 {
                blocked = true;
                break;
            }
            with.push(shrunk);
        }
        if !blocked {
            let p = self.count(rest, minimize(with))?;
            let p = if self.layer & bit != 0 { shift(p) } else { p };
            result = poly_add(result, &p);
        }
        self.memo.insert((covered, edges), result.clone());
        Ok(poly_mul(&factor, &result))
    }
}

fn pick_vertex(covered: u128, edges: &[u128]) -> u32 {
    let mut best = (0usize, covered.trailing_zeros());
    let mut rem = covered;
    while rem != 0 {
        let v = rem.trailing_zeros();
        rem &= rem - 1;
        let deg = edges.iter().filter(|e| *e >> v & 1 == 1).count();
        if deg > best.0 {
            best = (deg, v);
        }
    }
    best.1
}

fn split_components(edges: &[u128]) -> Vec<(u128, Vec<u128>)> {
    let mut comps: Vec<(u128, Vec<u128>)> = Vec::new();
    for &e in edges {
        let mut verts = e;
        let mut members = vec![e];
        let mut i = 0;
        while i < comps.len() {
            if comps[i].0 & verts != 0 {
                let (v, m) = comps.swap_remove(i);
                verts |= v;
                members.extend(m);
                i = 0;
            } else {
                i += 1;
            }
        }
        comps.push((verts, members));
    }
    for c in comps.iter_mut() {
        c.1.sort_unstable();
    }
    comps.sort_by_key(|c| c.0.trailing_zeros());
    comps
}

fn layer_poly(h: &ConflictHypergraph, layer: &[i64], cfg: &SearchConfig) -> Result<Poly> {
    let idx = index_hypergraph(h)?;
    let layer_mask = mask_of(&idx.ground, &normalize_set(layer))?;
    let mut counter = Counter {
        layer: layer_mask,
        memo: HashMap::new(),
        nodes: 0,
        node_budget: cfg.node_budget,
    };
    let m = layer_mask.count_ones() as usize;
    let mut p = counter.count(full_mask(idx.ground.len()), minimize(idx.edges))?;
    p.resize(m + 1, BigUint::zero());
    Ok(p)
}

/// Number of L-free subsets of `set`, the empty set included.
pub fn count_free_subsets(eq: &LinearEquation, set: &[i64], cfg: &SearchConfig) -> Result<BigUint> {
    let h = build_conflict_hypergraph(eq, set, cfg)?;
    count_hypergraph(&h, cfg)
}

/// Independent-set count of a conflict hypergraph.
pub fn count_hypergraph(h: &ConflictHypergraph, cfg: &SearchConfig) -> Result<BigUint> {
    match layer_poly(h, &[], cfg) {
        Ok(p) => Ok(p.into_iter().sum()),
        Err(Error::BudgetExceeded(_)) if h.ground.len() <= ENUMERATION_FALLBACK => {
            enumerate_hypergraph(h, cfg)
        }
        Err(e) => Err(e),
    }
}

/// `z[t]` = number of L-free subsets `S` of `set` with
/// `|S ∩ layer| = |layer| - t`.
pub fn count_free_by_layer(
    eq: &LinearEquation,
    set: &[i64],
    layer: &[i64],
    cfg: &SearchConfig,
) -> Result<Vec<BigUint>> {
    let h = build_conflict_hypergraph(eq, set, cfg)?;
    let mut p = layer_poly(&h, layer, cfg)?;
    p.reverse();
    Ok(p)
}

/// `z[t]` = number of L-free subsets `S` of `set` that contain exactly
/// `groups.len() - t` of the groups in full. Uses direct subset enumeration,
/// so `2^|set|` must fit in the tuple budget.
pub fn count_free_by_groups(
    eq: &LinearEquation,
    set: &[i64],
    groups: &[Vec<i64>],
    cfg: &SearchConfig,
) -> Result<Vec<BigUint>> {
    let h = build_conflict_hypergraph(eq, set, cfg)?;
    let idx = index_hypergraph(&h)?;
    let n = idx.ground.len();
    check_subset_budget(n, cfg)?;
    let group_masks: Vec<u128> = groups
        .iter()
        .map(|g| mask_of(&idx.ground, g))
        .collect::<Result<_>>()?;
    let m = groups.len();
    let total = 1u64 << n;
    let pieces = par::chunks(total, 64);
    let partial = par::map_range(cfg.parallel, 0..pieces.len(), |c| {
        let (lo, hi) = pieces[c];
        let mut z = vec![0u64; m + 1];
        for s in lo..hi {
            let s = s as u128;
            if idx.edges.iter().any(|e| s & e == *e) {
                continue;
            }
            let full = group_masks.iter().filter(|g| s & **g == **g).count();
            z[m - full] += 1;
        }
        z
    });
    let mut z = vec![BigUint::zero(); m + 1];
    for part in partial {
        for (acc, x) in z.iter_mut().zip(part) {
            *acc += x;
        }
    }
    Ok(z)
}

fn check_subset_budget(n: usize, cfg: &SearchConfig) -> Result<()> {
    if n >= 64 || (1u64 << n) > cfg.tuple_budget {
        return Err(Error::BudgetExceeded(format!(
            "2^{n} subsets exceeds budget {}",
            cfg.tuple_budget
        )));
    }
    Ok(())
}

fn enumerate_hypergraph(h: &ConflictHypergraph, cfg: &SearchConfig) -> Result<BigUint> {
    let idx = index_hypergraph(h)?;
    let n = idx.ground.len();
    check_subset_budget(n, cfg)?;
    let pieces = par::chunks(1u64 << n, 64);
    let counts = par::map_range(cfg.parallel, 0..pieces.len(), |c| {
        let (lo, hi) = pieces[c];
        (lo..hi)
            .filter(|&s| !idx.edges.iter().any(|e| s as u128 & e == *e))
            .count() as u64
    });
    Ok(counts.into_iter().map(BigUint::from).sum())
}

/// Counts L-free subsets by checking all `2^|set|` subsets. Slow; kept as a
/// cross-check for the recursive counter.
pub fn count_free_subsets_enumerate(
    eq: &LinearEquation,
    set: &[i64],
    cfg: &SearchConfig,
) -> Result<BigUint> {
    let h = build_conflict_hypergraph(eq, set, cfg)?;
    enumerate_hypergraph(&h, cfg)
}

struct MaxSearch<'a> {
    edges: &'a [u128],
    best: u128,
    best_size: u32,
    nodes: u64,
    node_budget: u64,
}

impl MaxSearch<'_> {
    fn run(&mut self, chosen: u128, undecided: u128) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::BudgetExceeded(format!(
                "maximum search exceeded {} nodes",
                self.node_budget
            )));
        }
        let open = chosen | undecided;
        let mut alive: Vec<u128> = self
            .edges
            .iter()
            .copied()
            .filter(|e| e & !open == 0)
            .collect();
        if alive.is_empty() {
            if open.count_ones() > self.best_size {
                self.best_size = open.count_ones();
                self.best = open;
            }
            return Ok(());
        }
        // each pairwise-disjoint alive edge costs at least one element
        alive.sort_by_key(|e| ((e & undecided).count_ones(), *e));
        let mut used = 0u128;
        let mut lost = 0;
        for e in &alive {
            let part = e & undecided;
            if part & used == 0 {
                used |= part;
                lost += 1;
            }
        }
        if open.count_ones() - lost <= self.best_size {
            return Ok(());
        }
        let v = pick_vertex(undecided, &alive);
        let bit = 1u128 << v;
        let with = chosen | bit;
        if !alive.iter().any(|e| e & !with == 0) {
            self.run(with, undecided & !bit)?;
        }
        self.run(chosen, undecided & !bit)
    }
}

/// A maximum L-free subset of `set`: `(size, witness)` with the witness
/// sorted ascending.
pub fn max_free_subset(
    eq: &LinearEquation,
    set: &[i64],
    cfg: &SearchConfig,
) -> Result<(usize, Vec<i64>)> {
    let h = build_conflict_hypergraph(eq, set, cfg)?;
    max_independent_in_hypergraph(&h, cfg)
}

/// Maximum independent set of a conflict hypergraph.
pub fn max_independent_in_hypergraph(
    h: &ConflictHypergraph,
    cfg: &SearchConfig,
) -> Result<(usize, Vec<i64>)> {
    let idx = index_hypergraph(h)?;
    let n = idx.ground.len();
    let edges = minimize(idx.edges.clone());
    // greedy seed
    let mut seed = 0u128;
    for i in 0..n {
        let with = seed | 1 << i;
        if !edges.iter().any(|e| e & !with == 0) {
            seed = with;
        }
    }
    let mut search = MaxSearch {
        edges: &edges,
        best: seed,
        best_size: seed.count_ones(),
        nodes: 0,
        node_budget: cfg.node_budget,
    };
    search.run(0, full_mask(n))?;
    let witness: Vec<i64> = (0..n)
        .filter(|i| search.best >> i & 1 == 1)
        .map(|i| idx.ground[i])
        .collect();
    Ok((witness.len(), witness))
}
