//! Simple undirected graphs, independent-set oracles and generators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact graph searches use `u64` vertex masks.
pub const MAX_VERTICES: usize = 64;

/// An undirected graph with an explicit vertex order.
///
/// Every edge `(v, w)` is stored with `v` before `w` in the order, and the
/// edge list is sorted by the positions of its endpoints. Gadgets rely on
/// both facts for reproducible output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    pub parts: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parts: Option<Vec<Vec<usize>>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_order(n, edges, (0..n).collect())
    }

    pub fn with_order(n: usize, edges: &[(usize, usize)], order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidGraph(format!(
                "order lists {} vertices, graph has {n}",
                order.len()
            )));
        }
        for &v in &order {
            if v >= n || seen[v] {
                return Err(Error::InvalidGraph(format!("order is not a permutation of 0..{n}")));
            }
            seen[v] = true;
        }
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            let e = if pos[a] < pos[b] { (a, b) } else { (b, a) };
            if out.contains(&e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a},{b})")));
            }
            out.push(e);
        }
        out.sort_by_key(|&(v, w)| (pos[v], pos[w]));
        Ok(Graph { n, edges: out, order })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Vertices in the graph's order.
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.iter().any(|&(v, w)| (v, w) == (a, b) || (v, w) == (b, a))
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        self.edges
            .iter()
            .all(|(v, w)| !(set.contains(v) && set.contains(w)))
    }

    /// Number of edges with both endpoints in `mask`.
    pub fn edges_within(&self, mask: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(v, w)| mask >> v & 1 == 1 && mask >> w & 1 == 1)
            .count()
    }

    fn adjacency(&self) -> Result<Vec<u64>> {
        if self.n > MAX_VERTICES {
            return Err(Error::BudgetExceeded(format!(
                "graph has {} vertices, exact search supports {MAX_VERTICES}",
                self.n
            )));
        }
        let mut adj = vec![0u64; self.n];
        for &(v, w) in &self.edges {
            adj[v] |= 1 << w;
            adj[w] |= 1 << v;
        }
        Ok(adj)
    }

    pub fn to_json(&self, parts: Option<&VertexPartition>) -> serde_json::Value {
        let identity = self.order.iter().copied().eq(0..self.n);
        let file = GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(v, w)| [v, w]).collect(),
            order: (!identity).then(|| self.order.clone()),
            parts: parts.map(|p| p.parts.clone()),
        };
        serde_json::to_value(file).expect("graph serializes")
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(n={}, edges=[", self.n)?;
        for (i, (v, w)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}-{w}")?;
        }
        write!(f, "])")
    }
}

/// Parses a graph file: JSON `{n, edges, order?, parts?}` or a DIMACS edge
/// list (`p edge n m`, `e v w`, 1-indexed).
pub fn parse_graph(text: &str) -> Result<(Graph, Option<VertexPartition>)> {
    if text.trim_start().starts_with('{') {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
        let edges: Vec<(usize, usize)> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        let g = match file.order {
            Some(order) => Graph::with_order(file.n, &edges, order)?,
            None => Graph::new(file.n, &edges)?,
        };
        let parts = match file.parts {
            Some(parts) => {
                let p = VertexPartition { parts };
                p.validate(&g)?;
                Some(p)
            }
            None => None,
        };
        Ok((g, parts))
    } else {
        parse_dimacs(text).map(|g| (g, None))
    }
}

fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let bad = || Error::Parse(format!("DIMACS line {}: {line:?}", lineno + 1));
        match it.next() {
            None | Some("c") => {}
            Some("p") => {
                let _kind = it.next().ok_or_else(bad)?;
                n = Some(it.next().and_then(|s| s.parse::<usize>().ok()).ok_or_else(bad)?);
            }
            Some("e") => {
                let v: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                let w: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                if v == 0 || w == 0 {
                    return Err(bad());
                }
                edges.push((v - 1, w - 1));
            }
            Some(_) => return Err(bad()),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("DIMACS input has no 'p' line".into()))?;
    Graph::new(n, &edges)
}

impl VertexPartition {
    /// Checks that the parts are independent, disjoint and cover every
    /// vertex. Two or three parts are allowed; parts may be empty.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if !(2..=3).contains(&self.parts.len()) {
            return Err(Error::InvalidPartition(format!(
                "expected 2 or 3 parts, got {}",
                self.parts.len()
            )));
        }
        let mut owner = vec![usize::MAX; g.n()];
        for (i, part) in self.parts.iter().enumerate() {
            for &v in part {
                if v >= g.n() {
                    return Err(Error::InvalidPartition(format!("vertex {v} out of range")));
                }
                if owner[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} in two parts")));
                }
                owner[v] = i;
            }
        }
        if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} is in no part")));
        }
        for &(v, w) in g.edges() {
            if owner[v] == owner[w] {
                return Err(Error::InvalidPartition(format!(
                    "edge ({v},{w}) inside part {}",
                    owner[v]
                )));
            }
        }
        Ok(())
    }

    /// Index of the part holding `v`.
    pub fn part_of(&self, v: usize) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&v))
    }

    /// Pads to three parts with empty sets.
    pub fn as_three(&self) -> VertexPartition {
        let mut parts = self.parts.clone();
        parts.resize(3, Vec::new());
        VertexPartition { parts }
    }
}

/// Finds a partition into `parts` independent sets by backtracking colouring
/// in vertex-index order; the first colouring found is returned, so the
/// result is deterministic.
pub fn find_partition(g: &Graph, parts: usize) -> Result<VertexPartition> {
    if !(2..=3).contains(&parts) {
        return Err(Error::InvalidPartition(format!("expected 2 or 3 parts, got {parts}")));
    }
    let adj = g.adjacency()?;
    let mut colour = vec![usize::MAX; g.n()];
    fn go(v: usize, adj: &[u64], colour: &mut [usize], k: usize, used: usize) -> bool {
        if v == adj.len() {
            return true;
        }
        // a fresh colour is interchangeable with any other fresh colour
        for c in 0..k.min(used + 1) {
            let clash = (0..v).any(|u| adj[v] >> u & 1 == 1 && colour[u] == c);
            if !clash {
                colour[v] = c;
                if go(v + 1, adj, colour, k, used.max(c + 1)) {
                    return true;
                }
            }
        }
        colour[v] = usize::MAX;
        false
    }
    if !go(0, &adj, &mut colour, parts, 0) {
        return Err(Error::NotPartite(parts));
    }
    let mut out = vec![Vec::new(); parts];
    for (v, &c) in colour.iter().enumerate() {
        out[c].push(v);
    }
    Ok(VertexPartition { parts: out })
}

/// Maximum independent set by branch and bound: `(size, witness)`.
pub fn max_independent_set(g: &Graph) -> Result<(usize, Vec<usize>)> {
    let adj = g.adjacency()?;
    fn go(cand: u64, chosen: u64, adj: &[u64], best: &mut u64) {
        if chosen.count_ones() + cand.count_ones() <= best.count_ones() {
            return;
        }
        if cand == 0 {
            *best = chosen;
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        go(cand & !bit & !adj[v], chosen | bit, adj, best);
        if adj[v] & cand != 0 {
            go(cand & !bit, chosen, adj, best);
        }
    }
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let mut best = 0u64;
    go(all, 0, &adj, &mut best);
    let witness: Vec<usize> = (0..g.n()).filter(|v| best >> v & 1 == 1).collect();
    Ok((witness.len(), witness))
}

/// Number of independent sets, the empty set included.
pub fn count_independent_sets(g: &Graph) -> Result<BigUint> {
    let adj = g.adjacency()?;
    fn go(cand: u64, adj: &[u64], memo: &mut HashMap<u64, BigUint>) -> BigUint {
        if cand == 0 {
            return BigUint::one();
        }
        if let Some(c) = memo.get(&cand) {
            return c.clone();
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let r = go(cand & !bit, adj, memo) + go(cand & !bit & !adj[v], adj, memo);
        memo.insert(cand, r.clone());
        r
    }
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    Ok(go(all, &adj, &mut HashMap::new()))
}

/// `z[t]` = number of vertex subsets containing exactly `m - t` edges.
pub fn subsets_by_edges_within(g: &Graph) -> Result<Vec<BigUint>> {
    if g.n() > 30 {
        return Err(Error::BudgetExceeded(format!("2^{} vertex subsets", g.n())));
    }
    let m = g.m();
    let mut z = vec![BigUint::zero(); m + 1];
    for mask in 0u64..1 << g.n() {
        z[m - g.edges_within(mask)] += 1u32;
    }
    Ok(z)
}

/// Graph families understood by [`generate`]; also parseable from strings
/// such as `path:3`, `edge`, `random:5:0.5:1`.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphKind {
    Path(usize),
    Cycle(usize),
    Complete(usize),
    Empty(usize),
    Random { n: usize, p: f64, seed: u64 },
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad graph spec {s:?}")))
        };
        match parts[0] {
            "edge" if parts.len() == 1 => Ok(GraphKind::Path(2)),
            "path" => Ok(GraphKind::Path(num(1)?)),
            "cycle" => Ok(GraphKind::Cycle(num(1)?)),
            "complete" => Ok(GraphKind::Complete(num(1)?)),
            "empty" => Ok(GraphKind::Empty(num(1)?)),
            "random" => {
                let p: f64 = parts
                    .get(2)
                    .and_then(|x| x.parse().ok())
                    .filter(|p: &f64| (0.0..=1.0).contains(p))
                    .ok_or_else(|| Error::Parse(format!("bad edge probability in {s:?}")))?;
                let seed = parts.get(3).map_or(Ok(0), |x| {
                    x.parse().map_err(|_| Error::Parse(format!("bad seed in {s:?}")))
                })?;
                Ok(GraphKind::Random { n: num(1)?, p, seed })
            }
            _ => Err(Error::Parse(format!("unknown graph spec {s:?}"))),
        }
    }
}

pub fn generate(kind: &GraphKind) -> Graph {
    let (n, edges): (usize, Vec<(usize, usize)>) = match *kind {
        GraphKind::Path(n) => (n, (1..n).map(|i| (i - 1, i)).collect()),
        GraphKind::Cycle(n) => {
            let mut e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
            if n >= 3 {
                e.push((0, n - 1));
            }
            (n, e)
        }
        GraphKind::Complete(n) => (
            n,
            (0..n).flat_map(|v| (v + 1..n).map(move |w| (v, w))).collect(),
        ),
        GraphKind::Empty(n) => (n, Vec::new()),
        GraphKind::Random { n, p, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut e = Vec::new();
            for v in 0..n {
                for w in v + 1..n {
                    if rng.gen_bool(p) {
                        e.push((v, w));
                    }
                }
            }
            (n, e)
        }
    };
    Graph::new(n, &edges).expect("generated graphs are simple")
}

/// Every labelled simple graph on `n` vertices (`2^(n(n-1)/2)` of them).
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|v| (v + 1..n).map(move |w| (v, w))).collect();
    assert!(pairs.len() < 32, "too many graphs to list");
    (0u32..1 << pairs.len())
        .map(|mask| {
            let e: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            Graph::new(n, &e).expect("simple")
        })
        .collect()
}
