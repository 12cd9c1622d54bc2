//! Brute-force ground truth for L-freeness.
//!
//! Solutions are enumerated by fixing the first `l - 1` coordinates and
//! solving for the last one, so a set `A` costs `|A|^(l-1)` probes. Freeness
//! only depends on which values co-occur in a solution, so the counting and
//! maximisation routines work on the conflict hypergraph of minimal solution
//! supports.

mod search;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::eqmodel::{sub_equations, trivial_by_value, LinearEquation};
use crate::error::{Error, Result};
use crate::par;

pub use search::{
    count_free_by_groups, count_free_by_layer, count_free_subsets, count_free_subsets_enumerate,
    max_free_subset,
};

/// Limits for exact search. Exceeding a limit is an error, never a silent
/// truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Maximum number of tuple evaluations (or subset checks) per call.
    pub tuple_budget: u64,
    /// Maximum number of branch nodes in recursive searches.
    pub node_budget: u64,
    /// Run data-parallel loops on the rayon pool when compiled in.
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tuple_budget: 100_000_000,
            node_budget: 50_000_000,
            parallel: par::available(),
        }
    }
}

impl SearchConfig {
    pub fn sequential() -> Self {
        SearchConfig {
            parallel: false,
            ..Default::default()
        }
    }

    pub fn with_budget(tuple_budget: u64) -> Self {
        SearchConfig {
            tuple_budget,
            ..Default::default()
        }
    }
}

/// A solution tuple found inside a set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub tuple: Vec<i64>,
    /// Distinct values of the tuple, ascending.
    pub positions_support: Vec<i64>,
    pub trivial: bool,
}

impl SolutionRecord {
    fn new(eq: &LinearEquation, tuple: Vec<i64>) -> Self {
        let positions_support: BTreeSet<i64> = tuple.iter().copied().collect();
        let trivial = trivial_by_value(eq.coefficients(), &tuple);
        SolutionRecord {
            tuple,
            positions_support: positions_support.into_iter().collect(),
            trivial,
        }
    }
}

/// Sorted, deduplicated copy of a set.
pub fn normalize_set(set: &[i64]) -> Vec<i64> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn probe_cost(n: usize, arity: usize) -> u64 {
    (n as u64).saturating_pow(arity.saturating_sub(1) as u32)
}

fn check_budget(n: usize, arity: usize, cfg: &SearchConfig) -> Result<()> {
    let cost = probe_cost(n, arity);
    if cost > cfg.tuple_budget {
        return Err(Error::BudgetExceeded(format!(
            "{n}^{} = {cost} tuple probes exceeds budget {}",
            arity.saturating_sub(1),
            cfg.tuple_budget
        )));
    }
    Ok(())
}

/// Visits every solution of `eq` in `set^l` whose first coordinate is
/// `set[first]`, in lexicographic order. Stops early when `visit` returns
/// true, and reports whether it stopped.
fn scan_from(
    eq: &LinearEquation,
    set: &[i64],
    first: usize,
    visit: &mut dyn FnMut(&[i64]) -> bool,
) -> bool {
    let c = eq.coefficients();
    let l = c.len();
    let k = eq.constant() as i128;
    let last = c[l - 1] as i128;
    let mut idx = vec![0usize; l.saturating_sub(1)];
    let mut tuple = vec![0i64; l];
    if l == 1 {
        if first != 0 {
            return false;
        }
        if k % last == 0 {
            let x = k / last;
            if let Ok(x) = i64::try_from(x) {
                if set.binary_search(&x).is_ok() {
                    tuple[0] = x;
                    return visit(&tuple);
                }
            }
        }
        return false;
    }
    idx[0] = first;
    loop {
        let mut partial: i128 = 0;
        for (p, &i) in idx.iter().enumerate() {
            tuple[p] = set[i];
            partial += c[p] as i128 * set[i] as i128;
        }
        let rest = k - partial;
        if rest % last == 0 {
            if let Ok(x) = i64::try_from(rest / last) {
                if set.binary_search(&x).is_ok() {
                    tuple[l - 1] = x;
                    if visit(&tuple) {
                        return true;
                    }
                }
            }
        }
        // odometer over positions 1..l-1
        let mut p = idx.len();
        loop {
            if p == 1 {
                return false;
            }
            p -= 1;
            idx[p] += 1;
            if idx[p] < set.len() {
                break;
            }
            idx[p] = 0;
        }
    }
}

/// All solutions (trivial or not) in `set^l`, lexicographically ordered.
pub fn enumerate_solutions(
    eq: &LinearEquation,
    set: &[i64],
    cfg: &SearchConfig,
) -> Result<Vec<SolutionRecord>> {
    let set = normalize_set(set);
    if set.is_empty() {
        return Ok(Vec::new());
    }
    check_budget(set.len(), eq.arity(), cfg)?;
    let outer = if eq.arity() == 1 { 1 } else { set.len() };
    let parts = par::map_range(cfg.parallel, 0..outer, |first| {
        let mut found = Vec::new();
        scan_from(eq, &set, first, &mut |t| {
            found.push(SolutionRecord::new(eq, t.to_vec()));
            false
        });
        found
    });
    Ok(parts.into_iter().flatten().collect())
}

/// Exactly the non-trivial solutions in `set^l`, lexicographically ordered.
pub fn enumerate_nontrivial_solutions(
    eq: &LinearEquation,
    set: &[i64],
    cfg: &SearchConfig,
) -> Result<Vec<SolutionRecord>> {
    Ok(enumerate_solutions(eq, set, cfg)?
        .into_iter()
        .filter(|s| !s.trivial)
        .collect())
}

fn has_nontrivial(eq: &LinearEquation, set: &[i64], cfg: &SearchConfig) -> Result<bool> {
    if set.is_empty() {
        return Ok(false);
    }
    check_budget(set.len(), eq.arity(), cfg)?;
    let outer = if eq.arity() == 1 { 1 } else { set.len() };
    let coefs = eq.coefficients();
    Ok(par::any_in_range(cfg.parallel, 0..outer, |first| {
        scan_from(eq, set, first, &mut |t| !trivial_by_value(coefs, t))
    }))
}

/// Whether `set` contains no non-trivial solution of `eq`.
pub fn is_free(eq: &LinearEquation, set: &[i64], cfg: &SearchConfig) -> Result<bool> {
    let set = normalize_set(set);
    Ok(!has_nontrivial(eq, &set, cfg)?)
}

/// Whether `set` has no non-trivial solution to any proper sub-equation of
/// the homogeneous equation `eq`.
pub fn is_proper_subequation_free(
    eq: &LinearEquation,
    set: &[i64],
    cfg: &SearchConfig,
) -> Result<bool> {
    if !eq.is_homogeneous() {
        return Err(Error::Inhomogeneous(eq.constant()));
    }
    let set = normalize_set(set);
    for sub in sub_equations(eq) {
        if has_nontrivial(&sub.equation, &set, cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Free for `eq` and all of its proper sub-equations.
pub fn is_subequation_free(eq: &LinearEquation, set: &[i64], cfg: &SearchConfig) -> Result<bool> {
    Ok(is_free(eq, set, cfg)? && is_proper_subequation_free(eq, set, cfg)?)
}

/// Non-trivial solutions in `set` that use at least one value outside `inner`.
pub fn solutions_outside(
    eq: &LinearEquation,
    set: &[i64],
    inner: &[i64],
    cfg: &SearchConfig,
) -> Result<Vec<SolutionRecord>> {
    let inner = normalize_set(inner);
    Ok(enumerate_nontrivial_solutions(eq, set, cfg)?
        .into_iter()
        .filter(|s| s.positions_support.iter().any(|x| inner.binary_search(x).is_err()))
        .collect())
}

/// The set `A` together with the minimal supports of non-trivial solutions.
/// A subset of `A` is L-free iff it contains no hyperedge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictHypergraph {
    pub ground: Vec<i64>,
    pub hyperedges: Vec<Vec<i64>>,
}

impl ConflictHypergraph {
    /// Whether `subset` (which must lie in the ground set) avoids every
    /// hyperedge.
    pub fn is_independent(&self, subset: &[i64]) -> bool {
        let s = normalize_set(subset);
        !self
            .hyperedges
            .iter()
            .any(|h| h.iter().all(|x| s.binary_search(x).is_ok()))
    }
}

pub fn build_conflict_hypergraph(
    eq: &LinearEquation,
    set: &[i64],
    cfg: &SearchConfig,
) -> Result<ConflictHypergraph> {
    let ground = normalize_set(set);
    let supports: BTreeSet<Vec<i64>> = enumerate_nontrivial_solutions(eq, &ground, cfg)?
        .into_iter()
        .map(|s| s.positions_support)
        .collect();
    let mut by_size: Vec<Vec<i64>> = supports.into_iter().collect();
    by_size.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut hyperedges: Vec<Vec<i64>> = Vec::new();
    for h in by_size {
        let dominated = hyperedges
            .iter()
            .any(|g| g.iter().all(|x| h.binary_search(x).is_ok()));
        if !dominated {
            hyperedges.push(h);
        }
    }
    Ok(ConflictHypergraph { ground, hyperedges })
}

/// Convenience: `count_free_subsets` as a `BigUint`.
pub fn count(eq: &LinearEquation, set: &[i64]) -> Result<BigUint> {
    count_free_subsets(eq, set, &SearchConfig::default())
}
