//! Reductions from independent-set problems to L-free subset problems.

mod counting;
mod numeric;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::eqmodel::LinearEquation;
use crate::error::{Error, Result};
use crate::gadgets::{self, BuildOptions, ExtendResult, GadgetKind, GadgetSet};
use crate::graphs::{self, find_partition, Graph};
use crate::json;
use crate::oracle::{self, SearchConfig};

pub use counting::{recover_count, recover_count_inhom, recover_count_l3, recover_count_l4, CountLedger, RecoveryPath};
pub use numeric::{digit_extract, forward_eval, smallest_exponent, vandermonde_solve};

/// `(A, |A_E| + k)`: `A` has a free subset of that size iff the graph has an
/// independent set of size `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionInstance {
    pub set: GadgetSet,
    pub k: usize,
    pub threshold: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DecisionCheck {
    pub max_independent: usize,
    pub max_free: usize,
    pub graph_answer: bool,
    pub set_answer: bool,
}

impl DecisionCheck {
    pub fn agrees(&self) -> bool {
        self.graph_answer == self.set_answer
    }
}

pub fn reduce_decision(eq: &LinearEquation, g: &Graph, k: usize, opts: BuildOptions) -> Result<DecisionInstance> {
    if k > g.n() {
        return Err(Error::Precondition(format!("k = {k} exceeds the {} vertices", g.n())));
    }
    let set = if eq.is_homogeneous() {
        gadgets::build_homogeneous(eq, g, opts)?
    } else {
        let parts = find_partition(g, 3)?;
        gadgets::build_inhomogeneous(eq, g, Some(&parts), &[], opts)?
    };
    let threshold = set.a_e().len() + k;
    Ok(DecisionInstance { set, k, threshold })
}

/// Answers both sides with the exact oracles.
pub fn verify_decision(inst: &DecisionInstance, cfg: &SearchConfig) -> Result<DecisionCheck> {
    let (max_independent, _) = graphs::max_independent_set(&inst.set.graph)?;
    let (max_free, _) = oracle::max_free_subset(&inst.set.equation, &inst.set.elements, cfg)?;
    Ok(DecisionCheck {
        max_independent,
        max_free,
        graph_answer: max_independent >= inst.k,
        set_answer: max_free >= inst.threshold,
    })
}

/// Turns a free subset `b` of a gadget into a maximal free subset that
/// contains every edge label and is no smaller. A missing edge label is
/// added after dropping the endpoint with the smaller label if both
/// endpoints are present; the rest is filled greedily in ascending order.
pub fn repair_to_edge_superset(gs: &GadgetSet, b: &[i64], cfg: &SearchConfig) -> Result<Vec<i64>> {
    if !matches!(
        gs.kind,
        GadgetKind::Homogeneous | GadgetKind::HomogeneousSef | GadgetKind::Inhomogeneous
    ) {
        return Err(Error::Precondition(format!("repair is not defined for {} gadgets", gs.kind.name())));
    }
    let h = oracle::build_conflict_hypergraph(&gs.equation, &gs.elements, cfg)?;
    if let Some(x) = b.iter().find(|x| gs.elements.binary_search(x).is_err()) {
        return Err(Error::Precondition(format!("{x} is not in the gadget")));
    }
    if !h.is_independent(b) {
        return Err(Error::Precondition("the subset is not free".into()));
    }
    let xs = gs.vertex_labels();
    let mut cur: BTreeSet<i64> = b.iter().copied().collect();
    let snapshot = |s: &BTreeSet<i64>| s.iter().copied().collect::<Vec<_>>();
    for (e, &(v, w)) in gs.graph.edges().iter().enumerate() {
        for y in gs.edge_labels(e) {
            if cur.contains(&y) {
                continue;
            }
            if cur.contains(&xs[v]) && cur.contains(&xs[w]) {
                cur.remove(&xs[v].min(xs[w]));
            }
            cur.insert(y);
            if !h.is_independent(&snapshot(&cur)) {
                return Err(Error::Invariant(format!("adding edge label {y} broke freeness")));
            }
        }
    }
    for &a in &gs.elements {
        if !cur.contains(&a) {
            cur.insert(a);
            if !h.is_independent(&snapshot(&cur)) {
                cur.remove(&a);
            }
        }
    }
    Ok(snapshot(&cur))
}

/// `1 + eps / (6(l - 2) + 1)`.
pub fn ptas_alpha(l: usize, eps: &BigRational) -> Result<BigRational> {
    if l < 3 {
        return Err(Error::TooFewVariables { need: 3, got: l });
    }
    if eps.is_negative() {
        return Err(Error::Precondition("epsilon must be nonnegative".into()));
    }
    Ok(BigRational::one() + eps / BigRational::from_integer(BigInt::from(6 * (l - 2) + 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EquivalenceCheck {
    /// `A` has a free subset of size `k`.
    pub source: bool,
    /// `B` has a free subset of size `ceil(eps |B|)`.
    pub target: bool,
}

/// An instance of "is there a free subset of at least `eps |B|` elements".
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonInstance {
    pub a: Vec<i64>,
    pub k: usize,
    /// After the shift, if one was applied.
    pub s: Vec<i64>,
    pub s_prime: Vec<i64>,
    pub shift: Option<i64>,
    pub epsilon: BigRational,
    pub epsilon_prime: BigRational,
    pub r: usize,
    pub t: usize,
    pub k_star: usize,
    pub a_star: usize,
    pub b: Vec<i64>,
    /// `ceil(eps |B|)`, which equals `k* + t`.
    pub threshold: usize,
    pub extension: ExtendResult,
    pub equivalence: Option<EquivalenceCheck>,
}

impl EpsilonInstance {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a": self.a,
            "k": self.k,
            "s": self.s,
            "s_prime": self.s_prime,
            "shift": self.shift,
            "epsilon": json::rational(&self.epsilon),
            "epsilon_prime": json::rational(&self.epsilon_prime),
            "r": self.r,
            "t": self.t,
            "k_star": self.k_star,
            "a_star": self.a_star,
            "b": self.b,
            "threshold": self.threshold,
            "extension": self.extension,
            "equivalence": self.equivalence,
        })
    }
}

fn ceil_usize(x: &BigRational) -> Result<usize> {
    let c = x.ceil().to_integer();
    if c.is_negative() {
        return Ok(0);
    }
    c.to_usize().ok_or_else(|| Error::Overflow(format!("{c} does not fit")))
}

fn rat(x: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `r`, `k*`, `a*` and `t` for the given sizes.
pub fn epsilon_parameters(
    a: usize,
    k: usize,
    s: usize,
    s_prime: usize,
    eps: &BigRational,
) -> Result<(usize, usize, usize, usize)> {
    let eps_prime = BigRational::new(BigInt::from(s_prime), BigInt::from(s.max(1)));
    if s == 0 || eps_prime >= *eps {
        return Err(Error::Precondition(format!("need |S'|/|S| = {eps_prime} < epsilon = {eps}")));
    }
    if *eps >= BigRational::one() {
        return Err(Error::Precondition("epsilon must be below 1".into()));
    }
    let r = ceil_usize(&((rat(k) - eps * rat(a)) / ((eps - &eps_prime) * rat(s))))?;
    let k_star = k + r * s_prime;
    let a_star = a + r * s;
    let t = ceil_usize(&((eps * rat(a_star) - rat(k_star)) / (BigRational::one() - eps)))?;
    Ok((r, k_star, a_star, t))
}

/// Builds `B` from `(A, k)` so that `B` has a free subset of `ceil(eps |B|)`
/// elements iff `A` has one of `k` elements. `s_prime` must be a largest
/// free subset of `s`; for homogeneous equations whose coefficients sum to
/// zero both are first shifted away from every proper sub-equation.
#[allow(clippy::too_many_arguments)]
pub fn reduce_epsilon(
    eq: &LinearEquation,
    a: &[i64],
    k: usize,
    s: &[i64],
    s_prime: &[i64],
    eps: &BigRational,
    opts: BuildOptions,
    cfg: &SearchConfig,
) -> Result<EpsilonInstance> {
    let a = oracle::normalize_set(a);
    let mut s = oracle::normalize_set(s);
    let mut s_prime = oracle::normalize_set(s_prime);
    if k > a.len() {
        return Err(Error::Precondition(format!("k = {k} exceeds |A| = {}", a.len())));
    }
    let (r, k_star, a_star, t) = epsilon_parameters(a.len(), k, s.len(), s_prime.len(), eps)?;
    if !oracle::is_free(eq, &s_prime, cfg)? {
        return Err(Error::Precondition("S' is not free".into()));
    }
    let (best, _) = oracle::max_free_subset(eq, &s, cfg)?;
    if best != s_prime.len() {
        return Err(Error::Precondition(format!(
            "S' has {} elements but the largest free subset of S has {best}",
            s_prime.len()
        )));
    }
    let mut shift = None;
    if eq.is_homogeneous() && eq.is_translation_invariant() {
        let mut banned = gadgets::shift_exclusions(eq, &s_prime, cfg)?;
        banned.extend(s.iter().map(|x| -x));
        let alpha = (1..).find(|x| !banned.contains(x)).expect("finite exclusions");
        s = s.iter().map(|x| x + alpha).collect();
        s_prime = s_prime.iter().map(|x| x + alpha).collect();
        shift = Some(alpha);
    }
    let extension = gadgets::extend(eq, &a, &s, &s_prime, r, t, opts)?;
    let b = extension.b.clone();
    let threshold = ceil_usize(&(eps * rat(b.len())))?;
    if b.len() != a_star + t || threshold != k_star + t {
        return Err(Error::Invariant(format!(
            "|B| = {}, ceil(eps |B|) = {threshold}, expected {} and {}",
            b.len(),
            a_star + t,
            k_star + t
        )));
    }
    let equivalence = if b.len() <= 22 {
        let (fa, _) = oracle::max_free_subset(eq, &a, cfg)?;
        let (fb, _) = oracle::max_free_subset(eq, &b, cfg)?;
        Some(EquivalenceCheck {
            source: fa >= k,
            target: fb >= threshold,
        })
    } else {
        None
    };
    let eps_prime = BigRational::new(BigInt::from(s_prime.len()), BigInt::from(s.len()));
    Ok(EpsilonInstance {
        a,
        k,
        s,
        s_prime,
        shift,
        epsilon: eps.clone(),
        epsilon_prime: eps_prime,
        r,
        t,
        k_star,
        a_star,
        b,
        threshold,
        extension,
        equivalence,
    })
}
