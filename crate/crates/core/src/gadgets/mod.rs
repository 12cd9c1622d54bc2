//! Graph-to-set gadgets.
//!
//! Every gadget maps a graph to a finite set of integers whose non-trivial
//! solutions are prescribed: one solution per edge (plus the extra families a
//! counting gadget adds), and nothing else. Labels are found by the greedy
//! assignment in [`crate::labeler`] after all forbidden linear combinations
//! have been reduced to the free labels.

mod counting;
mod extend;
mod homogeneous;
mod inhomogeneous;
mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::eqmodel::{LinearEquation, StandardForm};
use crate::error::{Error, Result};
use crate::graphs::{Graph, VertexPartition};
use crate::labeler::{ConstraintSystem, IntForm, Reduced, Reducer, Var};
use crate::par;

pub use counting::{build_counting_inhom, build_counting_l3, build_counting_l4, l3_multiplier_bound};
pub use extend::{extend, shift_exclusions, shift_to_sef, ExtendResult, MapKind};
pub use homogeneous::{build_homogeneous, build_homogeneous_sef, is_special};
pub use inhomogeneous::{bezout, build_inhomogeneous};
pub use verify::{verify_gadget, ConditionResult, VerificationReport};

/// What an element of a gadget stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    VertexLabel { vertex: usize },
    /// Index 0 is the dependent label, 1.. the free ones.
    EdgeLabel { edge: usize, index: usize },
    EdgeLabelCopy { edge: usize, index: usize, copy: usize },
    /// Counting labels attached to an endpoint of an edge; `index` runs 1..=r.
    ULabel { vertex: usize, edge: usize, index: usize },
    PadLabel { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    Homogeneous,
    HomogeneousSef,
    Inhomogeneous,
    CountingL3,
    CountingL4,
    CountingInhom,
}

impl GadgetKind {
    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Homogeneous => "hom",
            GadgetKind::HomogeneousSef => "hom-sef",
            GadgetKind::Inhomogeneous => "inhom",
            GadgetKind::CountingL3 => "count3",
            GadgetKind::CountingL4 => "count4",
            GadgetKind::CountingInhom => "count-inhom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionFamily {
    /// The solution carried by an edge.
    Edge,
    /// A counting solution `(u_v, u_w, rest of the edge)`.
    U,
    /// A solution across two copies of one edge (special four-variable case).
    CrossCopy,
}

/// A solution the construction is supposed to contain. `tuple` is ordered
/// like the coefficients of the gadget's equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryItem {
    pub family: SolutionFamily,
    pub edge: usize,
    pub tuple: Vec<i64>,
}

impl InventoryItem {
    pub fn support(&self) -> Vec<i64> {
        let mut s = self.tuple.clone();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// Positivity windows for mixed-sign inhomogeneous equations. Rationals are
/// kept as strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowParams {
    pub radius: i128,
    pub reach: String,
    pub threshold: i128,
    pub centres: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetParams {
    /// Number of counting copies per edge.
    pub r: Option<usize>,
    /// Labels (free and dependent) in the underlying system.
    pub label_count: usize,
    /// Distinct nonzero constraints.
    pub constraint_count: usize,
    /// Concrete upper bound on `max |a|`.
    pub bound: Option<i128>,
    pub scale: Option<i64>,
    pub max_multiplier: Option<i64>,
    pub multiplier_bound: Option<i64>,
    /// `N_{e,i}` in edge-major order.
    pub multipliers: Vec<i64>,
    pub special_case: bool,
    /// Reduced combinations that vanished and were skipped (special case).
    pub special_skips: usize,
    pub modulus: Option<i64>,
    pub bezout: Option<Vec<i64>>,
    pub window: Option<WindowParams>,
    /// For reordered equations: position `i` of the working equation is
    /// position `order[i]` of the input.
    pub equation_order: Option<Vec<usize>>,
    pub soundness_checks: usize,
}

/// A constructed gadget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GadgetSet {
    pub kind: GadgetKind,
    pub equation: LinearEquation,
    pub standard_form: Option<StandardForm>,
    pub graph: Graph,
    pub partition: Option<VertexPartition>,
    /// Ascending, distinct.
    pub elements: Vec<i64>,
    pub roles: BTreeMap<i64, Role>,
    pub inventory: Vec<InventoryItem>,
    pub s_prime: Vec<i64>,
    pub params: GadgetParams,
}

impl GadgetSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn label(&self, role: Role) -> Option<i64> {
        self.roles.iter().find(|(_, r)| **r == role).map(|(&a, _)| a)
    }

    fn collect(&self, pick: impl Fn(&Role) -> bool) -> Vec<i64> {
        self.roles
            .iter()
            .filter(|(_, r)| pick(r))
            .map(|(&a, _)| a)
            .collect()
    }

    /// Vertex labels indexed by vertex.
    pub fn vertex_labels(&self) -> Vec<i64> {
        let mut out = vec![0; self.graph.n()];
        for (&a, r) in &self.roles {
            if let Role::VertexLabel { vertex } = r {
                out[*vertex] = a;
            }
        }
        out
    }

    /// All labels of edge `e` (every copy), ordered by role.
    pub fn edge_labels(&self, e: usize) -> Vec<i64> {
        let mut xs: Vec<(Role, i64)> = self
            .roles
            .iter()
            .filter(|(_, r)| {
                matches!(r, Role::EdgeLabel { edge, .. } | Role::EdgeLabelCopy { edge, .. } if *edge == e)
            })
            .map(|(&a, &r)| (r, a))
            .collect();
        xs.sort();
        xs.into_iter().map(|(_, a)| a).collect()
    }

    pub fn a_v(&self) -> Vec<i64> {
        self.collect(|r| matches!(r, Role::VertexLabel { .. }))
    }

    pub fn a_e(&self) -> Vec<i64> {
        self.collect(|r| matches!(r, Role::EdgeLabel { .. } | Role::EdgeLabelCopy { .. }))
    }

    pub fn u_labels(&self) -> Vec<i64> {
        self.collect(|r| matches!(r, Role::ULabel { .. }))
    }

    /// `A_V ∪ A_E`.
    pub fn base(&self) -> Vec<i64> {
        self.collect(|r| !matches!(r, Role::ULabel { .. } | Role::PadLabel { .. }))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let roles: Vec<serde_json::Value> = self
            .roles
            .iter()
            .map(|(&a, r)| {
                let mut v = serde_json::to_value(r).expect("role serializes");
                v["value"] = serde_json::Value::from(a);
                v
            })
            .collect();
        let v = serde_json::json!({
            "kind": self.kind.name(),
            "equation": self.equation,
            "standard_form": self.standard_form,
            "graph": self.graph.to_json(self.partition.as_ref()),
            "elements": self.elements,
            "roles": roles,
            "inventory": self.inventory,
            "s_prime": self.s_prime,
            "params": self.params,
        });
        crate::json::portable(v)
    }
}

/// Switches for gadget construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub parallel: bool,
    /// Re-evaluate every forbidden combination against the final labels.
    pub soundness: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            parallel: par::available(),
            soundness: true,
        }
    }
}

impl BuildOptions {
    pub fn sequential() -> Self {
        BuildOptions {
            parallel: false,
            ..Default::default()
        }
    }
}

/// One letter of a sequence alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sym {
    Var(Var),
    Const(i128),
}

/// `sum coefs[p] * seq[p] + constant` with like variables merged and zero
/// terms dropped.
pub(crate) fn combine(alphabet: &[Sym], coefs: &[i64], seq: &[usize], constant: i128) -> (Vec<(Var, i128)>, i128) {
    let mut terms: Vec<(Var, i128)> = Vec::with_capacity(seq.len());
    let mut k = constant;
    for (&c, &i) in coefs.iter().zip(seq) {
        match alphabet[i] {
            Sym::Var(v) => match terms.iter_mut().find(|(u, _)| *u == v) {
                Some(slot) => slot.1 += c as i128,
                None => terms.push((v, c as i128)),
            },
            Sym::Const(x) => k += c as i128 * x,
        }
    }
    terms.retain(|&(_, c)| c != 0);
    (terms, k)
}

/// Calls `f` on every sequence in `0..alphabet` of length `k`, in parallel
/// over the first letter, and concatenates what it pushes.
pub(crate) fn sweep<T, F>(parallel: bool, alphabet: usize, k: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[usize], &mut Vec<T>) -> Result<()> + Sync + Send,
{
    if k == 0 || alphabet == 0 {
        return Ok(Vec::new());
    }
    let parts = par::map_range(parallel, 0..alphabet, |first| -> Result<Vec<T>> {
        let mut out = Vec::new();
        let mut seq = vec![0usize; k];
        seq[0] = first;
        loop {
            f(&seq, &mut out)?;
            let mut i = k;
            loop {
                if i == 1 {
                    return Ok(out);
                }
                i -= 1;
                seq[i] += 1;
                if seq[i] < alphabet {
                    break;
                }
                seq[i] = 0;
            }
        }
    });
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

type SkipFn<'a> = dyn Fn(&[usize], &[(Var, i128)], i128) -> bool + Sync + 'a;

/// A family of forbidden combinations: all sequences of length `k` over
/// `alphabet`, weighted by `coefs`, shifted by `constant`, minus the ones
/// `skip` rejects.
pub(crate) struct Family<'a> {
    pub alphabet: &'a [Sym],
    pub coefs: &'a [i64],
    pub constant: i128,
    pub skip: &'a SkipFn<'a>,
}

impl Family<'_> {
    fn candidate(&self, seq: &[usize]) -> Option<(Vec<(Var, i128)>, i128)> {
        let (terms, k) = combine(self.alphabet, self.coefs, seq, self.constant);
        if (self.skip)(seq, &terms, k) {
            None
        } else {
            Some((terms, k))
        }
    }

    /// Reduces every candidate. A combination that vanishes identically is
    /// passed to `on_zero`, which either tolerates it (`Ok`) or fails.
    pub fn forms(
        &self,
        parallel: bool,
        reducer: Reducer<'_>,
        on_zero: &(dyn Fn(&[usize]) -> Result<()> + Sync),
    ) -> Result<(Vec<IntForm>, usize)> {
        let out = sweep(parallel, self.alphabet.len(), self.coefs.len(), |seq, out| {
            if let Some((terms, k)) = self.candidate(seq) {
                match reducer.reduce(&terms, k)? {
                    Reduced::Form(f) => out.push(Some(f)),
                    Reduced::Constant => {}
                    Reduced::Zero => {
                        on_zero(seq)?;
                        out.push(None);
                    }
                }
            }
            Ok(())
        })?;
        let zeros = out.iter().filter(|f| f.is_none()).count();
        Ok((out.into_iter().flatten().collect(), zeros))
    }

    /// Checks every candidate against concrete values: the original
    /// combination must be nonzero unless its reduction vanished, and must
    /// agree with its reduction up to the recorded scale.
    pub fn soundness(&self, parallel: bool, system: &ConstraintSystem, values: &[i128]) -> Result<usize> {
        let reducer = system.reducer();
        let d = system.denominator();
        let checks = sweep(parallel, self.alphabet.len(), self.coefs.len(), |seq, out| {
            let Some((terms, k)) = self.candidate(seq) else {
                return Ok(());
            };
            let orig = terms.iter().map(|&(v, c)| c * values[v]).sum::<i128>() + k;
            let (red, s) = reducer.reduce_scaled(&terms, k)?;
            let ok = match red {
                Reduced::Zero => orig == 0,
                Reduced::Constant => orig != 0,
                Reduced::Form(f) => {
                    let rv = f.evaluate(values).ok_or_else(|| Error::Overflow("soundness check".into()))?;
                    orig != 0 && d * orig == s * rv
                }
            };
            if !ok {
                return Err(Error::Invariant(format!(
                    "soundness check failed for sequence {seq:?}: value {orig}"
                )));
            }
            out.push(());
            Ok(())
        })?;
        Ok(checks.len())
    }
}

/// Converts assigned label values to `i64`.
pub(crate) fn to_i64(values: &[i128]) -> Result<Vec<i64>> {
    values
        .iter()
        .map(|&v| i64::try_from(v).map_err(|_| Error::Overflow(format!("label {v} exceeds i64"))))
        .collect()
}

/// Builds the role map, failing if two roles share a value.
pub(crate) fn role_map(pairs: impl IntoIterator<Item = (i64, Role)>) -> Result<(Vec<i64>, BTreeMap<i64, Role>)> {
    let mut roles = BTreeMap::new();
    for (a, r) in pairs {
        if let Some(prev) = roles.insert(a, r) {
            return Err(Error::Invariant(format!("value {a} labels both {prev:?} and {r:?}")));
        }
    }
    Ok((roles.keys().copied().collect(), roles))
}

/// Places the standard-form tuple `t` at the original positions.
pub(crate) fn unstandardize(sf: &StandardForm, t: &[i64]) -> Vec<i64> {
    let mut out = vec![0; t.len()];
    for (p, &x) in t.iter().enumerate() {
        out[sf.perm[p]] = x;
    }
    out
}

pub(crate) fn require_arity(eq: &LinearEquation, need: usize) -> Result<()> {
    if eq.arity() < need {
        return Err(Error::TooFewVariables {
            need,
            got: eq.arity(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_visits_every_sequence_once() {
        for parallel in [false, true] {
            let got = sweep(parallel, 3, 3, |s, out| {
                out.push(s.to_vec());
                Ok(())
            })
            .unwrap();
            assert_eq!(got.len(), 27);
            let mut sorted = got.clone();
            sorted.sort();
            assert_eq!(got, sorted);
        }
        assert!(sweep(false, 4, 0, |_, out: &mut Vec<()>| {
            out.push(());
            Ok(())
        })
        .unwrap()
        .is_empty());
    }

    #[test]
    fn combine_merges_repeated_letters() {
        let alpha = [Sym::Var(0), Sym::Var(1), Sym::Const(5)];
        let (t, k) = combine(&alpha, &[1, 2, -1, 3], &[0, 1, 0, 2], -4);
        assert_eq!(t, vec![(1, 2)]);
        assert_eq!(k, 11);
    }
}
