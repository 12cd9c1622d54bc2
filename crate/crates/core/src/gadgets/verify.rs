//! Independent checks of a constructed gadget against the exact oracle.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::oracle::{self, SearchConfig};

use super::{GadgetKind, GadgetSet, Role};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub conditions: Vec<ConditionResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&ConditionResult> {
        self.conditions.iter().filter(|c| !c.passed).collect()
    }
}

fn expected_size(gs: &GadgetSet) -> usize {
    let (n, m, l) = (gs.graph.n(), gs.graph.m(), gs.equation.arity());
    let r = gs.params.r.unwrap_or(0);
    match gs.kind {
        GadgetKind::Homogeneous | GadgetKind::HomogeneousSef | GadgetKind::Inhomogeneous => n + (l - 2) * m,
        GadgetKind::CountingL3 => n + (1 + 2 * r) * m,
        GadgetKind::CountingL4 => n + r * (l - 2) * m,
        GadgetKind::CountingInhom => n + (l - 2 + 2 * r) * m,
    }
}

/// Runs every applicable condition:
/// 1 roles, 2 size, 3 inventory tuples solve, 4 the non-trivial solutions are
/// exactly the inventory, 5 magnitude bound, 6 sign pattern, 7 sub-equation
/// freeness (or no new solutions with `S'`).
pub fn verify_gadget(gs: &GadgetSet, cfg: &SearchConfig) -> Result<VerificationReport> {
    let eq = &gs.equation;
    let mut out = Vec::new();
    let mut push = |id: u8, name: &str, passed: bool, detail: String| {
        out.push(ConditionResult {
            id,
            name: name.into(),
            passed,
            detail,
        })
    };

    let keys: Vec<i64> = gs.roles.keys().copied().collect();
    let vertex_roles = gs.roles.values().filter(|r| matches!(r, Role::VertexLabel { .. })).count();
    let u_roles = gs.roles.values().filter(|r| matches!(r, Role::ULabel { .. })).count();
    let r = gs.params.r.unwrap_or(0);
    let u_expected = match gs.kind {
        GadgetKind::CountingL3 | GadgetKind::CountingInhom => 2 * r * gs.graph.m(),
        _ => 0,
    };
    let roles_ok = keys == gs.elements && vertex_roles == gs.graph.n() && u_roles == u_expected;
    push(
        1,
        "roles",
        roles_ok,
        format!("{vertex_roles} vertex labels, {u_roles} counting labels"),
    );

    let want = expected_size(gs);
    push(
        2,
        "size",
        gs.len() == want,
        format!("|A| = {}, expected {want}", gs.len()),
    );

    let bad_item = gs
        .inventory
        .iter()
        .find(|it| !eq.is_solution(&it.tuple) || it.tuple.iter().any(|x| gs.elements.binary_search(x).is_err()));
    push(
        3,
        "inventory_solves",
        bad_item.is_none(),
        match bad_item {
            Some(it) => format!("{:?} is not a solution inside A", it.tuple),
            None => format!("{} prescribed solutions", gs.inventory.len()),
        },
    );

    let found: BTreeSet<Vec<i64>> = oracle::enumerate_nontrivial_solutions(eq, &gs.elements, cfg)?
        .into_iter()
        .map(|s| s.positions_support)
        .collect();
    let prescribed: BTreeSet<Vec<i64>> = gs.inventory.iter().map(|it| it.support()).collect();
    let extra: Vec<&Vec<i64>> = found.difference(&prescribed).collect();
    let missing: Vec<&Vec<i64>> = prescribed.difference(&found).collect();
    push(
        4,
        "exact_solutions",
        extra.is_empty() && missing.is_empty(),
        format!(
            "{} supports found; unexpected {:?}; missing {:?}",
            found.len(),
            extra.iter().take(3).collect::<Vec<_>>(),
            missing.iter().take(3).collect::<Vec<_>>()
        ),
    );

    let max_abs = gs.elements.iter().map(|x| x.unsigned_abs() as i128).max().unwrap_or(0);
    let mut magnitude_ok = gs.params.bound.is_none_or(|b| max_abs <= b);
    let mut detail = format!("max |a| = {max_abs}, bound {:?}", gs.params.bound);
    if let (Some(n), Some(b)) = (gs.params.max_multiplier, gs.params.multiplier_bound) {
        magnitude_ok &= n <= b;
        detail.push_str(&format!("; multiplier {n} <= {b}"));
    }
    push(5, "magnitude", magnitude_ok, detail);

    let all_positive = gs.elements.iter().all(|&x| x > 0);
    let (sign_ok, detail) = match gs.kind {
        GadgetKind::Homogeneous | GadgetKind::HomogeneousSef | GadgetKind::CountingL4 | GadgetKind::CountingL3 => {
            if !eq.all_same_sign() {
                (all_positive, "mixed signs: every element positive".to_string())
            } else if gs.graph.m() > 0 {
                (
                    gs.elements.iter().any(|&x| x < 0),
                    "same signs: some element negative".to_string(),
                )
            } else {
                (true, "no edges".to_string())
            }
        }
        GadgetKind::Inhomogeneous | GadgetKind::CountingInhom if !eq.all_same_sign() => {
            (all_positive, "mixed signs: every element positive".to_string())
        }
        _ => (true, "not applicable".to_string()),
    };
    push(6, "sign", sign_ok, detail);

    let (sub_ok, detail) = match gs.kind {
        GadgetKind::HomogeneousSef => (
            oracle::is_proper_subequation_free(eq, &gs.elements, cfg)?,
            "free for every proper sub-equation".to_string(),
        ),
        GadgetKind::Inhomogeneous => {
            let mut both = gs.elements.clone();
            both.extend(&gs.s_prime);
            let extra = oracle::solutions_outside(eq, &both, &gs.elements, cfg)?;
            (
                extra.is_empty(),
                format!("{} solutions use S' (|S'| = {})", extra.len(), gs.s_prime.len()),
            )
        }
        _ => (true, "not applicable".to_string()),
    };
    push(7, "sub_equations", sub_ok, detail);

    Ok(VerificationReport { conditions: out })
}
