//! Gadgets for homogeneous equations.

use num_integer::Integer;

use crate::eqmodel::{standardize, LinearEquation, StandardForm};
use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::labeler::{Domain, SystemBuilder, Var};

use super::{
    require_arity, role_map, to_i64, unstandardize, BuildOptions, Family, GadgetKind, GadgetParams, GadgetSet,
    InventoryItem, Role, SolutionFamily, Sym,
};

/// The labels of one copy of one edge.
pub(crate) struct Slot {
    pub edge: usize,
    pub copy: usize,
    pub v: usize,
    pub w: usize,
    pub free: Vec<Var>,
    pub dep: Var,
}

pub(crate) struct HomCore {
    pub sf: StandardForm,
    pub values: Vec<i64>,
    pub vertex_vars: Vec<Var>,
    pub slots: Vec<Slot>,
    pub params: GadgetParams,
}

/// `-x1 + x2 + y1 = y0` up to a common factor, i.e. `x1 + x2 = x3 + x4`.
pub fn is_special(sf: &StandardForm) -> bool {
    let c = sf.content();
    sf.b.len() == 1 && sf.a1 == -c && sf.a2 == c && sf.b[0] == c && sf.b0 == c
}

/// Builds the labelled system for `copies` copies of every edge. With `sef`
/// the labels also avoid every proper sub-equation.
pub(crate) fn homogeneous_core(
    eq: &LinearEquation,
    g: &Graph,
    copies: usize,
    sef: bool,
    opts: BuildOptions,
) -> Result<HomCore> {
    if !eq.is_homogeneous() {
        return Err(Error::Inhomogeneous(eq.constant()));
    }
    require_arity(eq, 3)?;
    let sf = standardize(eq)?;
    let l = sf.arity();
    let special = l == 4 && is_special(&sf);

    let mut b = SystemBuilder::new();
    let mut vertex_vars = vec![0; g.n()];
    for &v in g.order() {
        vertex_vars[v] = b.free_var(format!("x{v}"));
    }
    let mut slots = Vec::new();
    for (e, &(v, w)) in g.edges().iter().enumerate() {
        for copy in 0..copies {
            let free: Vec<Var> = (1..=l - 3).map(|i| b.free_var(format!("y{e}.{copy}.{i}"))).collect();
            let mut terms = vec![(vertex_vars[v], sf.a1 as i128), (vertex_vars[w], sf.a2 as i128)];
            terms.extend(free.iter().zip(&sf.b).map(|(&y, &c)| (y, c as i128)));
            let dep = b.dependent_var(format!("y{e}.{copy}.0"), &terms, 0, sf.b0 as i128)?;
            slots.push(Slot {
                edge: e,
                copy,
                v,
                w,
                free,
                dep,
            });
        }
    }

    let n_vars = b.var_count();
    let mut slot_of = vec![usize::MAX; n_vars];
    let edge_sets: Vec<Vec<Var>> = slots
        .iter()
        .enumerate()
        .map(|(s, slot)| {
            let mut set = vec![vertex_vars[slot.v], vertex_vars[slot.w], slot.dep];
            set.extend(&slot.free);
            for &y in set.iter().skip(2) {
                slot_of[y] = s;
            }
            set.sort_unstable();
            set
        })
        .collect();
    let is_edge_sequence = |seq: &[usize]| -> bool {
        let Some(s) = seq.iter().map(|&y| slot_of[y]).find(|&s| s != usize::MAX) else {
            return false;
        };
        let mut vars = seq.to_vec();
        vars.sort_unstable();
        vars.dedup();
        vars == edge_sets[s]
    };

    let alphabet: Vec<Sym> = (0..n_vars).map(Sym::Var).collect();
    let distinct_skip = |seq: &[usize], _: &[(Var, i128)], _: i128| seq[0] >= seq[1];
    let main_skip = |seq: &[usize], terms: &[(Var, i128)], _: i128| terms.is_empty() || is_edge_sequence(seq);
    let sub_skip = |_: &[usize], terms: &[(Var, i128)], _: i128| terms.is_empty();
    let zero_form = sf.zero_form();
    let subs: Vec<Vec<i64>> = if sef {
        (1..(1u32 << l) - 1)
            .map(|mask| (0..l).filter(|i| mask >> i & 1 == 1).map(|i| zero_form[i]).collect())
            .collect()
    } else {
        Vec::new()
    };
    let pair = [1i64, -1];
    let mut families = vec![
        Family {
            alphabet: &alphabet,
            coefs: &pair,
            constant: 0,
            skip: &distinct_skip,
        },
        Family {
            alphabet: &alphabet,
            coefs: &zero_form,
            constant: 0,
            skip: &main_skip,
        },
    ];
    for c in &subs {
        families.push(Family {
            alphabet: &alphabet,
            coefs: c,
            constant: 0,
            skip: &sub_skip,
        });
    }

    let fail = |seq: &[usize]| -> Result<()> {
        Err(Error::Invariant(format!("forbidden combination over labels {seq:?} vanishes identically")))
    };
    let tolerate = |_: &[usize]| -> Result<()> { Ok(()) };
    let mut special_skips = 0;
    let mut all_forms = Vec::new();
    {
        let reducer = b.reducer()?;
        for (i, fam) in families.iter().enumerate() {
            let on_zero: &(dyn Fn(&[usize]) -> Result<()> + Sync) =
                if i == 1 && special && copies > 1 { &tolerate } else { &fail };
            let (forms, zeros) = fam.forms(opts.parallel, reducer, on_zero)?;
            special_skips += zeros;
            all_forms.push(forms);
        }
    }
    for f in all_forms.into_iter().flatten() {
        b.insert(f);
    }
    let step = sf.b0 as i128;
    for &v in g.order() {
        b.schedule(vertex_vars[v], Domain::Sliding { offset: 0, step });
    }
    for slot in &slots {
        for &y in &slot.free {
            b.schedule(y, Domain::Sliding { offset: 0, step });
        }
    }
    let system = b.build()?;
    let asg = system.assign()?;
    let mut soundness_checks = 0;
    if opts.soundness {
        for fam in &families {
            soundness_checks += fam.soundness(opts.parallel, &system, &asg.values)?;
        }
    }
    let values = to_i64(&asg.values)?;
    // free labels are k * b0 with k at most (free labels) * (M + 1); a
    // dependent is at most sum |lhs| / |b0| times the largest free label
    let m = asg.constraint_count as i128;
    let free_bound = (n_vars - slots.len()) as i128 * (m + 1) * step.abs();
    let lhs_abs: i128 = sf.lhs().iter().map(|x| x.unsigned_abs() as i128).sum();
    let bound = free_bound.max(Integer::div_ceil(&(lhs_abs * free_bound), &step.abs()));
    if let Some(big) = values.iter().find(|x| (x.unsigned_abs() as i128) > bound) {
        return Err(Error::Invariant(format!("label {big} exceeds the bound {bound}")));
    }
    Ok(HomCore {
        sf,
        values,
        vertex_vars,
        slots,
        params: GadgetParams {
            label_count: n_vars,
            constraint_count: asg.constraint_count,
            bound: Some(bound),
            special_case: special,
            special_skips,
            soundness_checks,
            ..Default::default()
        },
    })
}

impl HomCore {
    fn edge_tuple(&self, slot: &Slot) -> Vec<i64> {
        let mut t = vec![self.values[self.vertex_vars[slot.v]], self.values[self.vertex_vars[slot.w]]];
        t.extend(slot.free.iter().map(|&y| self.values[y]));
        t.push(self.values[slot.dep]);
        unstandardize(&self.sf, &t)
    }

    /// Assembles a gadget. With `copies` set, edge labels carry a copy index
    /// and the special case contributes its cross-copy solutions.
    pub(crate) fn into_gadget(
        self,
        kind: GadgetKind,
        eq: &LinearEquation,
        g: &Graph,
        copies: Option<usize>,
    ) -> Result<GadgetSet> {
        let mut pairs = Vec::new();
        for v in 0..g.n() {
            pairs.push((self.values[self.vertex_vars[v]], Role::VertexLabel { vertex: v }));
        }
        for slot in &self.slots {
            let role = |index: usize| match copies {
                Some(_) => Role::EdgeLabelCopy {
                    edge: slot.edge,
                    index,
                    copy: slot.copy + 1,
                },
                None => Role::EdgeLabel { edge: slot.edge, index },
            };
            pairs.push((self.values[slot.dep], role(0)));
            for (i, &y) in slot.free.iter().enumerate() {
                pairs.push((self.values[y], role(i + 1)));
            }
        }
        let (elements, roles) = role_map(pairs)?;
        let mut inventory: Vec<InventoryItem> = self
            .slots
            .iter()
            .map(|slot| InventoryItem {
                family: SolutionFamily::Edge,
                edge: slot.edge,
                tuple: self.edge_tuple(slot),
            })
            .collect();
        if self.params.special_case && copies.is_some() {
            for (i, s) in self.slots.iter().enumerate() {
                for t in &self.slots[i + 1..] {
                    if t.edge != s.edge {
                        continue;
                    }
                    let vals = [
                        self.values[s.free[0]],
                        self.values[s.dep],
                        self.values[t.free[0]],
                        self.values[t.dep],
                    ];
                    let tuple = solving_permutation(eq, &vals).ok_or_else(|| {
                        Error::Invariant(format!("cross-copy labels {vals:?} do not solve the equation"))
                    })?;
                    inventory.push(InventoryItem {
                        family: SolutionFamily::CrossCopy,
                        edge: s.edge,
                        tuple,
                    });
                }
            }
        }
        let mut params = self.params;
        params.r = copies;
        Ok(GadgetSet {
            kind,
            equation: eq.clone(),
            standard_form: Some(self.sf),
            graph: g.clone(),
            partition: None,
            elements,
            roles,
            inventory,
            s_prime: Vec::new(),
            params,
        })
    }
}

/// The lexicographically first arrangement of `vals` that solves `eq`.
pub(crate) fn solving_permutation(eq: &LinearEquation, vals: &[i64]) -> Option<Vec<i64>> {
    fn go(eq: &LinearEquation, vals: &[i64], used: &mut Vec<bool>, cur: &mut Vec<i64>) -> Option<Vec<i64>> {
        if cur.len() == vals.len() {
            return eq.is_solution(cur).then(|| cur.clone());
        }
        for i in 0..vals.len() {
            if !used[i] {
                used[i] = true;
                cur.push(vals[i]);
                let r = go(eq, vals, used, cur);
                cur.pop();
                used[i] = false;
                if r.is_some() {
                    return r;
                }
            }
        }
        None
    }
    let mut sorted = vals.to_vec();
    sorted.sort_unstable();
    go(eq, &sorted, &mut vec![false; vals.len()], &mut Vec::new())
}

/// Encodes `g` so that the non-trivial solutions of `eq` in the result are
/// exactly the edge solutions.
pub fn build_homogeneous(eq: &LinearEquation, g: &Graph, opts: BuildOptions) -> Result<GadgetSet> {
    homogeneous_core(eq, g, 1, false, opts)?.into_gadget(GadgetKind::Homogeneous, eq, g, None)
}

/// Like [`build_homogeneous`], and additionally free for every proper
/// sub-equation of `eq`.
pub fn build_homogeneous_sef(eq: &LinearEquation, g: &Graph, opts: BuildOptions) -> Result<GadgetSet> {
    homogeneous_core(eq, g, 1, true, opts)?.into_gadget(GadgetKind::HomogeneousSef, eq, g, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate, GraphKind};
    use crate::oracle::{enumerate_nontrivial_solutions, SearchConfig};

    #[test]
    fn single_edge_schur() {
        let eq = LinearEquation::homogeneous(vec![1, 1, -1]).unwrap();
        let g = generate(&GraphKind::Path(2));
        let gs = build_homogeneous(&eq, &g, BuildOptions::default()).unwrap();
        assert_eq!(gs.len(), 3);
        let sols = enumerate_nontrivial_solutions(&eq, &gs.elements, &SearchConfig::default()).unwrap();
        assert!(sols.iter().all(|s| s.positions_support == gs.inventory[0].support()));
        assert!(gs.params.soundness_checks > 0);
    }

    #[test]
    fn special_form_detected() {
        let sf = standardize(&LinearEquation::homogeneous(vec![1, 1, -1, -1]).unwrap()).unwrap();
        assert!(is_special(&sf));
        let sf = standardize(&LinearEquation::homogeneous(vec![1, 2, -1, -2]).unwrap()).unwrap();
        assert!(!is_special(&sf));
    }

    #[test]
    fn inhomogeneous_rejected() {
        let eq = LinearEquation::new(vec![1, 1, -1], 2).unwrap();
        let g = generate(&GraphKind::Path(2));
        assert_eq!(build_homogeneous(&eq, &g, BuildOptions::default()), Err(Error::Inhomogeneous(2)));
    }
}
