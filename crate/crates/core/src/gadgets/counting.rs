//! Counting gadgets: every edge gets `r` extra solutions (or `r` copies), so
//! that the number of free subsets encodes the independent-set polynomial.

use std::collections::BTreeSet;

use crate::eqmodel::LinearEquation;
use crate::error::{Error, Result};
use crate::graphs::{find_partition, Graph, VertexPartition};

use super::homogeneous::homogeneous_core;
use super::inhomogeneous::inhomogeneous_core;
use super::{
    require_arity, role_map, unstandardize, BuildOptions, GadgetKind, GadgetSet, InventoryItem, Role,
    SolutionFamily,
};

/// Upper bound on the multipliers chosen by [`build_counting_l3`]: with
/// `s = 2 r |E| + 1`, each new multiplier is excluded by at most
/// `6s^2 - 10s + 4` earlier choices.
pub fn l3_multiplier_bound(r: usize, m: usize) -> i64 {
    let s = (2 * r * m + 1) as i64;
    6 * s * s - 10 * s + 9
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or_else(|| Error::Overflow(format!("{a} * {b}")))
}

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or_else(|| Error::Overflow(format!("{a} + {b}")))
}

/// Multipliers for the three-variable gadget. With `S = {0} ∪ {a2 N, -a1 N}`
/// over all chosen `N`, every triple from `S` solving the equation in some
/// order must stay inside one group `{0, a2 N, -a1 N}`. Each new `N` is the
/// smallest positive integer up to `limit` that keeps this true.
///
/// A value excluded once stays excluded as `S` grows, so each round only
/// looks at the patterns that use one of the two elements added last.
fn l3_multipliers(coefs: [i64; 3], a1: i64, a2: i64, count: usize, limit: i64) -> Result<Vec<i64>> {
    let alphas = [a2 as i128, -(a1 as i128)];
    // (a, old positions) for every way of placing new elements: the new
    // elements contribute a * N, the old positions take values from s
    let mut patterns: Vec<(i128, Vec<usize>)> = Vec::new();
    for mask in 1u32..8 {
        let new_pos: Vec<usize> = (0..3).filter(|p| mask >> p & 1 == 1).collect();
        let old_pos: Vec<usize> = (0..3).filter(|p| mask >> p & 1 == 0).collect();
        for amask in 0u32..1 << new_pos.len() {
            let a: i128 = new_pos
                .iter()
                .enumerate()
                .map(|(j, &p)| coefs[p] as i128 * alphas[(amask >> j & 1) as usize])
                .sum();
            patterns.push((a, old_pos.clone()));
        }
    }
    let size = usize::try_from(limit).map_err(|_| Error::Overflow(format!("limit {limit}")))? + 1;
    let mut forbidden = vec![false; size];
    fn forbid(forbidden: &mut [bool], num: i128, den: i128) {
        if den != 0 && num % den == 0 {
            let n = num / den;
            if n > 0 && n < forbidden.len() as i128 {
                forbidden[n as usize] = true;
            }
        }
    }
    let mut chosen = Vec::with_capacity(count);
    let mut s: Vec<i64> = vec![0];
    let mut fresh = 0;
    for _ in 0..count {
        for &x in &s[fresh..] {
            forbid(&mut forbidden, x as i128, a2 as i128);
            forbid(&mut forbidden, -(x as i128), a1 as i128);
        }
        for (a, old_pos) in &patterns {
            let mut check = |idx: &[usize]| -> Result<()> {
                if idx.iter().all(|&i| s[i] == 0) {
                    return Ok(());
                }
                let b: i128 = old_pos
                    .iter()
                    .zip(idx)
                    .map(|(&p, &i)| coefs[p] as i128 * s[i] as i128)
                    .sum();
                if *a == 0 && b == 0 {
                    return Err(Error::Invariant("multiplier choice is impossible".into()));
                }
                forbid(&mut forbidden, -b, *a);
                Ok(())
            };
            match old_pos.len() {
                0 => {}
                1 => {
                    for i in fresh..s.len() {
                        check(&[i])?;
                    }
                }
                _ => {
                    for i in 0..s.len() {
                        let from = if i < fresh { fresh } else { 0 };
                        for j in from..s.len() {
                            check(&[i, j])?;
                        }
                    }
                }
            }
        }
        let n = (1..size)
            .find(|&n| !forbidden[n])
            .ok_or_else(|| Error::Invariant(format!("no multiplier up to {limit}")))?;
        let n = n as i64;
        chosen.push(n);
        fresh = s.len();
        s.push(mul(a2, n)?);
        s.push(mul(-a1, n)?);
    }
    Ok(chosen)
}

/// Three-variable homogeneous equations: the base gadget scaled by
/// `N = 3 c^2 N' + 1`, plus `2r` labels per edge `u_v = x_v + N_i a2` and
/// `u_w = x_w - N_i a1` forming `r` further solutions with the edge label.
pub fn build_counting_l3(eq: &LinearEquation, g: &Graph, r: usize, opts: BuildOptions) -> Result<GadgetSet> {
    if eq.arity() != 3 {
        return Err(Error::Precondition(format!(
            "three-variable equation required, got {}",
            eq.arity()
        )));
    }
    let core = homogeneous_core(eq, g, 1, false, opts)?;
    let sf = core.sf.clone();
    let coefs = [sf.a1, sf.a2, -sf.b0];
    let n_bound = l3_multiplier_bound(r, g.m());
    let multipliers = l3_multipliers(coefs, sf.a1, sf.a2, r * g.m(), n_bound)?;
    let n_prime = multipliers.iter().copied().max().unwrap_or(0);
    let c = eq.coefficients().iter().map(|x| x.abs()).max().expect("nonempty");
    let scale = add(mul(mul(3 * c, c)?, n_prime)?, 1)?;

    let value = |var: usize| mul(core.values[var], scale);
    let mut pairs = Vec::new();
    for v in 0..g.n() {
        pairs.push((value(core.vertex_vars[v])?, Role::VertexLabel { vertex: v }));
    }
    let mut inventory = Vec::new();
    for slot in &core.slots {
        let (xv, xw, y) = (
            value(core.vertex_vars[slot.v])?,
            value(core.vertex_vars[slot.w])?,
            value(slot.dep)?,
        );
        pairs.push((y, Role::EdgeLabel { edge: slot.edge, index: 0 }));
        inventory.push(InventoryItem {
            family: SolutionFamily::Edge,
            edge: slot.edge,
            tuple: unstandardize(&sf, &[xv, xw, y]),
        });
        for i in 1..=r {
            let n = multipliers[slot.edge * r + i - 1];
            let uv = add(xv, mul(n, sf.a2)?)?;
            let uw = add(xw, -mul(n, sf.a1)?)?;
            pairs.push((
                uv,
                Role::ULabel {
                    vertex: slot.v,
                    edge: slot.edge,
                    index: i,
                },
            ));
            pairs.push((
                uw,
                Role::ULabel {
                    vertex: slot.w,
                    edge: slot.edge,
                    index: i,
                },
            ));
            inventory.push(InventoryItem {
                family: SolutionFamily::U,
                edge: slot.edge,
                tuple: unstandardize(&sf, &[uv, uw, y]),
            });
        }
    }
    let (elements, roles) = role_map(pairs)?;
    let mut params = core.params.clone();
    params.r = Some(r);
    params.scale = Some(scale);
    params.max_multiplier = Some(n_prime);
    params.multiplier_bound = Some(n_bound);
    params.multipliers = multipliers;
    params.bound = params
        .bound
        .map(|b| b * scale as i128 + n_prime as i128 * c as i128);
    Ok(GadgetSet {
        kind: GadgetKind::CountingL3,
        equation: eq.clone(),
        standard_form: Some(sf),
        graph: g.clone(),
        partition: None,
        elements,
        roles,
        inventory,
        s_prime: Vec::new(),
        params,
    })
}

/// Homogeneous equations with at least four variables: `r` independent copies
/// of each edge's labels, all sharing the vertex labels.
pub fn build_counting_l4(eq: &LinearEquation, g: &Graph, r: usize, opts: BuildOptions) -> Result<GadgetSet> {
    require_arity(eq, 4)?;
    if r == 0 {
        return Err(Error::Precondition("at least one copy per edge is required".into()));
    }
    homogeneous_core(eq, g, r, false, opts)?.into_gadget(GadgetKind::CountingL4, eq, g, Some(r))
}

/// Multipliers for the inhomogeneous counting gadget: distinct pairs never
/// satisfy `c_{j1} c1 N1 = c_{j2} c2 N2` with `j1 != j2`.
fn inhom_multipliers(c: &[i64], count: usize) -> Vec<i64> {
    let mut chosen: Vec<i64> = Vec::with_capacity(count);
    let l = c.len();
    for _ in 0..count {
        let mut forbidden = BTreeSet::new();
        for &prev in &chosen {
            for j1 in 0..l {
                for j2 in 0..l {
                    if j1 == j2 {
                        continue;
                    }
                    let p = c[j1] as i128 * c[0] as i128;
                    let q = c[j2] as i128 * c[1] as i128;
                    // new as N1: p N = q prev; new as N2: q N = p prev
                    for (num, den) in [(q * prev as i128, p), (p * prev as i128, q)] {
                        if num % den == 0 && num / den > 0 {
                            forbidden.insert((num / den) as i64);
                        }
                    }
                }
            }
        }
        chosen.push((1..).find(|n| !forbidden.contains(n)).expect("finite exclusions"));
    }
    chosen
}

/// Inhomogeneous equations on a bipartite graph. Coefficients are reordered
/// so that `c1 > 0 > c2` when the signs are mixed. With
/// `N = 2 l c max|a| + 1`, edge `e` gets `u_v = x_v - N N_i c2` and
/// `u_w = x_w + N N_i c1` for `v` in the first part and `w` in the second.
pub fn build_counting_inhom(
    eq: &LinearEquation,
    g: &Graph,
    partition: Option<&VertexPartition>,
    r: usize,
    opts: BuildOptions,
) -> Result<GadgetSet> {
    let partition = match partition {
        Some(p) => p.clone(),
        None => find_partition(g, 2)?,
    };
    if partition.parts.iter().skip(2).any(|p| !p.is_empty()) {
        return Err(Error::InvalidPartition("a bipartition is required".into()));
    }
    let c = eq.coefficients();
    let l = c.len();
    let order: Vec<usize> = if eq.all_same_sign() {
        (0..l).collect()
    } else {
        let p = c.iter().position(|&x| x > 0).expect("mixed signs");
        let q = c.iter().position(|&x| x < 0).expect("mixed signs");
        let mut o = vec![p, q];
        o.extend((0..l).filter(|&i| i != p && i != q));
        o
    };
    let work = eq.permuted(&order)?;
    let core = inhomogeneous_core(&work, g, &partition, &[], opts)?;
    let wc = work.coefficients();
    let cmax = wc.iter().map(|x| x.abs()).max().expect("nonempty");
    let amax = core.values.iter().map(|x| x.abs()).max().unwrap_or(0);
    let scale = add(mul(mul(2 * l as i64, cmax)?, amax)?, 1)?;
    let multipliers = inhom_multipliers(wc, r * g.m());
    let n_bound = (2 * g.m() * r * l * l) as i64;
    if let Some(&big) = multipliers.iter().find(|&&n| n > n_bound) {
        return Err(Error::Invariant(format!("multiplier {big} exceeds {n_bound}")));
    }
    let restore = |t: Vec<i64>| {
        let mut out = vec![0; l];
        for (i, x) in t.into_iter().enumerate() {
            out[order[i]] = x;
        }
        out
    };

    let mut pairs = core.role_pairs(g.n());
    let mut inventory = Vec::new();
    for slot in &core.slots {
        let edge_tuple = core.edge_tuple(slot, l);
        let (a, b) = if slot.pv == 0 { (slot.v, slot.w) } else { (slot.w, slot.v) };
        let (xa, xb) = (core.values[core.vertex_vars[a]], core.values[core.vertex_vars[b]]);
        for i in 1..=r {
            let n = mul(scale, multipliers[slot.edge * r + i - 1])?;
            let ua = add(xa, -mul(n, wc[1])?)?;
            let ub = add(xb, mul(n, wc[0])?)?;
            pairs.push((
                ua,
                Role::ULabel {
                    vertex: a,
                    edge: slot.edge,
                    index: i,
                },
            ));
            pairs.push((
                ub,
                Role::ULabel {
                    vertex: b,
                    edge: slot.edge,
                    index: i,
                },
            ));
            let mut t = edge_tuple.clone();
            t[0] = ua;
            t[1] = ub;
            inventory.push(InventoryItem {
                family: SolutionFamily::U,
                edge: slot.edge,
                tuple: restore(t),
            });
        }
        inventory.push(InventoryItem {
            family: SolutionFamily::Edge,
            edge: slot.edge,
            tuple: restore(edge_tuple),
        });
    }
    inventory.sort_by_key(|it| (it.edge, it.family));
    let (elements, roles) = role_map(pairs)?;
    let mut params = core.params;
    params.r = Some(r);
    params.scale = Some(scale);
    params.max_multiplier = Some(multipliers.iter().copied().max().unwrap_or(0));
    params.multiplier_bound = Some(n_bound);
    params.multipliers = multipliers;
    params.bound = params
        .bound
        .map(|b| b + scale as i128 * n_bound as i128 * cmax as i128);
    if order.iter().enumerate().any(|(i, &o)| i != o) {
        params.equation_order = Some(order);
    }
    Ok(GadgetSet {
        kind: GadgetKind::CountingInhom,
        equation: eq.clone(),
        standard_form: None,
        graph: g.clone(),
        partition: Some(core.partition),
        elements,
        roles,
        inventory,
        s_prime: Vec::new(),
        params,
    })
}
