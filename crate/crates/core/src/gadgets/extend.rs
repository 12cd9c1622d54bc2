//! Padding a gadget with copies of a free set.
//!
//! Given `A`, a set `S` and a free subset `S'` of `S`, [`extend`] adds `r`
//! images `f_i(S)` and `t` padding elements so that the images of `S'`
//! together with the padding add no solutions outside `A`. The maps are
//! `f_i(s) = d_i s` for homogeneous equations, `s + d_i` when the
//! coefficients sum to zero, and `(d_i C + 1) s - d_i K` otherwise.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::eqmodel::{classify, LinearEquation};
use crate::error::{Error, Result};
use crate::labeler::{Domain, Reduced, SystemBuilder, Var};
use crate::oracle::{self, SearchConfig};

use super::{to_i64, BuildOptions, Family, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Scale,
    Translate,
    Affine,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendResult {
    pub kind: MapKind,
    /// The map parameters `d_1, ..., d_r`.
    pub d: Vec<i64>,
    /// `images[i][j] = f_i(S[j])`, with `S` ascending.
    pub images: Vec<Vec<i64>>,
    pub pad: Vec<i64>,
    /// `A ∪ f_1(S) ∪ ... ∪ f_r(S) ∪ T`, ascending.
    pub b: Vec<i64>,
    pub constraint_count: usize,
    pub soundness_checks: usize,
    /// Whether the oracle confirmed that the images of `S'` and the padding
    /// add no solutions outside `A`.
    pub confirmed: bool,
}

impl ExtendResult {
    /// `A ∪ f_1(S') ∪ ... ∪ f_r(S') ∪ T` for the positions of `S'` in `S`.
    pub fn free_part(&self, a: &[i64], s: &[i64], s_prime: &[i64]) -> Vec<i64> {
        let s = oracle::normalize_set(s);
        let mut out: BTreeSet<i64> = a.iter().copied().collect();
        for row in &self.images {
            for (j, x) in s.iter().enumerate() {
                if s_prime.contains(x) {
                    out.insert(row[j]);
                }
            }
        }
        out.extend(&self.pad);
        out.into_iter().collect()
    }
}

fn tuple_cost(n: usize, l: usize) -> u128 {
    (n as u128).saturating_pow(l.saturating_sub(1) as u32)
}

/// Translates a free set so that it also avoids every proper sub-equation
/// and does not contain 0. Returns the shift and the shifted set.
pub fn shift_to_sef(eq: &LinearEquation, s: &[i64], cfg: &SearchConfig) -> Result<(i64, Vec<i64>)> {
    if !eq.is_homogeneous() || !eq.is_translation_invariant() {
        return Err(Error::Precondition(
            "shifting needs a homogeneous equation whose coefficients sum to zero".into(),
        ));
    }
    let s = oracle::normalize_set(s);
    if !oracle::is_free(eq, &s, cfg)? {
        return Err(Error::Precondition("the set to shift is not free".into()));
    }
    let forbidden = shift_exclusions(eq, &s, cfg)?;
    let alpha = (1..).find(|a| !forbidden.contains(a)).expect("finite exclusions");
    let shifted: Vec<i64> = s.iter().map(|x| x + alpha).collect();
    if !oracle::is_subequation_free(eq, &shifted, cfg)? {
        return Err(Error::Precondition(
            "the set solves a sub-equation whose coefficients sum to zero; no shift helps".into(),
        ));
    }
    Ok((alpha, shifted))
}

/// Shifts that would create a sub-equation solution or put 0 in the set.
pub fn shift_exclusions(eq: &LinearEquation, s: &[i64], cfg: &SearchConfig) -> Result<BTreeSet<i64>> {
    let c = eq.coefficients();
    let l = c.len();
    let mut out: BTreeSet<i64> = s.iter().map(|x| -x).collect();
    if s.is_empty() {
        return Ok(out);
    }
    let mut cost: u128 = 0;
    for mask in 1u32..1 << l {
        let pos: Vec<usize> = (0..l).filter(|p| mask >> p & 1 == 1).collect();
        let sigma: i128 = pos.iter().map(|&p| c[p] as i128).sum();
        if sigma == 0 {
            continue;
        }
        cost += (s.len() as u128).pow(pos.len() as u32);
        if cost > cfg.tuple_budget as u128 {
            return Err(Error::BudgetExceeded(format!("shift search over {} elements", s.len())));
        }
        let mut idx = vec![0usize; pos.len()];
        loop {
            let total: i128 = pos.iter().zip(&idx).map(|(&p, &i)| c[p] as i128 * s[i] as i128).sum();
            if total % sigma == 0 {
                if let Ok(a) = i64::try_from(-total / sigma) {
                    out.insert(a);
                }
            }
            let mut j = 0;
            while j < idx.len() {
                idx[j] += 1;
                if idx[j] < s.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
        }
    }
    Ok(out)
}

fn check_preconditions(
    eq: &LinearEquation,
    a: &[i64],
    s: &[i64],
    s_prime: &[i64],
    cfg: &SearchConfig,
) -> Result<()> {
    let fail = |what: &str| Err(Error::Precondition(what.to_string()));
    let profile = classify(eq);
    if !eq.is_translation_invariant() {
        if let Some(x) = profile.forbidden_singleton {
            if s.contains(&x) {
                return fail(&format!("S contains {x}, which solves the equation on its own"));
            }
        }
    }
    if let Some(x) = s_prime.iter().find(|x| !s.contains(x)) {
        return fail(&format!("S' is not a subset of S ({x} is missing)"));
    }
    if !oracle::is_free(eq, s_prime, cfg)? {
        return fail("S' is not free");
    }
    if eq.is_homogeneous() {
        if eq.is_translation_invariant() {
            if s.contains(&0) {
                return fail("S contains 0");
            }
            if !oracle::is_proper_subequation_free(eq, s_prime, cfg)? {
                return fail("S' solves a proper sub-equation");
            }
        }
        if !oracle::is_proper_subequation_free(eq, a, cfg)? {
            return fail("A solves a proper sub-equation");
        }
    } else {
        let mut both = a.to_vec();
        both.extend_from_slice(s_prime);
        if !oracle::solutions_outside(eq, &both, a, cfg)?.is_empty() {
            return fail("A ∪ S' has solutions outside A");
        }
    }
    Ok(())
}

/// Adds `r` images of `s` and `t` padding elements to `a`. See the module
/// documentation for the maps. Preconditions are checked with the oracle and
/// a failure names the one that does not hold.
pub fn extend(
    eq: &LinearEquation,
    a: &[i64],
    s: &[i64],
    s_prime: &[i64],
    r: usize,
    t: usize,
    opts: BuildOptions,
) -> Result<ExtendResult> {
    let cfg = SearchConfig {
        parallel: opts.parallel,
        ..Default::default()
    };
    let a = oracle::normalize_set(a);
    let s = oracle::normalize_set(s);
    let s_prime = oracle::normalize_set(s_prime);
    check_preconditions(eq, &a, &s, &s_prime, &cfg)?;
    let k = eq.constant() as i128;
    let csum = eq.coefficient_sum() as i128;
    let kind = if k == 0 {
        MapKind::Scale
    } else if csum == 0 {
        MapKind::Translate
    } else {
        MapKind::Affine
    };

    let mut b = SystemBuilder::new();
    let d: Vec<Var> = (0..r).map(|i| b.free_var(format!("d{i}"))).collect();
    let pad: Vec<Var> = (0..t).map(|j| b.free_var(format!("u{j}"))).collect();
    let mut images: Vec<Vec<Var>> = Vec::with_capacity(r);
    for (i, &di) in d.iter().enumerate() {
        let row = s
            .iter()
            .map(|&x| {
                let x = x as i128;
                let (coef, constant) = match kind {
                    MapKind::Scale => (x, 0),
                    MapKind::Translate => (1, x),
                    MapKind::Affine => (x * csum - k, x),
                };
                b.dependent_var(format!("f{i}({x})"), &[(di, coef)], constant, 1)
            })
            .collect::<Result<Vec<_>>>()?;
        images.push(row);
    }

    let consts: Vec<Sym> = a.iter().map(|&x| Sym::Const(x as i128)).collect();
    let mut pair_alpha = consts.clone();
    pair_alpha.extend(images.iter().flatten().map(|&v| Sym::Var(v)));
    pair_alpha.extend(pad.iter().map(|&v| Sym::Var(v)));
    let mut seq_alpha = consts;
    for row in &images {
        for (j, &v) in row.iter().enumerate() {
            if s_prime.binary_search(&s[j]).is_ok() {
                seq_alpha.push(Sym::Var(v));
            }
        }
    }
    seq_alpha.extend(pad.iter().map(|&v| Sym::Var(v)));

    let n_a = a.len();
    let coefs = eq.coefficients();
    let pair_skip = |seq: &[usize], _: &[(Var, i128)], _: i128| seq[0] >= seq[1] || seq[1] < n_a;
    let seq_skip = |seq: &[usize], _: &[(Var, i128)], _: i128| {
        if seq.iter().all(|&i| i < n_a) {
            return true;
        }
        if k != 0 {
            return false;
        }
        // trivial when every letter carries a zero total coefficient
        let mut totals: Vec<(usize, i64)> = Vec::with_capacity(seq.len());
        for (&i, &c) in seq.iter().zip(coefs) {
            match totals.iter_mut().find(|(j, _)| *j == i) {
                Some(slot) => slot.1 += c,
                None => totals.push((i, c)),
            }
        }
        totals.iter().all(|&(_, c)| c == 0)
    };
    let pair = [1i64, -1];
    let families = [
        Family {
            alphabet: &pair_alpha,
            coefs: &pair,
            constant: 0,
            skip: &pair_skip,
        },
        Family {
            alphabet: &seq_alpha,
            coefs,
            constant: -k,
            skip: &seq_skip,
        },
    ];
    let fail = |seq: &[usize]| -> Result<()> {
        Err(Error::Invariant(format!("forbidden combination over letters {seq:?} vanishes identically")))
    };
    let mut all_forms = Vec::new();
    {
        let reducer = b.reducer()?;
        for fam in &families {
            all_forms.push(fam.forms(opts.parallel, reducer, &fail)?.0);
        }
    }
    for f in all_forms.into_iter().flatten() {
        b.insert(f);
    }
    for &di in &d {
        let injective = match kind {
            MapKind::Scale => b.require_nonzero(&[(di, 1)], 0)?,
            MapKind::Translate => Reduced::Constant,
            MapKind::Affine => b.require_nonzero(&[(di, csum)], 1)?,
        };
        if injective == Reduced::Zero {
            return Err(Error::Invariant("map is never injective".into()));
        }
    }
    for &v in d.iter().chain(&pad) {
        b.schedule(v, Domain::Sliding { offset: 0, step: 1 });
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
    let images: Vec<Vec<i64>> = images
        .iter()
        .map(|row| row.iter().map(|&v| values[v]).collect())
        .collect();
    let pad: Vec<i64> = pad.iter().map(|&v| values[v]).collect();
    let mut all: Vec<i64> = a.clone();
    all.extend(images.iter().flatten());
    all.extend(&pad);
    let b_set = oracle::normalize_set(&all);
    if b_set.len() != all.len() {
        return Err(Error::Invariant("extension elements are not distinct".into()));
    }
    let mut result = ExtendResult {
        kind,
        d: d.iter().map(|&v| values[v]).collect(),
        images,
        pad,
        b: b_set,
        constraint_count: asg.constraint_count,
        soundness_checks,
        confirmed: false,
    };
    let free_part = result.free_part(&a, &s, &s_prime);
    if tuple_cost(free_part.len(), eq.arity()) <= cfg.tuple_budget as u128 {
        if !oracle::solutions_outside(eq, &free_part, &a, &cfg)?.is_empty() {
            return Err(Error::Invariant("extension added solutions outside A".into()));
        }
        result.confirmed = true;
    }
    Ok(result)
}
