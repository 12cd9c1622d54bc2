//! Constraint engine shared by all gadget constructions.
//!
//! A construction declares integer variables, some of them *dependent*
//! (defined by a rational linear form over the free ones), and a family of
//! linear forms that must not vanish. Each form is reduced to the free
//! variables, scaled to a primitive integer form and deduplicated. Free
//! variables then receive values greedily, in schedule order, avoiding the
//! single value each fully-determined form forbids.
//!
//! Two reducers exist. [`reduce_form`] works on exact rationals and is the
//! reference; [`SystemBuilder`] keeps integer expansions scaled by a common
//! denominator, which is what the gadget loops use. Tests check that they
//! agree.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub type Var = usize;

/// A rational linear form `sum(coef * var) + constant`. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearForm {
    pub terms: BTreeMap<Var, BigRational>,
    pub constant: BigRational,
}

fn rat(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl LinearForm {
    pub fn zero() -> Self {
        LinearForm {
            terms: BTreeMap::new(),
            constant: BigRational::zero(),
        }
    }

    pub fn var(v: Var) -> Self {
        let mut f = Self::zero();
        f.add_term(v, BigRational::one());
        f
    }

    pub fn constant(c: BigRational) -> Self {
        LinearForm {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    /// Builds a form from integer terms and an integer constant.
    pub fn from_ints(terms: &[(Var, i128)], constant: i128) -> Self {
        let mut f = Self::constant(rat(constant));
        for &(v, c) in terms {
            f.add_term(v, rat(c));
        }
        f
    }

    pub fn add_term(&mut self, v: Var, coef: BigRational) {
        let entry = self.terms.entry(v).or_insert_with(BigRational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn add_scaled(&mut self, other: &LinearForm, scale: &BigRational) {
        for (&v, c) in &other.terms {
            self.add_term(v, c * scale);
        }
        self.constant += &other.constant * scale;
    }

    pub fn is_identically_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn evaluate(&self, value: impl Fn(Var) -> BigRational) -> BigRational {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (&v, c)| acc + c * value(v))
    }
}

pub fn is_identically_zero(form: &LinearForm) -> bool {
    form.is_identically_zero()
}

/// Replaces every dependent variable by its defining form. Substitution
/// bodies must mention free variables only.
pub fn reduce_form(form: &LinearForm, subs: &BTreeMap<Var, LinearForm>) -> LinearForm {
    let mut out = LinearForm::constant(form.constant.clone());
    for (&v, c) in &form.terms {
        match subs.get(&v) {
            Some(body) => out.add_scaled(body, c),
            None => out.add_term(v, c.clone()),
        }
    }
    out
}

/// A primitive integer form over free variables: coefficients and constant
/// share no common factor and the first coefficient is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct IntForm {
    pub terms: Vec<(Var, i128)>,
    pub constant: i128,
}

impl IntForm {
    pub fn evaluate(&self, values: &[i128]) -> Option<i128> {
        let mut acc = self.constant;
        for &(v, c) in &self.terms {
            acc = acc.checked_add(c.checked_mul(values[v])?)?;
        }
        Some(acc)
    }
}

/// Outcome of reducing a form to the free variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduced {
    /// Vanishes for every assignment.
    Zero,
    /// A nonzero constant: holds for every assignment.
    Constant,
    Form(IntForm),
}

/// Value domain of a free variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Domain {
    /// Values `offset + step * k`. Sliding variables share one counter: each
    /// takes the smallest admissible `k` among the `width` integers following
    /// the previous sliding variable's `k` (the first starts at `k = 1`).
    /// The width is the number of constraints plus one.
    Sliding { offset: i128, step: i128 },
    /// Integers in `[lo, hi]`, restricted to the variable's congruence class
    /// if it has one.
    Window { lo: i128, hi: i128 },
}

#[derive(Debug, Clone, Serialize)]
pub struct VarInfo {
    pub name: String,
    pub dependent: bool,
}

#[derive(Clone)]
struct Expansion {
    /// Terms scaled by the system denominator.
    terms: Vec<(Var, i128)>,
    constant: i128,
}

/// Terms and constant of a recorded constraint.
type Constraint = (Vec<(Var, i128)>, i128);

/// Accumulates variables, substitutions and nonzero constraints.
pub struct SystemBuilder {
    vars: Vec<VarInfo>,
    substitutions: BTreeMap<Var, LinearForm>,
    expansions: Vec<Expansion>,
    denominator: i128,
    frozen: bool,
    forms: Vec<IntForm>,
    seen: HashSet<IntForm>,
    congruences: BTreeMap<Var, (i128, i128)>,
    schedule: Vec<(Var, Domain)>,
    originals: Option<Vec<Constraint>>,
}

impl Default for SystemBuilder {
    fn default() -> Self {
        Self::new()
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

fn overflow(what: &str) -> Error {
    Error::Overflow(format!("{what} exceeds 128-bit range"))
}

impl SystemBuilder {
    pub fn new() -> Self {
        SystemBuilder {
            vars: Vec::new(),
            substitutions: BTreeMap::new(),
            expansions: Vec::new(),
            denominator: 1,
            frozen: false,
            forms: Vec::new(),
            seen: HashSet::new(),
            congruences: BTreeMap::new(),
            schedule: Vec::new(),
            originals: None,
        }
    }

    /// Records every original form alongside its reduction so that
    /// [`ConstraintSystem::assign`] can re-check them numerically.
    pub fn keep_originals(&mut self) {
        self.originals = Some(Vec::new());
    }

    pub fn free_var(&mut self, name: impl Into<String>) -> Var {
        assert!(!self.frozen, "variables must be declared before constraints");
        self.vars.push(VarInfo {
            name: name.into(),
            dependent: false,
        });
        self.vars.len() - 1
    }

    /// Declares `v = (sum(terms) + constant) / divisor` over free variables.
    pub fn dependent_var(
        &mut self,
        name: impl Into<String>,
        terms: &[(Var, i128)],
        constant: i128,
        divisor: i128,
    ) -> Result<Var> {
        assert!(!self.frozen, "variables must be declared before constraints");
        if divisor == 0 {
            return Err(Error::Invariant("zero divisor in substitution".into()));
        }
        for &(t, _) in terms {
            if self.vars.get(t).is_none_or(|info| info.dependent) {
                return Err(Error::Invariant(format!(
                    "substitution body refers to non-free variable {t}"
                )));
            }
        }
        self.vars.push(VarInfo {
            name: name.into(),
            dependent: true,
        });
        let v = self.vars.len() - 1;
        let inv = BigRational::new(BigInt::one(), BigInt::from(divisor));
        let mut body = LinearForm::zero();
        body.add_scaled(&LinearForm::from_ints(terms, constant), &inv);
        self.substitutions.insert(v, body);
        self.denominator = self.denominator.lcm(&divisor.abs());
        Ok(v)
    }

    pub fn set_congruence(&mut self, v: Var, residue: i128, modulus: i128) {
        let m = modulus.abs();
        if m > 1 {
            self.congruences.insert(v, (residue.rem_euclid(m), m));
        }
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn is_dependent(&self, v: Var) -> bool {
        self.vars[v].dependent
    }

    pub fn substitutions(&self) -> &BTreeMap<Var, LinearForm> {
        &self.substitutions
    }

    fn freeze(&mut self) -> Result<()> {
        if self.frozen {
            return Ok(());
        }
        let d = self.denominator;
        let mut exps = Vec::with_capacity(self.vars.len());
        for (v, info) in self.vars.iter().enumerate() {
            if !info.dependent {
                exps.push(Expansion {
                    terms: vec![(v, d)],
                    constant: 0,
                });
                continue;
            }
            let body = &self.substitutions[&v];
            let scale = rat(d);
            let to_int = |c: &BigRational| -> Result<i128> {
                let x = c * &scale;
                debug_assert!(x.is_integer());
                x.to_integer().to_i128().ok_or_else(|| overflow("substitution"))
            };
            let terms = body
                .terms
                .iter()
                .map(|(&t, c)| Ok((t, to_int(c)?)))
                .collect::<Result<Vec<_>>>()?;
            exps.push(Expansion {
                terms,
                constant: to_int(&body.constant)?,
            });
        }
        self.expansions = exps;
        self.frozen = true;
        Ok(())
    }

    /// A reducer usable from many threads at once.
    pub fn reducer(&mut self) -> Result<Reducer<'_>> {
        self.freeze()?;
        Ok(Reducer {
            expansions: &self.expansions,
            denominator: self.denominator,
        })
    }

    /// Reduces `sum(terms) + constant` and, unless it is constant, records it
    /// as a nonzero requirement. Returns the reduction outcome.
    pub fn require_nonzero(&mut self, terms: &[(Var, i128)], constant: i128) -> Result<Reduced> {
        let reduced = self.reducer()?.reduce(terms, constant)?;
        if let Reduced::Form(f) = &reduced {
            if let Some(orig) = self.originals.as_mut() {
                orig.push((terms.to_vec(), constant));
            }
            self.insert(f.clone());
        }
        Ok(reduced)
    }

    /// Adds an already-reduced form (from [`Reducer::reduce`]).
    pub fn insert(&mut self, form: IntForm) {
        if self.seen.insert(form.clone()) {
            self.forms.push(form);
        }
    }

    pub fn form_count(&self) -> usize {
        self.forms.len()
    }

    pub fn schedule(&mut self, v: Var, domain: Domain) {
        self.schedule.push((v, domain));
    }

    pub fn build(mut self) -> Result<ConstraintSystem> {
        self.freeze()?;
        let mut scheduled = vec![false; self.vars.len()];
        for &(v, _) in &self.schedule {
            if self.vars[v].dependent || scheduled[v] {
                return Err(Error::Invariant(format!("variable {v} scheduled twice or dependent")));
            }
            scheduled[v] = true;
        }
        if let Some(v) = (0..self.vars.len()).find(|&v| !self.vars[v].dependent && !scheduled[v]) {
            return Err(Error::Invariant(format!("free variable {v} has no domain")));
        }
        Ok(ConstraintSystem {
            vars: self.vars,
            substitutions: self.substitutions,
            expansions: self.expansions,
            denominator: self.denominator,
            forms: self.forms,
            congruences: self.congruences,
            schedule: self.schedule,
            originals: self.originals.unwrap_or_default(),
        })
    }
}

/// Fast integer reducer borrowed from a frozen builder.
#[derive(Clone, Copy)]
pub struct Reducer<'a> {
    expansions: &'a [Expansion],
    denominator: i128,
}

impl Reducer<'_> {
    /// Reduces `sum(terms) + constant` to a primitive integer form over free
    /// variables.
    pub fn reduce(&self, terms: &[(Var, i128)], constant: i128) -> Result<Reduced> {
        Ok(self.reduce_scaled(terms, constant)?.0)
    }

    /// Like [`reduce`](Self::reduce), also returning `s` such that
    /// `denominator * original = s * reduced` for every consistent assignment.
    pub fn reduce_scaled(&self, terms: &[(Var, i128)], constant: i128) -> Result<(Reduced, i128)> {
        let mut acc: Vec<(Var, i128)> = Vec::with_capacity(terms.len() * 2);
        let mut k = constant
            .checked_mul(self.denominator)
            .ok_or_else(|| overflow("form constant"))?;
        for &(v, c) in terms {
            debug_assert!(v < self.expansions.len());
            let e = &self.expansions[v];
            k = c
                .checked_mul(e.constant)
                .and_then(|x| k.checked_add(x))
                .ok_or_else(|| overflow("form constant"))?;
            for &(t, x) in &e.terms {
                let add = c.checked_mul(x).ok_or_else(|| overflow("form coefficient"))?;
                match acc.iter_mut().find(|(u, _)| *u == t) {
                    Some(slot) => {
                        slot.1 = slot.1.checked_add(add).ok_or_else(|| overflow("form coefficient"))?
                    }
                    None => acc.push((t, add)),
                }
            }
        }
        acc.retain(|&(_, c)| c != 0);
        if acc.is_empty() {
            let r = if k == 0 { Reduced::Zero } else { Reduced::Constant };
            return Ok((r, 1));
        }
        acc.sort_unstable_by_key(|&(v, _)| v);
        let g = acc.iter().fold(k.abs(), |g, &(_, c)| gcd(g, c));
        let s = if acc[0].1 < 0 { -g } else { g };
        let f = IntForm {
            terms: acc.into_iter().map(|(v, c)| (v, c / s)).collect(),
            constant: k / s,
        };
        Ok((Reduced::Form(f), s))
    }
}

/// A finished system: ready to assign, inspect or dump.
#[derive(Serialize)]
pub struct ConstraintSystem {
    vars: Vec<VarInfo>,
    #[serde(serialize_with = "ser_subs")]
    substitutions: BTreeMap<Var, LinearForm>,
    #[serde(skip)]
    expansions: Vec<Expansion>,
    denominator: i128,
    #[serde(rename = "nonzero_forms")]
    forms: Vec<IntForm>,
    congruences: BTreeMap<Var, (i128, i128)>,
    schedule: Vec<(Var, Domain)>,
    #[serde(skip)]
    originals: Vec<Constraint>,
}

fn ser_subs<S: serde::Serializer>(
    subs: &BTreeMap<Var, LinearForm>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(subs.len()))?;
    for (v, f) in subs {
        let terms: Vec<(Var, String)> = f.terms.iter().map(|(t, c)| (*t, c.to_string())).collect();
        map.serialize_entry(v, &serde_json::json!({"terms": terms, "constant": f.constant.to_string()}))?;
    }
    map.end()
}

/// Values for every variable plus bookkeeping from the greedy pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub values: Vec<i128>,
    /// Number of distinct nonzero constraints (the `M` of the width `M + 1`).
    pub constraint_count: usize,
    /// Largest sliding multiplier used.
    pub max_multiplier: i128,
    /// Original forms re-evaluated against their reductions.
    pub soundness_checks: usize,
}

impl ConstraintSystem {
    pub fn form_count(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[IntForm] {
        &self.forms
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn substitutions(&self) -> &BTreeMap<Var, LinearForm> {
        &self.substitutions
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("system serializes")
    }

    pub fn reducer(&self) -> Reducer<'_> {
        Reducer {
            expansions: &self.expansions,
            denominator: self.denominator,
        }
    }

    /// The common denominator `D` used by [`Reducer::reduce_scaled`].
    pub fn denominator(&self) -> i128 {
        self.denominator
    }

    /// Greedy first-fit assignment in schedule order.
    pub fn assign(&self) -> Result<Assignment> {
        let n = self.vars.len();
        let mut position = vec![usize::MAX; n];
        for (i, &(v, _)) in self.schedule.iter().enumerate() {
            position[v] = i;
        }
        // bucket each form under its last-scheduled variable
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, f) in self.forms.iter().enumerate() {
            let last = f
                .terms
                .iter()
                .map(|&(v, _)| v)
                .max_by_key(|&v| position[v])
                .expect("forms have terms");
            buckets[last].push(i);
        }
        let width = self.forms.len() as i128 + 1;
        let mut values = vec![0i128; n];
        let mut k_prev: i128 = 0;
        let mut max_k: i128 = 0;
        for &(v, ref domain) in &self.schedule {
            let mut forbidden: Vec<i128> = Vec::new();
            for &fi in &buckets[v] {
                let f = &self.forms[fi];
                let mut coef = 0;
                let mut rest = f.constant;
                for &(t, c) in &f.terms {
                    if t == v {
                        coef = c;
                    } else {
                        rest = c
                            .checked_mul(values[t])
                            .and_then(|x| rest.checked_add(x))
                            .ok_or_else(|| overflow("constraint evaluation"))?;
                    }
                }
                if rest % coef == 0 {
                    forbidden.push(-rest / coef);
                }
            }
            forbidden.sort_unstable();
            forbidden.dedup();
            let congruence = self.congruences.get(&v).copied();
            let chosen = match *domain {
                Domain::Sliding { offset, step } => {
                    let mut bad_k: Vec<i128> = forbidden
                        .iter()
                        .filter_map(|&x| {
                            let d = x - offset;
                            (d % step == 0).then_some(d / step)
                        })
                        .filter(|&k| k > k_prev && k <= k_prev + width)
                        .collect();
                    bad_k.sort_unstable();
                    let mut k = k_prev + 1;
                    for b in bad_k {
                        if b == k {
                            k += 1;
                        } else if b > k {
                            break;
                        }
                    }
                    if k > k_prev + width {
                        return Err(Error::DomainExhausted(v as u32));
                    }
                    k_prev = k;
                    max_k = max_k.max(k);
                    offset + step * k
                }
                Domain::Window { lo, hi } => {
                    let (res, m) = congruence.unwrap_or((0, 1));
                    let mut x = lo + (res - lo).rem_euclid(m);
                    loop {
                        if x > hi {
                            return Err(Error::DomainExhausted(v as u32));
                        }
                        if forbidden.binary_search(&x).is_err() {
                            break x;
                        }
                        x += m;
                    }
                }
            };
            if let Some((res, m)) = congruence {
                if chosen.rem_euclid(m) != res {
                    return Err(Error::Invariant(format!(
                        "variable {v} = {chosen} misses congruence {res} mod {m}"
                    )));
                }
            }
            values[v] = chosen;
        }
        let d = self.denominator;
        for (v, info) in self.vars.iter().enumerate() {
            if !info.dependent {
                continue;
            }
            let e = &self.expansions[v];
            let mut acc = e.constant;
            for &(t, c) in &e.terms {
                acc = c
                    .checked_mul(values[t])
                    .and_then(|x| acc.checked_add(x))
                    .ok_or_else(|| overflow("dependent value"))?;
            }
            if acc % d != 0 {
                return Err(Error::NonIntegral(v as u32));
            }
            values[v] = acc / d;
        }
        for f in &self.forms {
            if f.evaluate(&values) == Some(0) {
                return Err(Error::Invariant("assigned values violate a constraint".into()));
            }
        }
        let reducer = Reducer {
            expansions: &self.expansions,
            denominator: d,
        };
        for (terms, constant) in &self.originals {
            let mut orig = *constant;
            for &(v, c) in terms {
                orig = c
                    .checked_mul(values[v])
                    .and_then(|x| orig.checked_add(x))
                    .ok_or_else(|| overflow("soundness check"))?;
            }
            let (reduced, s) = reducer.reduce_scaled(terms, *constant)?;
            let red = match reduced {
                Reduced::Form(f) => f.evaluate(&values).ok_or_else(|| overflow("soundness check"))?,
                _ => return Err(Error::Invariant("recorded form reduced to a constant".into())),
            };
            if orig.checked_mul(d) != red.checked_mul(s) {
                return Err(Error::Invariant("reduced form disagrees with original".into()));
            }
        }
        Ok(Assignment {
            values,
            constraint_count: self.forms.len(),
            max_multiplier: max_k,
            soundness_checks: self.originals.len(),
        })
    }

    /// Rebuilds every substitution as an exact rational form and checks it
    /// against the integer expansion used by the fast reducer.
    pub fn check_expansions(&self) -> bool {
        let d = rat(self.denominator);
        self.substitutions.iter().all(|(&v, body)| {
            let e = &self.expansions[v];
            let from_exp = LinearForm::from_ints(&e.terms, e.constant);
            let mut scaled = LinearForm::zero();
            scaled.add_scaled(body, &d);
            scaled == from_exp
        })
    }
}

/// Exact rational reduction followed by the same normalisation as the fast
/// path; used to cross-check [`Reducer::reduce`].
pub fn reduce_exact(
    terms: &[(Var, i128)],
    constant: i128,
    subs: &BTreeMap<Var, LinearForm>,
) -> Reduced {
    let r = reduce_form(&LinearForm::from_ints(terms, constant), subs);
    if r.terms.is_empty() {
        return if r.constant.is_zero() { Reduced::Zero } else { Reduced::Constant };
    }
    // clear denominators, then divide out the content
    let lcm = r
        .terms
        .values()
        .chain(std::iter::once(&r.constant))
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let scale = BigRational::from_integer(lcm);
    let ints: Vec<(Var, BigInt)> = r
        .terms
        .iter()
        .map(|(&v, c)| (v, (c * &scale).to_integer()))
        .collect();
    let k = (&r.constant * &scale).to_integer();
    let g = ints.iter().fold(k.abs(), |g, (_, c)| g.gcd(c));
    let sign = BigInt::from(if ints[0].1.is_negative() { -1 } else { 1 });
    let conv = |x: &BigInt| -> i128 { (x * &sign / &g).to_i128().expect("fits") };
    Reduced::Form(IntForm {
        terms: ints.iter().map(|(v, c)| (*v, conv(c))).collect(),
        constant: conv(&k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn reduce_form_examples() {
        let (x, w, y, y2) = (0, 1, 2, 3);
        let mut subs = BTreeMap::new();
        subs.insert(y, LinearForm::from_ints(&[(x, 1), (w, 1)], 0));
        let mut f = LinearForm::var(y);
        f.add_term(x, q(-1, 1));
        assert_eq!(reduce_form(&f, &subs), LinearForm::var(w));

        let mut half = BTreeMap::new();
        let mut body = LinearForm::zero();
        body.add_scaled(&LinearForm::from_ints(&[(x, 1), (w, 1)], 0), &q(1, 2));
        half.insert(y, body);
        let two_y = LinearForm::from_ints(&[(y, 2)], 0);
        assert_eq!(reduce_form(&two_y, &half), LinearForm::from_ints(&[(x, 1), (w, 1)], 0));

        subs.insert(y2, LinearForm::from_ints(&[(x, 1), (w, 1)], 0));
        let diff = LinearForm::from_ints(&[(y, 1), (y2, -1)], 0);
        assert!(is_identically_zero(&reduce_form(&diff, &subs)));
    }

    #[test]
    fn identically_zero() {
        assert!(LinearForm::zero().is_identically_zero());
        assert!(LinearForm::from_ints(&[(0, 1), (0, -1)], 0).is_identically_zero());
        assert!(!LinearForm::from_ints(&[(0, 1), (1, -1)], 0).is_identically_zero());
    }

    #[test]
    fn first_fit_single_variable() {
        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        b.schedule(x, Domain::Sliding { offset: 0, step: 1 });
        let a = b.build().unwrap().assign().unwrap();
        assert_eq!(a.values, vec![1]);
    }

    #[test]
    fn first_fit_avoids_forbidden_difference() {
        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        let w = b.free_var("W");
        b.require_nonzero(&[(w, 1), (x, -1)], 0).unwrap();
        b.schedule(x, Domain::Sliding { offset: 0, step: 1 });
        b.schedule(w, Domain::Sliding { offset: 0, step: 1 });
        let a = b.build().unwrap().assign().unwrap();
        assert_eq!(a.values, vec![1, 2]);

        // forbid W = 2 as well: W - 2X != 0 pushes W to 3
        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        let w = b.free_var("W");
        b.require_nonzero(&[(w, 1), (x, -1)], 0).unwrap();
        b.require_nonzero(&[(w, 1), (x, -2)], 0).unwrap();
        b.schedule(x, Domain::Sliding { offset: 0, step: 1 });
        b.schedule(w, Domain::Sliding { offset: 0, step: 1 });
        let a = b.build().unwrap().assign().unwrap();
        assert_eq!(a.values, vec![1, 3]);
    }

    #[test]
    fn window_with_congruence() {
        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        b.set_congruence(x, 2, 6);
        b.schedule(x, Domain::Window { lo: 10, hi: 20 });
        let sys = b.build().unwrap();
        assert_eq!(sys.assign().unwrap().values, vec![14]);

        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        b.set_congruence(x, 2, 6);
        b.require_nonzero(&[(x, 1)], -14).unwrap();
        b.schedule(x, Domain::Window { lo: 10, hi: 20 });
        assert_eq!(b.build().unwrap().assign().unwrap().values, vec![20]);

        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        b.set_congruence(x, 2, 6);
        b.require_nonzero(&[(x, 1)], -14).unwrap();
        b.require_nonzero(&[(x, 1)], -20).unwrap();
        b.schedule(x, Domain::Window { lo: 10, hi: 20 });
        assert_eq!(b.build().unwrap().assign(), Err(Error::DomainExhausted(0)));
    }

    #[test]
    fn dependent_values_and_soundness() {
        // Y = (X + W) / 2 with X, W even multiples
        let mut b = SystemBuilder::new();
        b.keep_originals();
        let x = b.free_var("X");
        let w = b.free_var("W");
        let y = b.dependent_var("Y", &[(x, 1), (w, 1)], 0, 2).unwrap();
        for (p, q) in [(x, w), (x, y), (w, y)] {
            b.require_nonzero(&[(p, 1), (q, -1)], 0).unwrap();
        }
        b.schedule(x, Domain::Sliding { offset: 0, step: 2 });
        b.schedule(w, Domain::Sliding { offset: 0, step: 2 });
        let sys = b.build().unwrap();
        assert!(sys.check_expansions());
        let a = sys.assign().unwrap();
        assert_eq!(a.values[y] * 2, a.values[x] + a.values[w]);
        assert_eq!(a.soundness_checks, 3);
        assert!(sys.to_json()["nonzero_forms"].is_array());
    }

    #[test]
    fn non_integral_dependent_is_reported() {
        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        let y = b.dependent_var("Y", &[(x, 1)], 0, 2).unwrap();
        b.schedule(x, Domain::Sliding { offset: 0, step: 1 });
        assert_eq!(b.build().unwrap().assign(), Err(Error::NonIntegral(y as u32)));
    }

    #[test]
    fn fast_and_exact_reduction_agree() {
        let mut b = SystemBuilder::new();
        let x = b.free_var("X");
        let w = b.free_var("W");
        let z = b.free_var("Z");
        let y = b.dependent_var("Y", &[(x, 1), (w, 2), (z, -3)], 5, 7).unwrap();
        let u = b.dependent_var("U", &[(x, 3)], -1, -2).unwrap();
        let subs = b.substitutions().clone();
        let r = b.reducer().unwrap();
        let cases: Vec<(Vec<(Var, i128)>, i128)> = vec![
            (vec![(y, 7), (x, -1)], 0),
            (vec![(y, 1), (u, 1)], 3),
            (vec![(u, 2), (x, 3)], -1),
            (vec![(y, 14), (w, -4), (z, 6), (x, -2)], -10),
        ];
        for (terms, k) in cases {
            assert_eq!(r.reduce(&terms, k).unwrap(), reduce_exact(&terms, k, &subs), "{terms:?}");
        }
    }
}
