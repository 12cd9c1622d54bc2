//! Gadgets for inhomogeneous equations `c_1 x_1 + ... + c_l x_l = K`, K != 0.
//!
//! Vertices come from a partition into three independent sets V1, V2, V3,
//! and a vertex in Vj plays the role of `x_j`. For an edge between Vi and Vj
//! the dependent label takes the third position. All labels of position `i`
//! lie in one residue class `K' q_i` modulo `|c1 c2 c3|`, where
//! `sum c_i q_i = gcd` and `K = K' gcd`, which keeps dependents integral.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::eqmodel::{classify, LinearEquation};
use crate::error::{Error, Result};
use crate::graphs::{find_partition, Graph, VertexPartition};
use crate::labeler::{Domain, SystemBuilder, Var};
use crate::oracle::{self, SearchConfig};

use super::{
    require_arity, role_map, to_i64, BuildOptions, Family, GadgetKind, GadgetParams, GadgetSet, InventoryItem,
    Role, SolutionFamily, Sym, WindowParams,
};

/// Returns `(g, q)` with `g = gcd(c) > 0` and `sum c_i q_i = g`, folding the
/// extended Euclidean algorithm from the left.
pub fn bezout(c: &[i64]) -> (i64, Vec<i64>) {
    let mut g = c[0] as i128;
    let mut q: Vec<i128> = vec![1];
    for &x in &c[1..] {
        let e = g.extended_gcd(&(x as i128));
        for v in q.iter_mut() {
            *v *= e.x;
        }
        q.push(e.y);
        g = e.gcd;
    }
    if g < 0 {
        g = -g;
        for v in q.iter_mut() {
            *v = -*v;
        }
    }
    (g as i64, q.into_iter().map(|v| v as i64).collect())
}

pub(crate) struct InhSlot {
    pub edge: usize,
    pub v: usize,
    pub w: usize,
    pub pv: usize,
    pub pw: usize,
    pub third: usize,
    pub free: Vec<Var>,
    pub dep: Var,
}

pub(crate) struct InhCore {
    pub values: Vec<i64>,
    pub vertex_vars: Vec<Var>,
    pub slots: Vec<InhSlot>,
    pub partition: VertexPartition,
    pub params: GadgetParams,
}

impl InhCore {
    pub(crate) fn edge_tuple(&self, slot: &InhSlot, l: usize) -> Vec<i64> {
        let mut t = vec![0; l];
        t[slot.pv] = self.values[self.vertex_vars[slot.v]];
        t[slot.pw] = self.values[self.vertex_vars[slot.w]];
        t[slot.third] = self.values[slot.dep];
        for (i, &y) in slot.free.iter().enumerate() {
            t[3 + i] = self.values[y];
        }
        t
    }
}

fn ceil(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

fn floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| Error::Overflow(format!("{x} exceeds 128 bits")))
}

fn rat(x: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Centres `m_i` with `sum c_i m_i = K` and every `m_i >= T`, where
/// `T = floor(R) + 1` and `R = (|K| + radius * sum|c|) / min|c|`. Returns
/// `(centres, R, T)`.
fn window_centres(c: &[i64], k: i64, radius: i128) -> (Vec<BigRational>, BigRational, BigInt) {
    let sum_abs: i128 = c.iter().map(|x| x.unsigned_abs() as i128).sum();
    let min_abs = c.iter().map(|x| x.unsigned_abs() as i128).min().unwrap_or(1);
    let reach = BigRational::new(
        BigInt::from(k.unsigned_abs() as i128 + radius * sum_abs),
        BigInt::from(min_abs),
    );
    let t: BigInt = floor(&reach) + 1;
    let big_i = (0..c.len())
        .filter(|&i| c[i] < 0)
        .max_by_key(|&i| (c[i].unsigned_abs(), std::cmp::Reverse(i)))
        .expect("mixed signs");
    let big_j = (0..c.len())
        .filter(|&i| c[i] > 0)
        .max_by_key(|&i| (c[i], std::cmp::Reverse(i)))
        .expect("mixed signs");
    let mut m: Vec<BigRational> = vec![BigRational::zero(); c.len()];
    let mut rest = BigInt::zero();
    for i in 0..c.len() {
        if i != big_i && i != big_j {
            let mi = &t + BigInt::from(i);
            rest += BigInt::from(c[i]) * &mi;
            m[i] = BigRational::from_integer(mi);
        }
    }
    let ci = BigInt::from(c[big_i]);
    let cj = BigInt::from(c[big_j]);
    let kk = BigInt::from(k);
    let need = BigRational::new(&t * &cj - &kk + &rest, ci.abs());
    let mi = ceil(&need).max(t.clone());
    m[big_j] = BigRational::new(&kk - &rest - &ci * &mi, cj);
    m[big_i] = BigRational::from_integer(mi);
    (m, reach, t)
}

pub(crate) fn inhomogeneous_core(
    eq: &LinearEquation,
    g: &Graph,
    partition: &VertexPartition,
    s_prime: &[i64],
    opts: BuildOptions,
) -> Result<InhCore> {
    if eq.is_homogeneous() {
        return Err(Error::Homogeneous);
    }
    require_arity(eq, 3)?;
    partition.validate(g)?;
    let partition = partition.as_three();
    let c = eq.coefficients();
    let k = eq.constant();
    let l = c.len();
    let profile = classify(eq);
    if k % profile.gcd != 0 {
        return Err(Error::GcdDoesNotDivide {
            gcd: profile.gcd,
            constant: k,
        });
    }
    let cfg = SearchConfig {
        parallel: opts.parallel,
        ..Default::default()
    };
    let s_prime = oracle::normalize_set(s_prime);
    if !oracle::is_free(eq, &s_prime, &cfg)? {
        return Err(Error::Precondition("S' is not free".into()));
    }
    let (gcd, q) = bezout(c);
    let k_red = (k / gcd) as i128;
    let modulus = (c[0] as i128 * c[1] as i128 * c[2] as i128).abs();
    let residues: Vec<i128> = q.iter().map(|&x| (k_red * x as i128).rem_euclid(modulus)).collect();

    let mut b = SystemBuilder::new();
    let mut vertex_vars = vec![0; g.n()];
    let part: Vec<usize> = (0..g.n())
        .map(|v| partition.part_of(v).expect("validated partition"))
        .collect();
    for &v in g.order() {
        vertex_vars[v] = b.free_var(format!("x{v}"));
        b.set_congruence(vertex_vars[v], residues[part[v]], modulus);
    }
    let mut slots = Vec::new();
    for (e, &(v, w)) in g.edges().iter().enumerate() {
        let (pv, pw) = (part[v], part[w]);
        let third = 3 - pv - pw;
        let free: Vec<Var> = (1..=l - 3)
            .map(|i| {
                let y = b.free_var(format!("y{e}.{i}"));
                b.set_congruence(y, residues[2 + i], modulus);
                y
            })
            .collect();
        let mut terms = vec![(vertex_vars[v], -(c[pv] as i128)), (vertex_vars[w], -(c[pw] as i128))];
        terms.extend(free.iter().enumerate().map(|(i, &y)| (y, -(c[3 + i] as i128))));
        let dep = b.dependent_var(format!("y{e}.0"), &terms, k as i128, c[third] as i128)?;
        slots.push(InhSlot {
            edge: e,
            v,
            w,
            pv,
            pw,
            third,
            free,
            dep,
        });
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

    let var_alphabet: Vec<Sym> = (0..n_vars).map(Sym::Var).collect();
    let mut alphabet = var_alphabet.clone();
    alphabet.extend(s_prime.iter().map(|&s| Sym::Const(s as i128)));
    let distinct_skip = |seq: &[usize], _: &[(Var, i128)], _: i128| seq[0] >= seq[1];
    let main_skip = |seq: &[usize], _: &[(Var, i128)], _: i128| {
        if seq.iter().all(|&i| i >= n_vars) {
            return true;
        }
        if seq.iter().any(|&i| i >= n_vars) {
            return false;
        }
        let Some(s) = seq.iter().map(|&y| slot_of[y]).find(|&s| s != usize::MAX) else {
            return false;
        };
        let mut vars = seq.to_vec();
        vars.sort_unstable();
        vars.dedup();
        vars == edge_sets[s]
    };
    let pair = [1i64, -1];
    let families = [
        Family {
            alphabet: &var_alphabet,
            coefs: &pair,
            constant: 0,
            skip: &distinct_skip,
        },
        Family {
            alphabet: &alphabet,
            coefs: c,
            constant: -(k as i128),
            skip: &main_skip,
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
    let m = b.form_count() as i128;
    let free_count = (n_vars - slots.len()) as i128;
    let sum_abs: i128 = c.iter().map(|x| x.unsigned_abs() as i128).sum();
    let min_abs = c.iter().map(|x| x.unsigned_abs() as i128).min().unwrap_or(1);

    let mut window = None;
    let bound;
    let domain_of: Box<dyn Fn(usize) -> Result<Domain>> = if eq.all_same_sign() {
        let free_bound = modulus * (free_count * (m + 1) + 1);
        bound = free_bound.max(Integer::div_ceil(&(k.unsigned_abs() as i128 + sum_abs * free_bound), &min_abs));
        let residues = residues.clone();
        Box::new(move |pos| {
            Ok(Domain::Sliding {
                offset: residues[pos],
                step: modulus,
            })
        })
    } else {
        let radius = (m + 1) * modulus / 2 + 1;
        let (centres, reach, threshold) = window_centres(c, k, radius);
        let top = centres.iter().max().expect("nonempty") + &reach;
        bound = to_i128(&ceil(&top))?;
        window = Some(WindowParams {
            radius,
            reach: reach.to_string(),
            threshold: to_i128(&threshold)?,
            centres: centres.iter().map(|x| x.to_string()).collect(),
        });
        let r = rat(radius);
        let spans = centres
            .iter()
            .map(|mi| Ok((to_i128(&ceil(&(mi - &r)))?, to_i128(&floor(&(mi + &r)))?)))
            .collect::<Result<Vec<_>>>()?;
        Box::new(move |pos| {
            let (lo, hi) = spans[pos];
            Ok(Domain::Window { lo, hi })
        })
    };
    for &v in g.order() {
        b.schedule(vertex_vars[v], domain_of(part[v])?);
    }
    for slot in &slots {
        for (i, &y) in slot.free.iter().enumerate() {
            b.schedule(y, domain_of(3 + i)?);
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
    if let Some(big) = values.iter().find(|x| (x.unsigned_abs() as i128) > bound) {
        return Err(Error::Invariant(format!("label {big} exceeds the bound {bound}")));
    }
    if window.is_some() {
        if let Some(bad) = values.iter().find(|&&x| x <= 0) {
            return Err(Error::Invariant(format!("label {bad} is not positive")));
        }
    }
    Ok(InhCore {
        values,
        vertex_vars,
        slots,
        partition,
        params: GadgetParams {
            label_count: n_vars,
            constraint_count: asg.constraint_count,
            bound: Some(bound),
            modulus: Some(modulus as i64),
            bezout: Some(q),
            window,
            soundness_checks,
            ..Default::default()
        },
    })
}

impl InhCore {
    pub(crate) fn role_pairs(&self, n: usize) -> Vec<(i64, Role)> {
        let mut pairs: Vec<(i64, Role)> = (0..n)
            .map(|v| (self.values[self.vertex_vars[v]], Role::VertexLabel { vertex: v }))
            .collect();
        for slot in &self.slots {
            pairs.push((self.values[slot.dep], Role::EdgeLabel { edge: slot.edge, index: 0 }));
            for (i, &y) in slot.free.iter().enumerate() {
                pairs.push((
                    self.values[y],
                    Role::EdgeLabel {
                        edge: slot.edge,
                        index: i + 1,
                    },
                ));
            }
        }
        pairs
    }
}

/// Encodes a three-partite `g`: the non-trivial solutions in the result are
/// exactly the edge solutions, and adding `s_prime` creates no new ones.
/// Without a partition the first 3-colouring found is used.
pub fn build_inhomogeneous(
    eq: &LinearEquation,
    g: &Graph,
    partition: Option<&VertexPartition>,
    s_prime: &[i64],
    opts: BuildOptions,
) -> Result<GadgetSet> {
    let partition = match partition {
        Some(p) => p.clone(),
        None => find_partition(g, 3)?,
    };
    let core = inhomogeneous_core(eq, g, &partition, s_prime, opts)?;
    let (elements, roles) = role_map(core.role_pairs(g.n()))?;
    let inventory = core
        .slots
        .iter()
        .map(|slot| InventoryItem {
            family: SolutionFamily::Edge,
            edge: slot.edge,
            tuple: core.edge_tuple(slot, eq.arity()),
        })
        .collect();
    Ok(GadgetSet {
        kind: GadgetKind::Inhomogeneous,
        equation: eq.clone(),
        standard_form: None,
        graph: g.clone(),
        partition: Some(core.partition),
        elements,
        roles,
        inventory,
        s_prime: oracle::normalize_set(s_prime),
        params: core.params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate, GraphKind};

    #[test]
    fn bezout_identity() {
        for c in [vec![6, 10, 15], vec![-4, 6, 9, 2], vec![3, -3, 5]] {
            let (g, q) = bezout(&c);
            assert!(g > 0);
            assert_eq!(c.iter().zip(&q).map(|(a, b)| a * b).sum::<i64>(), g);
        }
    }

    #[test]
    fn centres_solve_the_equation() {
        let c = [2, -3, 1, -1];
        let (m, reach, t) = window_centres(&c, 5, 7);
        let total: BigRational = c.iter().zip(&m).map(|(&ci, mi)| mi * rat(ci as i128)).sum();
        assert_eq!(total, rat(5));
        let t = BigRational::from_integer(t);
        assert!(m.iter().all(|mi| *mi >= t));
        assert!(t > reach);
    }

    #[test]
    fn single_edge_mixed_signs() {
        let eq = LinearEquation::new(vec![1, 1, -1], 1).unwrap();
        let g = generate(&GraphKind::Path(2));
        let gs = build_inhomogeneous(&eq, &g, None, &[], BuildOptions::default()).unwrap();
        assert_eq!(gs.len(), 3);
        assert!(gs.elements.iter().all(|&x| x > 0));
        assert!(eq.is_solution(&gs.inventory[0].tuple));
    }

    #[test]
    fn gcd_must_divide_constant() {
        let eq = LinearEquation::new(vec![2, 4, -2], 3).unwrap();
        let g = generate(&GraphKind::Path(2));
        assert!(matches!(
            build_inhomogeneous(&eq, &g, None, &[], BuildOptions::default()),
            Err(Error::GcdDoesNotDivide { .. })
        ));
    }
}
