mod common;

use std::collections::BTreeSet;

use common::*;
use lfree::eqmodel::is_trivial;
use lfree::gadgets::{self, BuildOptions};
use lfree::graphs::{self, generate, GraphKind};
use lfree::reductions::{self, digit_extract, forward_eval};
use lfree::{classify, oracle, standardize, Graph, LinearEquation, SearchConfig};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

fn coefficient() -> impl Strategy<Value = i64> {
    prop_oneof![-6i64..=-1, 1i64..=6]
}

fn homogeneous(max_len: usize) -> impl Strategy<Value = LinearEquation> {
    prop::collection::vec(coefficient(), 3..=max_len).prop_map(|c| LinearEquation::new(c, 0).unwrap())
}

fn small_set(max: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-20i64..=20, 0..=max).prop_map(|s| s.into_iter().collect())
}

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n, any::<u64>(), 0.0f64..=1.0)
        .prop_map(|(n, seed, p)| generate(&GraphKind::Random { n, p, seed }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn standard_form_maps_back(e in homogeneous(6)) {
        let sf = standardize(&e).unwrap();
        prop_assert_eq!(sf.original_coefficients(), e.coefficients().to_vec());
        let mut perm = sf.perm.clone();
        perm.sort_unstable();
        prop_assert_eq!(perm, (0..e.arity()).collect::<Vec<_>>());
    }

    #[test]
    fn constant_tuples_are_trivial_when_coefficients_cancel(
        c in prop::collection::vec(coefficient(), 2..=5),
        x in -50i64..50,
    ) {
        let mut c = c;
        let sum: i64 = c.iter().sum();
        if sum != 0 {
            c.push(-sum);
        }
        let e = LinearEquation::new(c, 0).unwrap();
        prop_assert!(e.is_translation_invariant());
        prop_assert!(is_trivial(&e, &vec![x; e.arity()]).unwrap());
    }

    #[test]
    fn inhomogeneous_solutions_are_never_trivial(
        c in prop::collection::vec(coefficient(), 2..=3),
        k in 1i64..=8,
        set in small_set(7),
    ) {
        let e = LinearEquation::new(c, k).unwrap();
        for sol in oracle::enumerate_solutions(&e, &set, &SearchConfig::default()).unwrap() {
            prop_assert!(!sol.trivial);
            prop_assert!(e.is_solution(&sol.tuple));
        }
    }

    #[test]
    fn classification_is_consistent(c in prop::collection::vec(coefficient(), 1..=5), k in -12i64..=12) {
        if let Ok(e) = LinearEquation::new(c.clone(), k) {
            let p = classify(&e);
            prop_assert!(c.iter().all(|x| x % p.gcd == 0));
            if let Some(x) = p.forbidden_singleton {
                prop_assert_eq!(p.coefficient_sum * x, k);
            }
        }
    }

    #[test]
    fn oracle_solutions_match_brute_force(
        c in prop::collection::vec(coefficient(), 3..=4),
        k in -3i64..=3,
        set in small_set(9),
    ) {
        if let Ok(e) = LinearEquation::new(c.clone(), k) {
            let cfg = SearchConfig::default();
            let lib: BTreeSet<Vec<i64>> = oracle::enumerate_nontrivial_solutions(&e, &set, &cfg)
                .unwrap()
                .into_iter()
                .map(|s| s.positions_support)
                .collect();
            prop_assert_eq!(lib, supports(&c, k, &set));
            prop_assert_eq!(oracle::is_free(&e, &set, &cfg).unwrap(), is_free(&c, k, &set));
        }
    }

    #[test]
    fn counting_methods_agree(c in prop::collection::vec(coefficient(), 3..=3), set in small_set(12)) {
        let e = LinearEquation::new(c.clone(), 0).unwrap();
        let cfg = SearchConfig::default();
        let rec = oracle::count_free_subsets(&e, &set, &cfg).unwrap();
        let enu = oracle::count_free_subsets_enumerate(&e, &set, &cfg).unwrap();
        prop_assert_eq!(&rec, &enu);
        prop_assert_eq!(rec, BigUint::from(count_free(&c, 0, &set)));
        let seq = oracle::count_free_subsets(&e, &set, &SearchConfig::sequential()).unwrap();
        prop_assert_eq!(seq, enu);
    }

    #[test]
    fn maximum_free_subset_is_exact(c in prop::collection::vec(coefficient(), 3..=4), set in small_set(15)) {
        let e = LinearEquation::new(c.clone(), 0).unwrap();
        let (size, witness) = oracle::max_free_subset(&e, &set, &SearchConfig::default()).unwrap();
        prop_assert_eq!(size, max_free(&c, 0, &set));
        prop_assert_eq!(witness.len(), size);
        prop_assert!(is_free(&c, 0, &witness));
    }

    #[test]
    fn freeness_is_avoiding_every_hyperedge(
        c in prop::collection::vec(coefficient(), 3..=3),
        set in small_set(10),
        pick in any::<u16>(),
    ) {
        let e = LinearEquation::new(c.clone(), 0).unwrap();
        let cfg = SearchConfig::default();
        let h = oracle::build_conflict_hypergraph(&e, &set, &cfg).unwrap();
        let sub: Vec<i64> = set.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, &x)| x).collect();
        prop_assert_eq!(h.is_independent(&sub), is_free(&c, 0, &sub));
    }

    #[test]
    fn graph_oracles_match_brute_force(g in graph(10)) {
        prop_assert_eq!(graphs::count_independent_sets(&g).unwrap(), count_independent(&g));
        prop_assert_eq!(graphs::max_independent_set(&g).unwrap().0, max_independent(&g));
    }

    #[test]
    fn gadgets_are_exact_on_random_graphs(e in homogeneous(4), g in graph(5)) {
        let gs = gadgets::build_homogeneous(&e, &g, BuildOptions::default()).unwrap();
        let lab = labels(&gs);
        let want: BTreeSet<Vec<i64>> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, &(v, w))| {
                let s: BTreeSet<i64> = [lab.vertex[v], lab.vertex[w]].into_iter().chain(lab.edge[i].clone()).collect();
                s.into_iter().collect()
            })
            .collect();
        prop_assert_eq!(supports(e.coefficients(), 0, &gs.elements), want);
        prop_assert_eq!(gs.len(), g.n() + (e.arity() - 2) * g.m());
        let b0 = gs.standard_form.as_ref().unwrap().b0.unsigned_abs() as u128;
        let bound = gs.params.label_count as u128 * (gs.params.constraint_count as u128 + 1) * b0;
        prop_assert!(gs.elements.iter().all(|x| x.unsigned_abs() as u128 <= bound));
        let again = gadgets::build_homogeneous(&e, &g, BuildOptions::sequential()).unwrap();
        prop_assert_eq!(gs, again);
    }

    #[test]
    fn digit_extraction_round_trips(
        z in prop::collection::vec(0u32..1000, 1..=8),
        den in 1u32..50,
        extra in 1u32..200,
    ) {
        let z: Vec<BigUint> = z.into_iter().map(BigUint::from).collect();
        let sum: BigUint = z.iter().sum();
        let num = BigInt::from(sum) * BigInt::from(den) + BigInt::from(extra);
        let p = BigRational::new(num, BigInt::from(den));
        let s = forward_eval(&p, &z);
        prop_assert_eq!(digit_extract(&p, z.len() - 1, &s).unwrap(), z);
    }

    #[test]
    fn epsilon_ceiling_identity(
        a in 1usize..40,
        k_frac in 0.0f64..=1.0,
        s in 2usize..8,
        sp_frac in 0.0f64..1.0,
        num in 1i64..20,
        gap in 1i64..20,
    ) {
        let k = (k_frac * a as f64) as usize;
        let sp = ((sp_frac * s as f64) as usize).min(s - 1);
        // an epsilon strictly between |S'|/|S| and 1
        let lo = BigRational::new(BigInt::from(sp), BigInt::from(s));
        let eps = &lo + (BigRational::from_integer(1.into()) - &lo)
            * BigRational::new(BigInt::from(num), BigInt::from(num + gap));
        let (r, k_star, a_star, t) = reductions::epsilon_parameters(a, k, s, sp, &eps).unwrap();
        prop_assert_eq!(k_star, k + r * sp);
        prop_assert_eq!(a_star, a + r * s);
        let b = BigRational::from_integer(BigInt::from(a_star + t));
        let ceil = (&eps * b).ceil().to_integer();
        prop_assert_eq!(ceil, BigInt::from(k_star + t));
    }

    #[test]
    fn repair_keeps_size_and_covers_edge_labels(g in graph(4), pick in any::<u32>()) {
        let e = eq(&[1, 1, -1], 0);
        let gs = gadgets::build_homogeneous(&e, &g, BuildOptions::default()).unwrap();
        let masks = conflict_masks(&[1, 1, -1], 0, &gs.elements);
        let mut s = pick as u64 & ((1u64 << gs.len()) - 1);
        for &m in &masks {
            if s & m == m {
                s &= !(1 << m.trailing_zeros());
            }
        }
        let b: Vec<i64> = (0..gs.len()).filter(|i| s >> i & 1 == 1).map(|i| gs.elements[i]).collect();
        let out = reductions::repair_to_edge_superset(&gs, &b, &SearchConfig::default()).unwrap();
        prop_assert!(out.len() >= b.len());
        prop_assert!(gs.a_e().iter().all(|y| out.contains(y)));
        prop_assert!(is_free(&[1, 1, -1], 0, &out));
    }
}

#[test]
fn path_counts_follow_fibonacci() {
    let (mut a, mut b) = (BigUint::from(1u8), BigUint::from(2u8));
    for n in 0..=10 {
        let g = generate(&GraphKind::Path(n));
        assert_eq!(graphs::count_independent_sets(&g).unwrap(), a, "P{n}");
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
}
