mod common;

use std::collections::BTreeSet;

use common::*;
use lfree::gadgets::{self, BuildOptions, GadgetKind, MapKind, Role, SolutionFamily};
use lfree::graphs::{generate, GraphKind};
use lfree::{oracle, Graph, SearchConfig};

fn edge() -> Graph {
    generate(&GraphKind::Path(2))
}

fn opts() -> BuildOptions {
    BuildOptions::default()
}

fn sorted(xs: &[i64]) -> Vec<i64> {
    xs.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Supports of the inventory the builder claims.
fn claimed(gs: &gadgets::GadgetSet) -> BTreeSet<Vec<i64>> {
    gs.inventory.iter().map(|i| sorted(&i.tuple)).collect()
}

#[test]
fn homogeneous_single_edge() {
    let e = eq(&[1, 1, -1], 0);
    let gs = gadgets::build_homogeneous(&e, &edge(), opts()).unwrap();
    assert_eq!(gs.len(), 3);
    let xs = gs.vertex_labels();
    let y = gs.edge_labels(0)[0];
    assert_eq!(y, xs[0] + xs[1]);
    let want: BTreeSet<Vec<i64>> = [sorted(&[xs[0], xs[1], y])].into();
    assert_eq!(supports(&[1, 1, -1], 0, &gs.elements), want);
}

#[test]
fn homogeneous_empty_graph_is_free() {
    let gs = gadgets::build_homogeneous(&eq(&[1, 1, -1], 0), &generate(&GraphKind::Empty(3)), opts()).unwrap();
    assert_eq!(gs.len(), 3);
    assert!(is_free(&[1, 1, -1], 0, &gs.elements));
}

#[test]
fn same_sign_equations_need_negative_labels() {
    let gs = gadgets::build_homogeneous(&eq(&[1, 1, 1], 0), &edge(), opts()).unwrap();
    assert_eq!(gs.standard_form.as_ref().unwrap().b0, -1);
    assert!(gs.elements.iter().any(|&x| x < 0));
    assert_eq!(supports(&[1, 1, 1], 0, &gs.elements), claimed(&gs));
}

#[test]
fn mixed_signs_give_positive_labels() {
    for (c, k) in [(&[1, 1, -1][..], 0), (&[2, 3, -5], 0), (&[1, 1, 1, -1], 0), (&[1, 1, -1], 1)] {
        let e = eq(c, k);
        for g in corpus().iter().filter(|g| g.n() <= 4) {
            let gs = if k == 0 {
                gadgets::build_homogeneous(&e, g, opts()).unwrap()
            } else {
                match lfree::graphs::find_partition(g, 3) {
                    Ok(p) => gadgets::build_inhomogeneous(&e, g, Some(&p), &[], opts()).unwrap(),
                    Err(_) => continue,
                }
            };
            assert!(gs.elements.iter().all(|&x| x > 0), "{e} on {g}: {:?}", gs.elements);
        }
    }
}

#[test]
fn sef_examples() {
    let cfg = SearchConfig::default();
    let e = eq(&[1, 1, -2], 0);
    let gs = gadgets::build_homogeneous_sef(&e, &generate(&GraphKind::Path(3)), opts()).unwrap();
    assert!(oracle::is_proper_subequation_free(&e, &gs.elements, &cfg).unwrap());

    let e = eq(&[1, 1, -1], 0);
    let gs = gadgets::build_homogeneous_sef(&e, &edge(), opts()).unwrap();
    for mask in 1u32..7 {
        let sub: Vec<i64> = (0..3).filter(|p| mask >> p & 1 == 1).map(|p| [1, 1, -1][p]).collect();
        assert!(is_free(&sub, 0, &gs.elements), "{sub:?}");
    }
    let one = gadgets::build_homogeneous_sef(&e, &generate(&GraphKind::Empty(1)), opts()).unwrap();
    assert_eq!(one.len(), 1);
}

#[test]
fn inhomogeneous_examples() {
    let gs = gadgets::build_inhomogeneous(&eq(&[1, 1, -1], 1), &edge(), None, &[], opts()).unwrap();
    assert_eq!(gs.len(), 3);
    assert_eq!(supports(&[1, 1, -1], 1, &gs.elements), claimed(&gs));
    assert_eq!(claimed(&gs).len(), 1);

    let gs = gadgets::build_inhomogeneous(&eq(&[1, 1, 1], 6), &edge(), None, &[], opts()).unwrap();
    assert!(!gs.elements.contains(&2));
    assert_eq!(supports(&[1, 1, 1], 6, &gs.elements), claimed(&gs));

    let err = gadgets::build_inhomogeneous(&eq(&[2, 2, -2], 1), &edge(), None, &[], opts()).unwrap_err();
    assert!(matches!(err, lfree::Error::GcdDoesNotDivide { gcd: 2, constant: 1 }));
}

#[test]
fn inhomogeneous_with_free_extra_set() {
    let e = eq(&[1, 1, -1], 1);
    let s_prime = [1000, 1002];
    let gs = gadgets::build_inhomogeneous(&e, &generate(&GraphKind::Path(3)), None, &s_prime, opts()).unwrap();
    let mut both = gs.elements.clone();
    both.extend(s_prime);
    assert_eq!(supports(&[1, 1, -1], 1, &both), claimed(&gs));
}

#[test]
fn count3_single_edge() {
    for c in [[1, 1, -1], [1, 1, -2]] {
        let gs = gadgets::build_counting_l3(&eq(&c, 0), &edge(), 1, opts()).unwrap();
        assert_eq!(gs.len(), 5);
        let found = supports(&c, 0, &gs.elements);
        assert_eq!(found, claimed(&gs));
        assert_eq!(found.len(), 2);
        let fams: BTreeSet<_> = gs.inventory.iter().map(|i| i.family).collect();
        assert_eq!(fams, [SolutionFamily::Edge, SolutionFamily::U].into());
    }
}

#[test]
fn count3_without_copies_is_the_base_gadget() {
    let e = eq(&[1, 1, -1], 0);
    let gs = gadgets::build_counting_l3(&e, &edge(), 0, opts()).unwrap();
    assert!(gs.u_labels().is_empty());
    assert_eq!(gs.len(), 3);
    assert_eq!(supports(&[1, 1, -1], 0, &gs.elements), claimed(&gs));
}

#[test]
fn count4_sizes_and_inventory() {
    let e = eq(&[1, 1, 1, -1], 0);
    for (r, size) in [(1, 4), (2, 6)] {
        let gs = gadgets::build_counting_l4(&e, &edge(), r, opts()).unwrap();
        assert_eq!(gs.len(), size);
        let found = supports(&[1, 1, 1, -1], 0, &gs.elements);
        assert_eq!(found, claimed(&gs));
        assert_eq!(found.len(), r);
        assert!(!gs.params.special_case);
    }
    let gs = gadgets::build_counting_l4(&e, &generate(&GraphKind::Empty(3)), 2, opts()).unwrap();
    assert_eq!(gs.len(), 3);
    assert!(is_free(&[1, 1, 1, -1], 0, &gs.elements));
}

#[test]
fn count4_special_case_has_cross_copy_solutions() {
    let e = eq(&[1, -1, 1, -1], 0);
    let gs = gadgets::build_counting_l4(&e, &edge(), 2, opts()).unwrap();
    assert!(gs.params.special_case);
    assert!(gadgets::is_special(gs.standard_form.as_ref().unwrap()));
    let found = supports(&[1, -1, 1, -1], 0, &gs.elements);
    assert_eq!(found, claimed(&gs));
    assert!(gs.inventory.iter().any(|i| i.family == SolutionFamily::CrossCopy));
    let copies: BTreeSet<usize> = gs
        .roles
        .values()
        .filter_map(|r| match r {
            Role::EdgeLabelCopy { copy, .. } => Some(*copy),
            _ => None,
        })
        .collect();
    assert_eq!(copies, [1, 2].into());
}

#[test]
fn count_inhom_examples() {
    let gs = gadgets::build_counting_inhom(&eq(&[1, 1, -1], 1), &edge(), None, 1, opts()).unwrap();
    assert_eq!(gs.len(), 5);
    assert_eq!(gs.kind, GadgetKind::CountingInhom);
    assert_eq!(supports(&[1, 1, -1], 1, &gs.elements), claimed(&gs));
    assert_eq!(claimed(&gs).len(), 2);

    let gs = gadgets::build_counting_inhom(&eq(&[1, -1, 1], 2), &edge(), None, 1, opts()).unwrap();
    assert!(gs.elements.iter().all(|&x| x > 0));
    assert_eq!(supports(&[1, -1, 1], 2, &gs.elements), claimed(&gs));

    let gs = gadgets::build_counting_inhom(&eq(&[1, 1, -1], 1), &edge(), None, 0, opts()).unwrap();
    assert!(gs.u_labels().is_empty());
    assert_eq!(gs.len(), 3);
}

#[test]
fn builds_are_deterministic_and_mode_independent() {
    let g = generate(&GraphKind::Random { n: 5, p: 0.5, seed: 1 });
    let e = eq(&[2, 3, -5], 0);
    let a = gadgets::build_homogeneous_sef(&e, &g, BuildOptions::sequential()).unwrap();
    let b = gadgets::build_homogeneous_sef(&e, &g, opts()).unwrap();
    let c = gadgets::build_homogeneous_sef(&e, &g, opts()).unwrap();
    assert_eq!(a, b);
    assert_eq!(b.to_json(), c.to_json());
}

#[test]
fn shift_examples() {
    let cfg = SearchConfig::default();
    let e = eq(&[1, 1, -2], 0);
    assert_eq!(gadgets::shift_to_sef(&e, &[], &cfg).unwrap(), (1, vec![]));
    for s in [vec![1], vec![1, 3]] {
        let (alpha, shifted) = gadgets::shift_to_sef(&e, &s, &cfg).unwrap();
        assert!(alpha > 0);
        assert!(!shifted.contains(&0));
        for mask in 1u32..7 {
            let sub: Vec<i64> = (0..3).filter(|p| mask >> p & 1 == 1).map(|p| [1, 1, -2][p]).collect();
            assert!(is_free(&sub, 0, &shifted), "{sub:?} on {shifted:?}");
        }
        // alpha is the smallest shift that works
        for smaller in 1..alpha {
            let t: Vec<i64> = s.iter().map(|x| x + smaller).collect();
            let ok = !t.contains(&0)
                && (1u32..7).all(|mask| {
                    let sub: Vec<i64> = (0..3).filter(|p| mask >> p & 1 == 1).map(|p| [1, 1, -2][p]).collect();
                    is_free(&sub, 0, &t)
                });
            assert!(!ok, "shift {smaller} already works for {s:?}");
        }
    }
}

#[test]
fn extend_example() {
    let e = eq(&[1, 1, -1], 0);
    let (a, s, sp) = ([10, 11], [1, 2, 3], [2, 3]);
    let ext = gadgets::extend(&e, &a, &s, &sp, 1, 1, opts()).unwrap();
    assert_eq!(ext.kind, MapKind::Scale);
    assert_eq!(ext.b.len(), 2 + 3 + 1);
    let d = ext.d[0];
    assert_eq!(ext.images[0], vec![d, 2 * d, 3 * d]);
    assert!(ext.confirmed);
    let free_part = ext.free_part(&a, &s, &sp);
    assert_eq!(free_part.len(), 2 + 2 + 1);
    assert!(is_free(&[1, 1, -1], 0, &free_part));

    let same = gadgets::extend(&e, &a, &s, &sp, 0, 0, opts()).unwrap();
    assert_eq!(same.b, a.to_vec());
}
