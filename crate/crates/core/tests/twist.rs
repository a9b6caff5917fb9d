use std::collections::BTreeMap;

use nilpotwist::catalog::{abelian_group, abelian_p_group, burnside_p4, heisenberg, p4_catalog, unitriangular, Which};
use nilpotwist::group::{build_pc_group, direct_product, verify_class_at_most_2};
use nilpotwist::invariants::{center, is_isomorphic, order_structure};
use nilpotwist::twist::{
    iterate_twist, s_of_i, s_of_i_mod, solve_right, string_of, sylow_decompose, twist, twist_with, twisted_multiply,
    twisted_multiply_conjugate_form, TwistMode,
};
use nilpotwist::{Element, Error, Group};
use num_bigint::BigUint;

fn e(v: &[u32]) -> Element {
    Element::from(v)
}

fn same_table(a: &Group, b: &Group) -> bool {
    *a.cayley_table() == *b.cayley_table()
}

#[test]
fn s_of_i_examples() {
    assert_eq!(s_of_i(7, 1), BigUint::from(7u32));
    assert_eq!(s_of_i(1, 2), BigUint::from(4u32));
    assert_eq!(s_of_i(2, 3), BigUint::from(62u32));
    assert_eq!(s_of_i(5, 0), BigUint::from(0u32));
    // Recurrence s(i+1) = (2 s(i) + 1) n + s(i), in big integers.
    for n in 0..8u64 {
        let mut s = BigUint::from(0u32);
        for i in 0..40 {
            assert_eq!(s_of_i(n, i), s);
            assert_eq!(s_of_i_mod(n, i, 81), u64::try_from(&s % 81u32).unwrap());
            s = (&s * 2u32 + 1u32) * n + &s;
        }
    }
}

#[test]
fn twisted_product_forms_agree() {
    let g = heisenberg(3, 1).unwrap();
    let (x, y) = (e(&[1, 0, 0]), e(&[0, 1, 0]));
    let z = g.commutator(&x, &y);
    let xy = twisted_multiply(&g, 1, &x, &y).unwrap();
    assert_eq!(xy, g.multiply(&g.multiply(&z, &x), &y));
    for a in g.elements() {
        for b in g.elements() {
            for n in -2..4 {
                assert_eq!(
                    twisted_multiply(&g, n, &a, &b).unwrap(),
                    twisted_multiply_conjugate_form(&g, n, &a, &b).unwrap()
                );
            }
            assert_eq!(twisted_multiply(&g, 0, &a, &b).unwrap(), g.multiply(&a, &b));
        }
    }
}

#[test]
fn abelian_twists_are_trivial() {
    let g = abelian_p_group(3, &[2, 1]).unwrap();
    for n in 0..5 {
        assert!(same_table(twist(&g, n).unwrap().group(), &g));
    }
}

#[test]
fn twist_periodicity() {
    let g = heisenberg(3, 1).unwrap();
    assert_eq!(twist(&g, 3).unwrap().n_effective(), 0);
    assert!(same_table(twist(&g, 3).unwrap().group(), twist(&g, 0).unwrap().group()));
    for w in Which::ALL {
        let g = burnside_p4(3, w).unwrap();
        let t = twist(&g, 0).unwrap();
        let e = t.derived_exponent() as i64;
        for n in -6..12 {
            let a = twist(&g, n).unwrap();
            assert_eq!(a.n_effective() as i64, n.rem_euclid(e));
            assert!(same_table(a.group(), twist(&g, n.rem_euclid(e)).unwrap().group()));
        }
    }
}

#[test]
fn twisting_a_by_one_abelianizes_it() {
    let a = burnside_p4(3, Which::A).unwrap();
    let t = twist(&a, 1).unwrap();
    assert!(t.group().is_abelian());
    let z27z3 = abelian_p_group(3, &[3, 1]).unwrap();
    let v = is_isomorphic(t.group(), &z27z3).unwrap();
    assert!(v.isomorphic);
    assert!(nilpotwist::invariants::verify_isomorphism(t.group(), &z27z3, &v.witness.unwrap()));
}

#[test]
fn iteration_law_small_cases() {
    let g = heisenberg(3, 1).unwrap();
    assert!(same_table(iterate_twist(&g, 1, 0).unwrap().group(), &g));
    assert!(same_table(iterate_twist(&g, 2, 1).unwrap().group(), twist(&g, 2).unwrap().group()));
    let literal = twist(twist(&g, 1).unwrap().group(), 1).unwrap();
    let closed = iterate_twist(&g, 1, 2).unwrap();
    assert_eq!(closed.n_effective(), 1);
    assert!(same_table(closed.group(), literal.group()));
}

#[test]
fn iteration_law_on_heisenberg_mod_9() {
    let g = heisenberg(3, 2).unwrap();
    for n in 1..=5 {
        let mut literal = g.clone();
        for i in 0..=6 {
            if i > 0 {
                literal = twist(&literal, n).unwrap().into_group();
            }
            assert!(same_table(iterate_twist(&g, n, i).unwrap().group(), &literal), "n={n} i={i}");
        }
    }
}

#[test]
fn twisted_commutator_is_a_power_of_the_base_commutator() {
    for w in Which::ALL {
        let g = burnside_p4(3, w).unwrap();
        for n in 0..4 {
            let s = twist(&g, n).unwrap().into_group();
            for x in g.elements() {
                for y in g.elements() {
                    let base = g.power(&g.commutator(&x, &y), 2 * n + 1);
                    assert_eq!(s.commutator(&x, &y), base);
                }
            }
        }
    }
}

#[test]
fn twists_keep_identity_inverses_orders_and_class() {
    for g in p4_catalog(3).unwrap().into_iter().chain([heisenberg(3, 1).unwrap()]) {
        for n in 0..4 {
            let s = twist(&g, n).unwrap().into_group();
            assert!(verify_class_at_most_2(&s), "{}", s.label());
            assert_eq!(order_structure(&s), order_structure(&g));
            for x in g.elements() {
                assert_eq!(s.element_order(&x), g.element_order(&x));
                assert_eq!(s.inverse(&x), g.inverse(&x));
                assert_eq!(s.multiply(&s.identity(), &x), x);
                for m in [2, 5, 9] {
                    assert_eq!(s.power(&x, m), g.power(&x, m));
                }
            }
        }
    }
}

#[test]
fn solve_right_is_unique() {
    let g = burnside_p4(3, Which::A).unwrap();
    let elems: Vec<Element> = g.elements().collect();
    for (ai, a) in elems.iter().enumerate().step_by(7) {
        for b in elems.iter().skip(ai % 5).step_by(11) {
            let x = solve_right(&g, 1, a, b).unwrap();
            assert_eq!(twisted_multiply(&g, 1, &x, a).unwrap(), *b);
            let hits = elems.iter().filter(|y| twisted_multiply(&g, 1, y, a).unwrap() == *b).count();
            assert_eq!(hits, 1);
        }
        assert!(solve_right(&g, 1, a, a).unwrap().is_identity());
        let inv = solve_right(&g, 1, a, &g.identity()).unwrap();
        assert!(twisted_multiply(&g, 1, &inv, a).unwrap().is_identity());
    }
}

#[test]
fn strict_mode_refuses_class_3() {
    let g = unitriangular(3, 4).unwrap();
    assert!(matches!(twist(&g, 1), Err(Error::NotClass2 { .. })));
    let t = twist_with(&g, 1, TwistMode::Unchecked).unwrap();
    assert_eq!(t.group().order(), 729);
    let x = g.element_at(1);
    assert!(matches!(twisted_multiply(&g, 1, &x, &x), Err(Error::NotClass2 { .. })));
}

#[test]
fn sylow_decomposition() {
    let h = heisenberg(3, 1).unwrap();
    let parts = sylow_decompose(&h).unwrap();
    assert_eq!(parts.len(), 1);
    assert!(parts[0].1.same_as(&h));

    let z15 = abelian_group(&BTreeMap::from([(3, vec![1]), (5, vec![1])])).unwrap();
    let parts = sylow_decompose(&z15).unwrap();
    assert_eq!(parts.iter().map(|(p, g)| (*p, g.order())).collect::<Vec<_>>(), vec![(3, 3), (5, 5)]);

    let hh = direct_product(&heisenberg(3, 1).unwrap(), &heisenberg(5, 1).unwrap());
    let parts = sylow_decompose(&hh).unwrap();
    assert_eq!(parts.iter().map(|(p, g)| (*p, g.order())).collect::<Vec<_>>(), vec![(3, 27), (5, 125)]);
    // Cross-check against the element-order sieve.
    for (p, sub) in &parts {
        let sieved = hh.elements().filter(|x| nilpotwist::arith::exact_log(*p, hh.element_order(x)).is_some()).count();
        assert_eq!(sieved as u64, sub.order());
    }
}

#[test]
fn sylow_sieve_on_a_table_group() {
    let z15 = abelian_group(&BTreeMap::from([(3, vec![1]), (5, vec![1])])).unwrap();
    let table = nilpotwist::group::build_table_group((*z15.cayley_table()).clone(), "Z15 table").unwrap();
    let parts = sylow_decompose(&table).unwrap();
    assert_eq!(parts.iter().map(|(p, g)| (*p, g.order())).collect::<Vec<_>>(), vec![(3, 3), (5, 5)]);
}

#[test]
fn strings() {
    let ab = abelian_p_group(3, &[2, 1]).unwrap();
    assert_eq!(string_of(&ab).unwrap().len(), 1);

    let a = burnside_p4(3, Which::A).unwrap();
    let s = string_of(&a).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s.last().is_abelian());
    assert_eq!(order_structure(s.last()), order_structure(&abelian_p_group(3, &[3, 1]).unwrap()));

    let h = heisenberg(3, 2).unwrap();
    let s = string_of(&h).unwrap();
    assert_eq!(s.len(), 3);
    let centers: Vec<u64> = s.terms().iter().map(|t| center(t).order()).collect();
    assert_eq!(centers, vec![9, 81, 729]);

    let even = abelian_group(&BTreeMap::from([(2, vec![1])])).unwrap();
    assert!(matches!(string_of(&even), Err(Error::EvenOrder(2))));
}

#[test]
fn mixed_prime_string_schedule() {
    let hh = direct_product(&heisenberg(3, 1).unwrap(), &heisenberg(5, 1).unwrap());
    let s = string_of(&hh).unwrap();
    assert_eq!(s.len(), 3);
    let sched: Vec<(u64, u64, u32)> = s.schedule().iter().map(|x| (x.p, x.n, x.t)).collect();
    assert_eq!(sched, vec![(3, 1, 1), (5, 2, 1)]);
    assert_eq!(s.levels(), &[vec![0, 0], vec![1, 0], vec![1, 1]]);
    let centers: Vec<u64> = s.terms().iter().map(|t| center(t).order()).collect();
    assert_eq!(centers, vec![15, 135, 3375]);
}

#[test]
fn twisted_presentation_is_isomorphic_to_the_wrapper() {
    for (g, n) in
        [(heisenberg(3, 1).unwrap(), 1), (burnside_p4(3, Which::B).unwrap(), 1), (heisenberg(3, 2).unwrap(), 2)]
    {
        let t = twist(&g, n).unwrap();
        let pres = t.to_presentation().unwrap();
        let native = build_pc_group(&pres).unwrap();
        assert_eq!(native.order(), g.order());
        assert!(is_isomorphic(&native, t.group()).unwrap().isomorphic, "{}", g.label());
    }
}
