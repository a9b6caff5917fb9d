use std::sync::LazyLock;

use proptest::prelude::*;

use nilpotwist::catalog::{heisenberg, p4_catalog};
use nilpotwist::group::direct_product;
use nilpotwist::invariants::{derived_subgroup, exponent_of};
use nilpotwist::twist::{iterate_twist, twist};
use nilpotwist::{Element, Group};

static FIXTURES: LazyLock<Vec<Group>> = LazyLock::new(|| {
    let mut gs = p4_catalog(3).unwrap();
    gs.extend(p4_catalog(5).unwrap().into_iter().take(6));
    gs.push(heisenberg(3, 1).unwrap());
    gs.push(heisenberg(3, 2).unwrap());
    gs.push(direct_product(&heisenberg(3, 1).unwrap(), &heisenberg(5, 1).unwrap()));
    gs
});

fn pick(g: &Group, i: u64) -> Element {
    g.element_at((i % g.order()) as usize)
}

fn fixture_and_elements() -> impl Strategy<Value = (usize, u64, u64, u64)> {
    (0..FIXTURES.len(), any::<u64>(), any::<u64>(), any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn commutators_are_bilinear((gi, a, b, c) in fixture_and_elements(), k in -2i64..=6) {
        let g = &FIXTURES[gi];
        let (a, b, c) = (pick(g, a), pick(g, b), pick(g, c));
        prop_assert_eq!(
            g.commutator(&g.multiply(&a, &b), &c),
            g.multiply(&g.commutator(&a, &c), &g.commutator(&b, &c))
        );
        prop_assert_eq!(g.commutator(&g.power(&a, k), &b), g.power(&g.commutator(&a, &b), k));
        prop_assert_eq!(g.commutator(&a, &g.power(&b, k)), g.power(&g.commutator(&a, &b), k));
        prop_assert!(g.commutator(&g.commutator(&a, &b), &c).is_identity());
    }

    #[test]
    fn class_2_power_law((gi, a, b, _) in fixture_and_elements(), m in 0i64..=30) {
        let g = &FIXTURES[gi];
        let (a, b) = (pick(g, a), pick(g, b));
        let lhs = g.power(&g.multiply(&a, &b), m);
        let rhs = g.multiply(
            &g.multiply(&g.power(&a, m), &g.power(&b, m)),
            &g.power(&g.commutator(&b, &a), m * (m - 1) / 2),
        );
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplication_is_associative_and_orders_divide((gi, a, b, c) in fixture_and_elements()) {
        let g = &FIXTURES[gi];
        let (a, b, c) = (pick(g, a), pick(g, b), pick(g, c));
        prop_assert_eq!(g.multiply(&g.multiply(&a, &b), &c), g.multiply(&a, &g.multiply(&b, &c)));
        prop_assert_eq!(g.order() % g.element_order(&a), 0);
    }

    #[test]
    fn twisted_products_are_associative((gi, a, b, c) in fixture_and_elements(), n in -3i64..=12) {
        let g = &FIXTURES[gi];
        let s = twist(g, n).unwrap().into_group();
        let (a, b, c) = (pick(g, a), pick(g, b), pick(g, c));
        prop_assert_eq!(s.multiply(&s.multiply(&a, &b), &c), s.multiply(&a, &s.multiply(&b, &c)));
        prop_assert!(s.multiply(&a, &s.inverse(&a)).is_identity());
        prop_assert_eq!(s.element_order(&a), g.element_order(&a));
    }

    #[test]
    fn twists_are_periodic_in_the_derived_exponent((gi, a, b, _) in fixture_and_elements(), n in 0i64..=20) {
        let g = &FIXTURES[gi];
        let e = exponent_of(&derived_subgroup(g)) as i64;
        let (a, b) = (pick(g, a), pick(g, b));
        let s = twist(g, n).unwrap().into_group();
        let s2 = twist(g, n + e).unwrap().into_group();
        prop_assert_eq!(s.multiply(&a, &b), s2.multiply(&a, &b));
    }

    #[test]
    fn iteration_law_pointwise((gi, a, b, _) in fixture_and_elements(), n in 0i64..=5, i in 0u32..=6) {
        let g = &FIXTURES[gi];
        // Literal re-twisting tabulates every level; keep that to desk-sized groups.
        prop_assume!(g.order() <= 729);
        let (a, b) = (pick(g, a), pick(g, b));
        let mut literal = g.clone();
        for _ in 0..i {
            literal = twist(&literal, n).unwrap().into_group();
        }
        prop_assert_eq!(iterate_twist(g, n, i).unwrap().multiply(&a, &b), literal.multiply(&a, &b));
    }
}
