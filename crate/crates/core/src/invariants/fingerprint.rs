use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{center, derived_subgroup, exponent_of, order_structure, pth_power_subgroup, OrderStructure};
use crate::arith;
use crate::group::Group;

/// Isomorphism invariants. Unequal fingerprints certify non-isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub group_order: u64,
    pub order_structure: OrderStructure,
    pub center_order: u64,
    pub center_order_structure: OrderStructure,
    pub derived_order: u64,
    pub derived_exponent: u64,
    /// Keyed by each prime dividing the order.
    pub pth_power_subgroup_order: BTreeMap<u64, u64>,
    pub derived_in_pth_power_subgroup: BTreeMap<u64, bool>,
    pub abelianization_order_structure: OrderStructure,
}

impl Fingerprint {
    /// Name of the first field where the two differ.
    pub fn first_difference(&self, other: &Fingerprint) -> Option<&'static str> {
        if self.group_order != other.group_order {
            Some("group_order")
        } else if self.order_structure != other.order_structure {
            Some("order_structure")
        } else if self.center_order != other.center_order {
            Some("center_order")
        } else if self.center_order_structure != other.center_order_structure {
            Some("center_order_structure")
        } else if self.derived_order != other.derived_order {
            Some("derived_order")
        } else if self.derived_exponent != other.derived_exponent {
            Some("derived_exponent")
        } else if self.pth_power_subgroup_order != other.pth_power_subgroup_order {
            Some("pth_power_subgroup_order")
        } else if self.derived_in_pth_power_subgroup != other.derived_in_pth_power_subgroup {
            Some("derived_in_pth_power_subgroup")
        } else if self.abelianization_order_structure != other.abelianization_order_structure {
            Some("abelianization_order_structure")
        } else {
            None
        }
    }
}

pub fn fingerprint(g: &Group) -> Fingerprint {
    let z = center(g);
    let d = derived_subgroup(g);
    let mut powers = BTreeMap::new();
    let mut contained = BTreeMap::new();
    for (p, _) in arith::factorize(g.order()) {
        let sub = pth_power_subgroup(g, p);
        powers.insert(p, sub.order());
        contained.insert(p, d.is_subset_of(&sub));
    }
    // Order of x modulo the derived subgroup: least divisor k of ord(x) with
    // x^k in D. Each coset is counted |D| times.
    let mut quotient = BTreeMap::<u64, u64>::new();
    for x in g.elements() {
        let ord = g.element_order(&x);
        let k = (1..=ord)
            .filter(|k| ord.is_multiple_of(*k))
            .find(|&k| d.contains(&g.power(&x, k as i64)))
            .expect("x^ord = 1 lies in D");
        *quotient.entry(k).or_insert(0) += 1;
    }
    let abelianization = OrderStructure::from_pairs(quotient.into_iter().map(|(k, c)| (k, c / d.order())));
    Fingerprint {
        group_order: g.order(),
        order_structure: order_structure(g),
        center_order: z.order(),
        center_order_structure: z.order_structure(),
        derived_order: d.order(),
        derived_exponent: exponent_of(&d),
        pth_power_subgroup_order: powers,
        derived_in_pth_power_subgroup: contained,
        abelianization_order_structure: abelianization,
    }
}
