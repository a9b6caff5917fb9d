//! Structural invariants and isomorphism testing.

mod fingerprint;
mod iso;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith;
use crate::error::{Error, Result};
use crate::group::{Element, Group};

pub use fingerprint::{fingerprint, Fingerprint};
pub use iso::{is_isomorphic, is_isomorphic_with, verify_isomorphism, IsoOptions, IsoVerdict};

/// Multiset of element orders, as `order -> count`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderStructure {
    counts: BTreeMap<u64, u64>,
}

impl OrderStructure {
    pub fn from_orders(orders: impl IntoIterator<Item = u64>) -> Self {
        let mut counts = BTreeMap::new();
        for o in orders {
            *counts.entry(o).or_insert(0) += 1;
        }
        OrderStructure { counts }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut counts = BTreeMap::new();
        for (o, c) in pairs {
            if c > 0 {
                *counts.entry(o).or_insert(0) += c;
            }
        }
        OrderStructure { counts }
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, order: u64) -> u64 {
        self.counts.get(&order).copied().unwrap_or(0)
    }

    /// Number of elements, i.e. the group order.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn exponent(&self) -> u64 {
        self.counts.keys().fold(1, |acc, &o| arith::lcm(acc, o))
    }

    /// Sorted `(order, count)` pairs.
    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.counts.iter().map(|(&o, &c)| (o, c)).collect()
    }

    /// Order structure of a direct product: orders combine by lcm.
    pub fn product(&self, other: &OrderStructure) -> OrderStructure {
        let mut counts = BTreeMap::new();
        for (&a, &ca) in &self.counts {
            for (&b, &cb) in &other.counts {
                *counts.entry(arith::lcm(a, b)).or_insert(0) += ca * cb;
            }
        }
        OrderStructure { counts }
    }

    /// `Z_n` has `φ(d)` elements of each order `d | n`.
    pub fn cyclic(n: u64) -> OrderStructure {
        let f = arith::factorize(n);
        let mut os = OrderStructure::from_pairs([(1, 1)]);
        for (p, e) in f {
            let mut part = vec![(1u64, 1u64)];
            let mut q = 1;
            for _ in 0..e {
                part.push((q * p, q * p - q));
                q *= p;
            }
            os = os.product(&OrderStructure::from_pairs(part));
        }
        os
    }
}

impl fmt::Display for OrderStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (o, c)) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{o}:{c}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for OrderStructure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for OrderStructure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(OrderStructure::from_pairs(Vec::<(u64, u64)>::deserialize(d)?))
    }
}

/// A subgroup stored as its elements in index order.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Group,
    elements: Vec<Element>,
    indices: Vec<usize>,
}

impl Subgroup {
    /// `elements` must be closed; they are sorted here.
    pub(crate) fn from_elements(parent: &Group, elements: Vec<Element>) -> Subgroup {
        let mut pairs: Vec<(usize, Element)> = elements.into_iter().map(|e| (parent.index_of(&e), e)).collect();
        pairs.sort_unstable_by_key(|(i, _)| *i);
        pairs.dedup_by_key(|(i, _)| *i);
        let (indices, elements) = pairs.into_iter().unzip();
        Subgroup { parent: parent.clone(), elements, indices }
    }

    pub fn parent(&self) -> &Group {
        &self.parent
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, a: &Element) -> bool {
        self.indices.binary_search(&self.parent.index_of(a)).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }

    /// Closed under products and inverses, contains the identity.
    pub fn is_closed(&self) -> bool {
        let g = &self.parent;
        self.contains(&g.identity())
            && self
                .elements
                .iter()
                .all(|a| self.contains(&g.inverse(a)) && self.elements.iter().all(|b| self.contains(&g.multiply(a, b))))
    }

    pub fn order_structure(&self) -> OrderStructure {
        OrderStructure::from_orders(self.elements.iter().map(|e| self.parent.element_order(e)))
    }

    /// The subgroup as a group in its own right, table-backed, with elements
    /// indexed in parent index order.
    pub fn to_group(&self, label: impl Into<String>) -> Group {
        let m = self.elements.len();
        let mut cells = Vec::with_capacity(m * m);
        for a in &self.elements {
            for b in &self.elements {
                let ab = self.parent.index_of(&self.parent.multiply(a, b));
                let pos = self.indices.binary_search(&ab).expect("subgroup is closed");
                cells.push(pos as u32);
            }
        }
        let t = crate::group::MultiplicationTable::from_raw(m, cells);
        Group::from_repr(label, crate::group::Repr::Table(std::sync::Arc::new(t)))
    }
}

/// `{x : x g = g x for all g}`, tested against a generating set.
pub fn center(g: &Group) -> Subgroup {
    let gens = g.generators();
    let elems = g.elements().filter(|x| gens.iter().all(|h| g.commutes(x, h))).collect();
    Subgroup::from_elements(g, elems)
}

/// Normal closure of the commutators of generator pairs.
pub fn derived_subgroup(g: &Group) -> Subgroup {
    let gens = g.generators();
    let mut seeds: Vec<Element> = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let c = g.commutator(a, b);
            if !c.is_identity() && !seeds.contains(&c) {
                seeds.push(c);
            }
        }
    }
    loop {
        let sub = Subgroup::from_elements(g, g.closure(&seeds));
        let escaped = sub
            .elements()
            .iter()
            .find_map(|s| gens.iter().map(|h| g.multiply(&g.multiply(&g.inverse(h), s), h)).find(|c| !sub.contains(c)));
        match escaped {
            Some(c) => seeds.push(c),
            None => return sub,
        }
    }
}

/// Lcm of element orders.
pub fn exponent_of(s: &Subgroup) -> u64 {
    s.elements().iter().fold(1, |acc, e| arith::lcm(acc, s.parent().element_order(e)))
}

pub fn order_structure(g: &Group) -> OrderStructure {
    if let Some(fs) = g.factors() {
        return fs.iter().fold(OrderStructure::from_pairs([(1, 1)]), |acc, f| acc.product(&order_structure(f)));
    }
    OrderStructure::from_orders(g.elements().map(|x| g.element_order(&x)))
}

/// Subgroup generated by all `p`-th powers.
pub fn pth_power_subgroup(g: &Group, p: u64) -> Subgroup {
    let powers = pth_powers(g, p);
    Subgroup::from_elements(g, g.closure(&powers))
}

/// The distinct `p`-th powers, in index order.
pub fn pth_powers(g: &Group, p: u64) -> Vec<Element> {
    let mut seen = vec![false; g.order() as usize];
    let mut out = Vec::new();
    for x in g.elements() {
        let y = g.power(&x, p as i64);
        let iy = g.index_of(&y);
        if !seen[iy] {
            seen[iy] = true;
            out.push(y);
        }
    }
    out.sort_by_key(|e| g.index_of(e));
    out
}

/// Elementary divisors `p^k` of a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AbelianType(pub Vec<u64>);

impl AbelianType {
    pub fn order(&self) -> u64 {
        self.0.iter().product()
    }

    pub fn order_structure(&self) -> OrderStructure {
        self.0.iter().fold(OrderStructure::from_pairs([(1, 1)]), |acc, &q| acc.product(&OrderStructure::cyclic(q)))
    }
}

impl fmt::Display for AbelianType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|q| format!("Z_{q}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// The abelian group with order structure `os`. Divisors are listed by
/// prime ascending, largest first within a prime.
///
/// Per prime `p`, the elements of order dividing `p^k` number `p^{Σ min(λ_i, k)}`
/// for partition `λ`, so successive ratios give the number of parts `>= k`.
pub fn abelian_type(os: &OrderStructure) -> Result<AbelianType> {
    let fail = |msg: String| Err(Error::NotAbelianRealizable(msg));
    let total = os.total();
    if os.count(1) != 1 {
        return fail(format!("{os} does not have exactly one element of order 1"));
    }
    let mut divisors = Vec::new();
    for (p, e) in arith::factorize(total) {
        let full = p.pow(e);
        let mut logs = vec![0u32];
        let mut q = 1u64;
        loop {
            q *= p;
            let n: u64 = (0..).map(|i| p.pow(i)).take_while(|&d| d <= q).map(|d| os.count(d)).sum();
            let Some(l) = arith::exact_log(p, n) else {
                return fail(format!("{n} elements of order dividing {q} is not a power of {p}"));
            };
            logs.push(l);
            if n == full {
                break;
            }
            if q > full {
                return fail(format!("{p}-part does not close up"));
            }
        }
        let ge: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        if ge.windows(2).any(|w| w[1] > w[0]) {
            return fail(format!("counts for prime {p} do not form a partition"));
        }
        for k in (1..=ge.len()).rev() {
            let next = ge.get(k).copied().unwrap_or(0);
            for _ in 0..ge[k - 1] - next {
                divisors.push(p.pow(k as u32));
            }
        }
    }
    let t = AbelianType(divisors);
    if &t.order_structure() != os {
        return fail(format!("{os} is not the order structure of {t}"));
    }
    Ok(t)
}
