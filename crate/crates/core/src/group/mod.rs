//! Concrete finite groups.
//!
//! A [`Group`] is an immutable, cheaply clonable handle. Elements are
//! normal-form exponent vectors ([`Element`]); every backend assigns each
//! element an index in `0..order` by mixed-radix reading of its exponent
//! vector, first coordinate most significant, so index order is the
//! lexicographic order of normal forms and the identity is always index 0.

mod pc;
mod table;

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::arith;

pub use pc::{build_pc_group, check_consistency, Consistency, ConsistencyOptions, PcPresentation, DEFAULT_SEED};
pub use table::{build_table_group, MultiplicationTable};

/// Normal-form exponent vector. Entry `i` lies in `0..r_i` where `r_i` is the
/// `i`-th modulus of the owning group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element {
    exps: SmallVec<[u32; 8]>,
}

impl Element {
    pub fn new(exps: impl IntoIterator<Item = u32>) -> Self {
        Element { exps: exps.into_iter().collect() }
    }

    pub fn identity(width: usize) -> Self {
        Element { exps: SmallVec::from_elem(0, width) }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    fn concat(parts: &[Element]) -> Element {
        Element { exps: parts.iter().flat_map(|p| p.exps.iter().copied()).collect() }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps.as_slice())
    }
}

impl From<Vec<u32>> for Element {
    fn from(v: Vec<u32>) -> Self {
        Element::new(v)
    }
}

impl From<&[u32]> for Element {
    fn from(v: &[u32]) -> Self {
        Element::new(v.iter().copied())
    }
}

/// Which realization sits behind a [`Group`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Polycyclic,
    Table,
    Product,
    Twisted,
}

#[derive(Clone)]
pub(crate) enum Repr {
    Pc(pc::PcGroup),
    Table(Arc<MultiplicationTable>),
    Product {
        factors: Vec<Group>,
        offsets: Vec<usize>,
    },
    /// Same element set as `base`, product `[x,y]^n x y`.
    Twisted {
        base: Group,
        n: u64,
    },
}

struct Inner {
    label: String,
    repr: Repr,
    order: u64,
    moduli: Vec<u32>,
    table: OnceLock<Arc<MultiplicationTable>>,
}

/// A realized finite group.
#[derive(Clone)]
pub struct Group {
    inner: Arc<Inner>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("label", &self.inner.label)
            .field("order", &self.inner.order)
            .field("backend", &self.backend())
            .finish()
    }
}

impl Group {
    pub(crate) fn from_repr(label: impl Into<String>, repr: Repr) -> Group {
        let (order, moduli) = match &repr {
            Repr::Pc(pc) => (pc.order(), pc.rel_orders().to_vec()),
            Repr::Table(t) => (t.size() as u64, vec![t.size() as u32]),
            Repr::Product { factors, .. } => (
                factors.iter().map(Group::order).product(),
                factors.iter().flat_map(|f| f.moduli().iter().copied()).collect(),
            ),
            Repr::Twisted { base, .. } => (base.order(), base.moduli().to_vec()),
        };
        Group { inner: Arc::new(Inner { label: label.into(), repr, order, moduli, table: OnceLock::new() }) }
    }

    /// The one-element group.
    pub fn trivial() -> Group {
        Group::from_repr("1", Repr::Table(Arc::new(MultiplicationTable::trivial())))
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// Same group under a different label.
    pub fn with_label(&self, label: impl Into<String>) -> Group {
        let g = Group::from_repr(label, self.inner.repr.clone());
        if let Some(t) = self.inner.table.get() {
            let _ = g.inner.table.set(t.clone());
        }
        g
    }

    pub fn order(&self) -> u64 {
        self.inner.order
    }

    /// Per-coordinate moduli of the exponent vectors.
    pub fn moduli(&self) -> &[u32] {
        &self.inner.moduli
    }

    pub fn backend(&self) -> Backend {
        match self.inner.repr {
            Repr::Pc(_) => Backend::Polycyclic,
            Repr::Table(_) => Backend::Table,
            Repr::Product { .. } => Backend::Product,
            Repr::Twisted { .. } => Backend::Twisted,
        }
    }

    /// The defining presentation, for polycyclic groups.
    pub fn presentation(&self) -> Option<&PcPresentation> {
        match &self.inner.repr {
            Repr::Pc(pc) => Some(pc.presentation()),
            _ => None,
        }
    }

    /// Direct factors, for product groups.
    pub fn factors(&self) -> Option<&[Group]> {
        match &self.inner.repr {
            Repr::Product { factors, .. } => Some(factors),
            _ => None,
        }
    }

    /// `(base, n)` for twisted groups.
    pub fn twist_of(&self) -> Option<(&Group, u64)> {
        match &self.inner.repr {
            Repr::Twisted { base, n } => Some((base, *n)),
            _ => None,
        }
    }

    /// Whether two handles refer to the same realized group.
    pub fn same_as(&self, other: &Group) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub fn identity(&self) -> Element {
        Element::identity(self.moduli().len())
    }

    pub fn is_valid(&self, a: &Element) -> bool {
        a.len() == self.moduli().len() && a.exps().iter().zip(self.moduli()).all(|(e, r)| e < r)
    }

    pub fn check_element(&self, a: &Element) -> crate::Result<()> {
        if self.is_valid(a) {
            Ok(())
        } else {
            Err(crate::Error::InvalidElement { group: self.label().to_string(), exps: a.exps().to_vec() })
        }
    }

    pub fn index_of(&self, a: &Element) -> usize {
        debug_assert!(self.is_valid(a), "{a:?} is not an element of {}", self.label());
        a.exps().iter().zip(self.moduli()).fold(0usize, |acc, (&e, &r)| acc * r as usize + e as usize)
    }

    pub fn element_at(&self, mut idx: usize) -> Element {
        let mods = self.moduli();
        let mut exps: SmallVec<[u32; 8]> = SmallVec::from_elem(0, mods.len());
        for (slot, &r) in exps.iter_mut().zip(mods).rev() {
            *slot = (idx % r as usize) as u32;
            idx /= r as usize;
        }
        Element { exps }
    }

    /// All elements in index (lexicographic normal-form) order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Element {
        match &self.inner.repr {
            Repr::Pc(pc) => pc.mul(a, b),
            Repr::Table(t) => Element::new([t.mul(a.exps()[0] as usize, b.exps()[0] as usize) as u32]),
            Repr::Product { factors, offsets } => {
                let parts: SmallVec<[Element; 4]> = factors
                    .iter()
                    .zip(offsets.windows(2))
                    .map(|(f, w)| f.multiply(&a.exps()[w[0]..w[1]].into(), &b.exps()[w[0]..w[1]].into()))
                    .collect();
                Element::concat(&parts)
            }
            Repr::Twisted { base, n } => {
                if *n == 0 {
                    return base.multiply(a, b);
                }
                if let Some(t) = base.cached_table() {
                    let (x, y) = (base.index_of(a), base.index_of(b));
                    return base.element_at(t.twisted_product(x, y, *n));
                }
                let c = base.power(&base.commutator(a, b), *n as i64);
                base.multiply(&base.multiply(&c, a), b)
            }
        }
    }

    pub fn inverse(&self, a: &Element) -> Element {
        match &self.inner.repr {
            Repr::Pc(pc) => pc.inverse(a),
            Repr::Table(t) => Element::new([t.inverse(a.exps()[0] as usize) as u32]),
            Repr::Product { factors, offsets } => {
                let parts: SmallVec<[Element; 4]> = factors
                    .iter()
                    .zip(offsets.windows(2))
                    .map(|(f, w)| f.inverse(&a.exps()[w[0]..w[1]].into()))
                    .collect();
                Element::concat(&parts)
            }
            // [x, x^-1] = 1 in any group, so x∘x^-1 = x x^-1.
            Repr::Twisted { base, .. } => base.inverse(a),
        }
    }

    /// `a^m` by square-and-multiply; negative `m` uses the inverse.
    pub fn power(&self, a: &Element, m: i64) -> Element {
        let (mut base, mut m) = if m < 0 { (self.inverse(a), m.unsigned_abs()) } else { (a.clone(), m as u64) };
        let mut acc = self.identity();
        while m > 0 {
            if m & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            m >>= 1;
            if m > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// `a^-1 b^-1 a b`.
    pub fn commutator(&self, a: &Element, b: &Element) -> Element {
        let ab = self.multiply(a, b);
        let ia_ib = self.multiply(&self.inverse(a), &self.inverse(b));
        self.multiply(&ia_ib, &ab)
    }

    /// Least `m >= 1` with `a^m = 1`.
    pub fn element_order(&self, a: &Element) -> u64 {
        if let Some(t) = self.cached_table() {
            return t.element_order(self.index_of(a));
        }
        let mut ord = self.order();
        for (p, _) in arith::factorize(self.order()) {
            while ord.is_multiple_of(p) && self.power(a, (ord / p) as i64).is_identity() {
                ord /= p;
            }
        }
        ord
    }

    pub fn commutes(&self, a: &Element, b: &Element) -> bool {
        self.multiply(a, b) == self.multiply(b, a)
    }

    /// A generating set: the polycyclic generators, embedded factor
    /// generators for products, and a greedy closure-built set otherwise.
    pub fn generators(&self) -> Vec<Element> {
        match &self.inner.repr {
            Repr::Pc(pc) => (0..pc.num_gens())
                .filter(|&i| pc.rel_orders()[i] > 1)
                .map(|i| {
                    let mut e = self.identity();
                    e.exps[i] = 1;
                    e
                })
                .collect(),
            Repr::Product { factors, offsets } => {
                let mut gens = Vec::new();
                for (f, &off) in factors.iter().zip(offsets) {
                    for g in f.generators() {
                        let mut e = self.identity();
                        e.exps[off..off + g.len()].copy_from_slice(g.exps());
                        gens.push(e);
                    }
                }
                gens
            }
            _ => self.greedy_generators(),
        }
    }

    fn greedy_generators(&self) -> Vec<Element> {
        let m = self.order() as usize;
        let mut covered = vec![false; m];
        covered[0] = true;
        let mut members = vec![self.identity()];
        let mut gens: Vec<Element> = Vec::new();
        for idx in 1..m {
            if covered[idx] {
                continue;
            }
            gens.push(self.element_at(idx));
            // Re-close: the old subgroup plus the new generator.
            let mut queue: VecDeque<Element> = members.iter().cloned().collect();
            while let Some(x) = queue.pop_front() {
                for g in &gens {
                    let y = self.multiply(&x, g);
                    let iy = self.index_of(&y);
                    if !covered[iy] {
                        covered[iy] = true;
                        members.push(y.clone());
                        queue.push_back(y);
                    }
                }
            }
        }
        gens
    }

    /// The subgroup generated by `seeds`, as elements in index order.
    pub fn closure(&self, seeds: &[Element]) -> Vec<Element> {
        let m = self.order() as usize;
        let mut seen = vec![false; m];
        seen[0] = true;
        let mut queue = VecDeque::from([self.identity()]);
        let mut out = vec![0usize];
        while let Some(x) = queue.pop_front() {
            for g in seeds {
                let y = self.multiply(&x, g);
                let iy = self.index_of(&y);
                if !seen[iy] {
                    seen[iy] = true;
                    out.push(iy);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        out.into_iter().map(|i| self.element_at(i)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generators();
        gens.iter().enumerate().all(|(i, a)| gens[i + 1..].iter().all(|b| self.commutes(a, b)))
    }

    /// The full multiplication table, indexed by element index. Computed
    /// once and cached.
    pub fn cayley_table(&self) -> Arc<MultiplicationTable> {
        if let Repr::Table(t) = &self.inner.repr {
            return t.clone();
        }
        self.inner
            .table
            .get_or_init(|| match &self.inner.repr {
                Repr::Twisted { base, n } => Arc::new(base.cayley_table().twisted(*n)),
                _ => {
                    let elems: Vec<Element> = self.elements().collect();
                    let m = elems.len();
                    let mut cells = Vec::with_capacity(m * m);
                    for a in &elems {
                        for b in &elems {
                            cells.push(self.index_of(&self.multiply(a, b)) as u32);
                        }
                    }
                    Arc::new(MultiplicationTable::from_raw(m, cells))
                }
            })
            .clone()
    }

    /// The cached table, when one has already been materialized.
    pub fn cached_table(&self) -> Option<&Arc<MultiplicationTable>> {
        match &self.inner.repr {
            Repr::Table(t) => Some(t),
            _ => self.inner.table.get(),
        }
    }
}

/// `G × H`, flattening nested products. Elements are concatenated exponent
/// vectors.
pub fn direct_product(g: &Group, h: &Group) -> Group {
    product_of(&[g.clone(), h.clone()])
}

/// Direct product of any number of groups (at least one).
pub fn product_of(groups: &[Group]) -> Group {
    assert!(!groups.is_empty(), "product of no groups");
    let mut factors = Vec::new();
    for g in groups {
        match g.factors() {
            Some(fs) => factors.extend(fs.iter().cloned()),
            None => factors.push(g.clone()),
        }
    }
    if factors.len() == 1 {
        return factors.pop().unwrap();
    }
    let label = factors.iter().map(|f| f.label().to_string()).collect::<Vec<_>>().join(" x ");
    let mut offsets = vec![0];
    for f in &factors {
        offsets.push(offsets.last().unwrap() + f.moduli().len());
    }
    Group::from_repr(label, Repr::Product { factors, offsets })
}

/// True iff every commutator is central: checked on a generating set, which
/// suffices because the derived subgroup is the normal closure of the
/// generator commutators.
pub fn verify_class_at_most_2(g: &Group) -> bool {
    class2_witness(g).is_none()
}

/// A triple of generators `(a, b, c)` with `[[a,b],c] != 1`, if any.
pub fn class2_witness(g: &Group) -> Option<[Element; 3]> {
    if let Some(fs) = g.factors() {
        for (fi, f) in fs.iter().enumerate() {
            if let Some(w) = class2_witness(f) {
                // Lift back into the product.
                let lift = |e: &Element| {
                    let parts: Vec<Element> =
                        fs.iter().enumerate().map(|(oi, o)| if oi == fi { e.clone() } else { o.identity() }).collect();
                    Element::concat(&parts)
                };
                return Some([lift(&w[0]), lift(&w[1]), lift(&w[2])]);
            }
        }
        return None;
    }
    let gens = g.generators();
    for a in &gens {
        for b in &gens {
            let c = g.commutator(a, b);
            if c.is_identity() {
                continue;
            }
            for z in &gens {
                if !g.commutes(&c, z) {
                    return Some([a.clone(), b.clone(), z.clone()]);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32) -> Group {
        build_pc_group(&PcPresentation::new(format!("Z_{n}"), vec![n])).unwrap()
    }

    #[test]
    fn indexing_is_lexicographic() {
        let g = direct_product(&z(3), &z(5));
        let elems: Vec<Element> = g.elements().collect();
        let mut sorted = elems.clone();
        sorted.sort();
        assert_eq!(elems, sorted);
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(g.index_of(e), i);
        }
    }

    #[test]
    fn product_of_trivial_is_same_size() {
        let h = z(9);
        let p = direct_product(&Group::trivial(), &h);
        assert_eq!(p.order(), 9);
        assert!(p.is_abelian());
    }

    #[test]
    fn power_handles_negative_exponents() {
        let g = z(27);
        let x = Element::new([1]);
        assert_eq!(g.power(&x, -1), Element::new([26]));
        assert_eq!(g.power(&x, 0), g.identity());
        assert_eq!(g.power(&x, 27), g.identity());
        assert_eq!(g.element_order(&x), 27);
        assert_eq!(g.element_order(&Element::new([9])), 3);
    }

    #[test]
    fn invalid_elements_are_reported() {
        let g = z(3);
        assert!(g.check_element(&Element::new([3])).is_err());
        assert!(g.check_element(&Element::new([0, 0])).is_err());
        assert!(g.check_element(&Element::new([2])).is_ok());
    }

    #[test]
    fn with_label_keeps_cache() {
        let g = z(5);
        let _ = g.cayley_table();
        let h = g.with_label("five");
        assert!(h.cached_table().is_some());
        assert_eq!(h.label(), "five");
    }
}
