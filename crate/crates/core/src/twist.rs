//! The twisted product `x ∘ⁿ y = [x,y]ⁿ x y`, iterated twists, and strings of
//! groups.
//!
//! On a group of class at most 2 the twisted product is again a group
//! operation on the same set, with the same identity, inverses and powers.
//! Twisting `i` times by `n` equals a single twist by
//! `s(i) = ((2n+1)^i - 1) / 2`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::group::{class2_witness, product_of, Element, Group, PcPresentation, Repr};
use crate::invariants::{self, center, derived_subgroup, exponent_of, Fingerprint, IsoOptions};

/// Groups at most this large get their base table materialized when they are
/// twisted, so nested twists multiply by lookup.
const TABLE_CACHE_LIMIT: u64 = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TwistMode {
    /// Refuse bases that fail the class-2 check.
    #[default]
    Strict,
    /// Twist anything; the result need not be associative.
    Unchecked,
}

/// `S_n(G)`: the base group's elements under `∘ⁿ`.
#[derive(Clone, Debug)]
pub struct TwistedGroup {
    group: Group,
    n_raw: i64,
    n_effective: u64,
    derived_exponent: u64,
}

impl TwistedGroup {
    /// The twisted group as a [`Group`] handle.
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn into_group(self) -> Group {
        self.group
    }

    pub fn base(&self) -> &Group {
        self.group.twist_of().expect("twisted repr").0
    }

    pub fn n_raw(&self) -> i64 {
        self.n_raw
    }

    /// `n_raw mod e`, `e` the exponent of the base's derived subgroup.
    pub fn n_effective(&self) -> u64 {
        self.n_effective
    }

    pub fn derived_exponent(&self) -> u64 {
        self.derived_exponent
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        self.group.multiply(x, y)
    }

    /// A native presentation of the twisted group on the base's polycyclic
    /// generators. Normal forms are `g_1^{e_1} ∘ ... ∘ g_k^{e_k}`, which is a
    /// different labelling of the elements than the base's.
    pub fn to_presentation(&self) -> Result<PcPresentation> {
        let base = self.base();
        let pres = base
            .presentation()
            .ok_or_else(|| Error::Config(format!("{} has no polycyclic presentation to twist", base.label())))?;
        let g = &self.group;
        let k = pres.num_gens();
        let gen = |i: usize| {
            let mut e = base.identity();
            let mut v = e.exps().to_vec();
            v[i] = 1;
            e = Element::from(v);
            e
        };
        let mut relabel: HashMap<Element, Vec<u32>> = HashMap::new();
        for idx in 0..g.order() as usize {
            let exps = base.element_at(idx);
            let word = exps
                .exps()
                .iter()
                .enumerate()
                .fold(g.identity(), |acc, (i, &e)| g.multiply(&acc, &g.power(&gen(i), e as i64)));
            if relabel.insert(word, exps.exps().to_vec()).is_some() {
                return Err(Error::InvalidPresentation(
                    "twisted normal forms are not unique on the base generators".into(),
                ));
            }
        }
        let mut out = PcPresentation::new(format!("{} (presented)", g.label()), pres.rel_orders.clone());
        for i in 0..k {
            let w = g.power(&gen(i), pres.rel_orders[i] as i64);
            if !w.is_identity() {
                out = out.with_power(i, relabel[&w].clone());
            }
        }
        for j in 0..k {
            for i in 0..j {
                let c = g.commutator(&gen(j), &gen(i));
                if !c.is_identity() {
                    out = out.with_commutator(j, i, relabel[&c].clone());
                }
            }
        }
        Ok(out)
    }
}

fn require_class_2(g: &Group) -> Result<()> {
    match class2_witness(g) {
        None => Ok(()),
        Some(w) => Err(Error::NotClass2 {
            reason: format!("[[a,b],c] != 1 in {}", g.label()),
            witness: w.iter().map(|e| e.exps().to_vec()).collect(),
        }),
    }
}

/// `[x,y]^n x y` evaluated in `g`, after checking `g` has class at most 2.
pub fn twisted_multiply(g: &Group, n: i64, x: &Element, y: &Element) -> Result<Element> {
    require_class_2(g)?;
    g.check_element(x)?;
    g.check_element(y)?;
    let c = g.power(&g.commutator(x, y), n);
    Ok(g.multiply(&g.multiply(&c, x), y))
}

/// The equivalent form `y^-n x y^(n+1)`.
pub fn twisted_multiply_conjugate_form(g: &Group, n: i64, x: &Element, y: &Element) -> Result<Element> {
    require_class_2(g)?;
    g.check_element(x)?;
    g.check_element(y)?;
    Ok(g.multiply(&g.multiply(&g.power(y, -n), x), &g.power(y, n + 1)))
}

pub fn twist(g: &Group, n: i64) -> Result<TwistedGroup> {
    twist_with(g, n, TwistMode::Strict)
}

pub fn twist_with(g: &Group, n: i64, mode: TwistMode) -> Result<TwistedGroup> {
    if mode == TwistMode::Strict {
        require_class_2(g)?;
    }
    if g.twist_of().is_some() && g.order() <= TABLE_CACHE_LIMIT {
        g.cayley_table();
    }
    let e = exponent_of(&derived_subgroup(g));
    let n_effective = n.rem_euclid(e as i64) as u64;
    let group = Group::from_repr(format!("S{n}({})", g.label()), Repr::Twisted { base: g.clone(), n: n_effective });
    Ok(TwistedGroup { group, n_raw: n, n_effective, derived_exponent: e })
}

/// `((2n+1)^i - 1) / 2`, exactly.
pub fn s_of_i(n: u64, i: u32) -> BigUint {
    let base = BigUint::from(2 * n + 1);
    (base.pow(i) - 1u32) / 2u32
}

/// `s(i) mod modulus`.
pub fn s_of_i_mod(n: u64, i: u32, modulus: u64) -> u64 {
    assert!(modulus > 0);
    // (2n+1)^i is odd, so reducing it mod 2·modulus keeps the halving exact.
    let m2 = 2 * modulus as u128;
    let base = (2 * n as u128 + 1) % m2;
    let mut acc = 1u128 % m2;
    for _ in 0..i {
        acc = acc * base % m2;
    }
    (((acc + m2 - 1) % m2 / 2) % modulus as u128) as u64
}

/// `S_n^i(G)`, realized as the single twist `S_{s(i)}(G)`.
pub fn iterate_twist(g: &Group, n: i64, i: u32) -> Result<TwistedGroup> {
    if n < 0 {
        return Err(Error::Config(format!("iterate_twist needs n >= 0, got {n}")));
    }
    require_class_2(g)?;
    let e = exponent_of(&derived_subgroup(g));
    let s = s_of_i(n as u64, i);
    let s_raw = i64::try_from(&s).unwrap_or_else(|_| s_of_i_mod(n as u64, i, e) as i64);
    let mut t = twist(g, s_raw)?;
    t.group =
        t.group.with_label(if i == 0 { format!("S{n}^0({})", g.label()) } else { format!("S{n}^{i}({})", g.label()) });
    Ok(t)
}

/// The unique `X` with `X ∘ⁿ a = b`.
///
/// With central commutators, `X = c [X,a]^-n` for `c = b a^-1`, and then
/// `[X,a] = [c,a]`.
pub fn solve_right(g: &Group, n: i64, a: &Element, b: &Element) -> Result<Element> {
    require_class_2(g)?;
    let c = g.multiply(b, &g.inverse(a));
    let x = g.multiply(&c, &g.power(&g.commutator(&c, a), -n));
    let check = twisted_multiply(g, n, &x, a)?;
    if &check != b {
        return Err(Error::NotClass2 {
            reason: "solution failed substitution".into(),
            witness: vec![a.exps().to_vec(), b.exps().to_vec()],
        });
    }
    Ok(x)
}

/// A Sylow subgroup together with its embedding into the parent group.
#[derive(Clone)]
pub struct SylowFactor {
    pub prime: u64,
    pub group: Group,
    lift: Arc<dyn Fn(&Element) -> Element + Send + Sync>,
}

impl std::fmt::Debug for SylowFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SylowFactor").field("prime", &self.prime).field("group", &self.group).finish()
    }
}

impl SylowFactor {
    /// The parent element corresponding to `e`.
    pub fn lift(&self, e: &Element) -> Element {
        (self.lift)(e)
    }
}

/// Sylow factors by increasing prime, as `(p, P)`.
pub fn sylow_decompose(g: &Group) -> Result<Vec<(u64, Group)>> {
    Ok(sylow_factors(g)?.into_iter().map(|f| (f.prime, f.group)).collect())
}

/// Sylow factors with embeddings. Products and prime-separable
/// presentations are split structurally; anything else is sieved by element
/// order.
pub fn sylow_factors(g: &Group) -> Result<Vec<SylowFactor>> {
    let primes = arith::factorize(g.order());
    if primes.len() <= 1 {
        return Ok(primes
            .into_iter()
            .map(|(p, _)| SylowFactor { prime: p, group: g.clone(), lift: Arc::new(|e: &Element| e.clone()) })
            .collect());
    }
    if let Some(fs) = g.factors() {
        return product_sylow(g, fs);
    }
    if let Some(pres) = g.presentation() {
        if let Some(split) = split_presentation(g, pres)? {
            return Ok(split);
        }
    }
    sieve_sylow(g, &primes)
}

fn product_sylow(g: &Group, fs: &[Group]) -> Result<Vec<SylowFactor>> {
    let mut offsets = vec![0usize];
    for f in fs {
        offsets.push(offsets.last().unwrap() + f.moduli().len());
    }
    let mut by_prime: BTreeMap<u64, Vec<(usize, SylowFactor)>> = BTreeMap::new();
    for (fi, f) in fs.iter().enumerate() {
        for sf in sylow_factors(f)? {
            by_prime.entry(sf.prime).or_default().push((fi, sf));
        }
    }
    let width = g.moduli().len();
    Ok(by_prime
        .into_iter()
        .map(|(p, parts)| {
            let groups: Vec<Group> = parts.iter().map(|(_, sf)| sf.group.clone()).collect();
            let group = product_of(&groups);
            let parts: Vec<(usize, usize, SylowFactor)> =
                parts.into_iter().map(|(fi, sf)| (offsets[fi], sf.group.moduli().len(), sf)).collect();
            let lift = move |e: &Element| {
                let mut out = vec![0u32; width];
                let mut at = 0;
                for (off, len, sf) in &parts {
                    let lifted = sf.lift(&Element::from(&e.exps()[at..at + len]));
                    out[*off..*off + lifted.len()].copy_from_slice(lifted.exps());
                    at += len;
                }
                Element::from(out)
            };
            SylowFactor { prime: p, group, lift: Arc::new(lift) }
        })
        .collect())
}

/// Splits a presentation whose generators separate by prime with no
/// cross-prime tails.
fn split_presentation(g: &Group, pres: &PcPresentation) -> Result<Option<Vec<SylowFactor>>> {
    let prime_of: Vec<u64> = pres.rel_orders.iter().map(|&r| arith::prime_power(r as u64).unwrap().0).collect();
    let support_ok = |owner: u64, v: &[u32]| v.iter().zip(&prime_of).all(|(&e, &q)| e == 0 || q == owner);
    for (&i, v) in &pres.power_tails {
        if !support_ok(prime_of[i], v) {
            return Ok(None);
        }
    }
    for (&(j, i), v) in &pres.comm_tails {
        let trivial = v.iter().all(|&e| e == 0);
        if (prime_of[j] != prime_of[i] && !trivial) || !support_ok(prime_of[i], v) {
            return Ok(None);
        }
    }
    let mut primes: Vec<u64> = prime_of.clone();
    primes.sort_unstable();
    primes.dedup();
    let width = pres.num_gens();
    let mut out = Vec::new();
    for p in primes {
        let slots: Vec<usize> = (0..width).filter(|&i| prime_of[i] == p).collect();
        let pos: HashMap<usize, usize> = slots.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let restrict = |v: &[u32]| slots.iter().map(|&s| v[s]).collect::<Vec<u32>>();
        let mut sub =
            PcPresentation::new(format!("{}_{p}", g.label()), slots.iter().map(|&s| pres.rel_orders[s]).collect());
        for (&i, v) in &pres.power_tails {
            if let Some(&a) = pos.get(&i) {
                sub = sub.with_power(a, restrict(v));
            }
        }
        for (&(j, i), v) in &pres.comm_tails {
            if let (Some(&a), Some(&b)) = (pos.get(&j), pos.get(&i)) {
                sub = sub.with_commutator(a, b, restrict(v));
            }
        }
        let group = crate::group::build_pc_group(&sub)?;
        let lift = move |e: &Element| {
            let mut out = vec![0u32; width];
            for (a, &s) in slots.iter().enumerate() {
                out[s] = e.exps()[a];
            }
            Element::from(out)
        };
        out.push(SylowFactor { prime: p, group, lift: Arc::new(lift) });
    }
    Ok(Some(out))
}

fn sieve_sylow(g: &Group, primes: &[(u64, u32)]) -> Result<Vec<SylowFactor>> {
    let orders: Vec<u64> = g.elements().map(|x| g.element_order(&x)).collect();
    let mut out = Vec::new();
    for &(p, e) in primes {
        let members: Vec<Element> =
            g.elements().zip(&orders).filter(|(_, &o)| arith::exact_log(p, o).is_some()).map(|(x, _)| x).collect();
        if members.len() as u64 != p.pow(e) {
            return Err(Error::NotNilpotent { prime: p });
        }
        let sub = invariants::Subgroup::from_elements(g, members);
        let closed = sub.elements().iter().all(|a| sub.elements().iter().all(|b| sub.contains(&g.multiply(a, b))));
        if !closed {
            return Err(Error::NotNilpotent { prime: p });
        }
        let group = sub.to_group(format!("{}_{p}", g.label()));
        let listed: Vec<Element> = sub.elements().to_vec();
        let lift = move |e: &Element| listed[e.exps()[0] as usize].clone();
        out.push(SylowFactor { prime: p, group, lift: Arc::new(lift) });
    }
    Ok(out)
}

/// Twist schedule for one Sylow factor: `n = (p-1)/2`, derived exponent `p^t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SylowSchedule {
    pub p: u64,
    pub n: u64,
    pub t: u32,
}

/// The string `F_0(G), ..., F_T(G)` with `T = Σ t_j`.
#[derive(Clone, Debug)]
pub struct GroupString {
    input: String,
    terms: Vec<Group>,
    schedule: Vec<SylowSchedule>,
    /// `levels[i][j]`: how many times factor `j` is twisted in term `i`.
    levels: Vec<Vec<u32>>,
}

impl GroupString {
    pub fn input_label(&self) -> &str {
        &self.input
    }

    pub fn terms(&self) -> &[Group] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn last(&self) -> &Group {
        self.terms.last().expect("a string has at least one term")
    }

    pub fn schedule(&self) -> &[SylowSchedule] {
        &self.schedule
    }

    pub fn levels(&self) -> &[Vec<u32>] {
        &self.levels
    }
}

/// Builds the string of `g`. Factor `j` is twisted with `n_j = (p_j - 1)/2`
/// up to `t_j` times; factors are exhausted in increasing prime order, and
/// each term is the direct product of the factors at their current level.
pub fn string_of(g: &Group) -> Result<GroupString> {
    if g.order().is_multiple_of(2) {
        return Err(Error::EvenOrder(g.order()));
    }
    require_class_2(g)?;
    let factors = sylow_factors(g)?;
    let mut schedule = Vec::new();
    let mut ladders: Vec<Vec<Group>> = Vec::new();
    for f in &factors {
        let e = exponent_of(&derived_subgroup(&f.group));
        let t = arith::exact_log(f.prime, e).expect("derived exponent of a p-group is a power of p");
        let n = (f.prime - 1) / 2;
        let mut ladder = vec![f.group.clone()];
        for level in 1..=t {
            ladder.push(iterate_twist(&f.group, n as i64, level)?.into_group());
        }
        schedule.push(SylowSchedule { p: f.prime, n, t });
        ladders.push(ladder);
    }
    let total: u32 = schedule.iter().map(|s| s.t).sum();
    let mut terms = vec![g.clone()];
    let mut levels = vec![vec![0; schedule.len()]];
    let mut current = vec![0u32; schedule.len()];
    for i in 1..=total {
        let j = current.iter().zip(&schedule).position(|(&l, s)| l < s.t).expect("i <= total");
        current[j] += 1;
        let parts: Vec<Group> = ladders.iter().zip(&current).map(|(ladder, &l)| ladder[l as usize].clone()).collect();
        terms.push(product_of(&parts).with_label(format!("F{i}({})", g.label())));
        levels.push(current.clone());
    }
    Ok(GroupString { input: g.label().to_string(), terms, schedule, levels })
}

/// One term of a [`StringReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermReport {
    pub index: usize,
    pub abelian: bool,
    pub center_order: u64,
    pub fingerprint: Fingerprint,
}

/// Machine-readable summary of a string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringReport {
    pub input: String,
    pub sylow: Vec<SylowSchedule>,
    pub terms: Vec<TermReport>,
    pub pairwise_non_isomorphic: bool,
}

pub fn string_report(s: &GroupString, opts: IsoOptions) -> Result<StringReport> {
    let terms = s
        .terms()
        .iter()
        .enumerate()
        .map(|(index, t)| TermReport {
            index,
            abelian: t.is_abelian(),
            center_order: center(t).order(),
            fingerprint: invariants::fingerprint(t),
        })
        .collect();
    let mut pairwise = true;
    for (i, a) in s.terms().iter().enumerate() {
        for b in &s.terms()[i + 1..] {
            if invariants::is_isomorphic_with(a, b, opts)?.isomorphic {
                pairwise = false;
            }
        }
    }
    Ok(StringReport { input: s.input.clone(), sylow: s.schedule.clone(), terms, pairwise_non_isomorphic: pairwise })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Recurrence from the induction step: s(i+1) = (2 s(i) + 1) n + s(i).
    fn s_by_recurrence(n: u64, i: u32) -> u64 {
        (0..i).fold(0, |s, _| (2 * s + 1) * n + s)
    }

    #[test]
    fn s_of_i_values() {
        for n in 0..6 {
            assert_eq!(s_of_i(n, 1), BigUint::from(n));
            for i in 0..8 {
                assert_eq!(s_of_i(n, i), BigUint::from(s_by_recurrence(n, i)), "n={n} i={i}");
                for m in [1, 3, 9, 27, 15] {
                    assert_eq!(s_of_i_mod(n, i, m), s_by_recurrence(n, i) % m);
                }
            }
        }
        assert_eq!(s_of_i(1, 2), BigUint::from(4u32));
        assert_eq!(s_of_i(2, 3), BigUint::from(62u32));
        // Large exponents stay exact.
        assert_eq!(s_of_i(1, 60), (BigUint::from(3u32).pow(60) - 1u32) / 2u32);
    }

    #[test]
    fn twisting_abelian_groups_changes_nothing() {
        let p = PcPresentation::new("Z9xZ3", vec![9, 3]);
        let g = crate::group::build_pc_group(&p).unwrap();
        let t = twist(&g, 4).unwrap();
        assert_eq!(t.n_effective(), 0);
        assert_eq!(t.derived_exponent(), 1);
        assert_eq!(*t.group().cayley_table(), *g.cayley_table());
    }
}
