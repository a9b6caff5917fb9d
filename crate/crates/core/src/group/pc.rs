//! Power-commutator presentations with class-2 collection.
//!
//! Generators `g_1..g_k` have relative orders `r_i`; elements are words
//! `g_1^{e_1} ... g_k^{e_k}` with `0 <= e_i < r_i`. Relations are power tails
//! `g_i^{r_i} = w_i` and commutator tails `[g_j, g_i] = c_{ji}` for `j > i`.
//! Every tail must be central. With central commutators the product of two
//! normal forms collects in closed form:
//!
//! ```text
//! a · b = Π g_i^{a_i + b_i} · Π_{i > j} [g_i, g_j]^{a_i b_j}
//! ```
//!
//! and any overflow `g_i^{r_i}` is replaced by its (central) tail. The
//! central corrections are multiplied back in on the right.

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::{Element, Group, Repr};
use crate::arith;
use crate::error::{Error, Result};

/// Seed for every sampled check unless the caller supplies one.
pub const DEFAULT_SEED: u64 = 0x5eed_2c1a_55e5_0002;

/// Collection recursion depth beyond which a presentation is declared
/// inconsistent.
const MAX_DEPTH: u32 = 64;

/// Power-commutator data for a group of class at most 2. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PcPresentation {
    pub label: String,
    pub rel_orders: Vec<u32>,
    /// `i -> g_i^{r_i}` as an exponent vector.
    pub power_tails: BTreeMap<usize, Vec<u32>>,
    /// `(j, i)` with `j > i` `-> [g_j, g_i]` as an exponent vector.
    pub comm_tails: BTreeMap<(usize, usize), Vec<u32>>,
}

impl PcPresentation {
    pub fn new(label: impl Into<String>, rel_orders: Vec<u32>) -> Self {
        PcPresentation { label: label.into(), rel_orders, power_tails: BTreeMap::new(), comm_tails: BTreeMap::new() }
    }

    /// Sets `g_i^{r_i}`.
    pub fn with_power(mut self, i: usize, exps: Vec<u32>) -> Self {
        self.power_tails.insert(i, exps);
        self
    }

    /// Sets `[g_j, g_i]` for `j > i`.
    pub fn with_commutator(mut self, j: usize, i: usize, exps: Vec<u32>) -> Self {
        self.comm_tails.insert((j, i), exps);
        self
    }

    pub fn num_gens(&self) -> usize {
        self.rel_orders.len()
    }

    /// `Π r_i`, or `None` on overflow.
    pub fn order(&self) -> Option<u64> {
        self.rel_orders.iter().try_fold(1u64, |acc, &r| acc.checked_mul(r as u64))
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPresentation(msg));
        let k = self.num_gens();
        if k == 0 {
            return bad("at least one generator is required".into());
        }
        for (i, &r) in self.rel_orders.iter().enumerate() {
            if arith::prime_power(r as u64).is_none() {
                return bad(format!("relative order {r} of generator {} is not a prime power", i + 1));
            }
        }
        match self.order() {
            Some(n) if n <= u32::MAX as u64 => {}
            _ => return bad("group order does not fit in 32 bits".into()),
        }
        let check_vec = |what: String, v: &[u32]| -> Result<()> {
            if v.len() != k {
                return Err(Error::InvalidPresentation(format!("{what} has length {}, expected {k}", v.len())));
            }
            for (m, (&e, &r)) in v.iter().zip(&self.rel_orders).enumerate() {
                if e >= r {
                    return Err(Error::InvalidPresentation(format!(
                        "{what}: exponent {e} of generator {} is not below {r}",
                        m + 1
                    )));
                }
            }
            Ok(())
        };
        for (&i, v) in &self.power_tails {
            if i >= k {
                return bad(format!("power tail for missing generator {}", i + 1));
            }
            check_vec(format!("power tail of generator {}", i + 1), v)?;
        }
        for (&(j, i), v) in &self.comm_tails {
            if j >= k || i >= j {
                return bad(format!("commutator key ({},{}) must satisfy k >= j > i >= 1", j + 1, i + 1));
            }
            check_vec(format!("commutator tail [g{}, g{}]", j + 1, i + 1), v)?;
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: PresentationFile =
            serde_json::from_str(s).map_err(|e| Error::InvalidPresentation(format!("bad presentation JSON: {e}")))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PresentationFile::from(self)).expect("presentation serializes")
    }
}

/// On-disk presentation format, 1-based.
#[derive(Serialize, Deserialize)]
struct PresentationFile {
    label: String,
    generators: Vec<GeneratorSpec>,
    #[serde(default)]
    powers: BTreeMap<String, Vec<u32>>,
    #[serde(default)]
    commutators: BTreeMap<String, Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorSpec {
    order: u32,
}

impl TryFrom<PresentationFile> for PcPresentation {
    type Error = Error;

    fn try_from(file: PresentationFile) -> Result<Self> {
        let bad_key = |key: &str| Error::InvalidPresentation(format!("bad key {key:?}"));
        let index = |s: &str, key: &str| -> Result<usize> {
            match s.trim().parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(bad_key(key)),
            }
        };
        let mut p = PcPresentation::new(file.label, file.generators.iter().map(|g| g.order).collect());
        for (key, v) in file.powers {
            p.power_tails.insert(index(&key, &key)?, v);
        }
        for (key, v) in file.commutators {
            let (j, i) = key.split_once(',').ok_or_else(|| bad_key(&key))?;
            p.comm_tails.insert((index(j, &key)?, index(i, &key)?), v);
        }
        Ok(p)
    }
}

impl From<&PcPresentation> for PresentationFile {
    fn from(p: &PcPresentation) -> Self {
        PresentationFile {
            label: p.label.clone(),
            generators: p.rel_orders.iter().map(|&order| GeneratorSpec { order }).collect(),
            powers: p.power_tails.iter().map(|(i, v)| ((i + 1).to_string(), v.clone())).collect(),
            commutators: p.comm_tails.iter().map(|((j, i), v)| (format!("{},{}", j + 1, i + 1), v.clone())).collect(),
        }
    }
}

/// Collector for a validated presentation.
#[derive(Clone, Debug)]
pub(crate) struct PcGroup {
    pres: PcPresentation,
    rel: Vec<u64>,
    order: u64,
    tails: Vec<Element>,
    /// `comm_id[i * k + j]` for `i > j` names the tail `[g_i, g_j]`.
    comm_id: Vec<Option<usize>>,
    power_id: Vec<Option<usize>>,
    /// `tail_powers[t][m] = tails[t]^m`; empty while bootstrapping.
    tail_powers: Vec<Vec<Element>>,
}

impl PcGroup {
    /// Validates ranges and precomputes tail powers. Does not check
    /// centrality or associativity.
    fn new(pres: &PcPresentation) -> Result<PcGroup> {
        pres.validate()?;
        let k = pres.num_gens();
        let mut tails = Vec::new();
        let mut comm_id = vec![None; k * k];
        let mut power_id = vec![None; k];
        for (&i, v) in &pres.power_tails {
            if v.iter().any(|&e| e != 0) {
                power_id[i] = Some(tails.len());
                tails.push(Element::from(v.as_slice()));
            }
        }
        for (&(j, i), v) in &pres.comm_tails {
            if v.iter().any(|&e| e != 0) {
                comm_id[j * k + i] = Some(tails.len());
                tails.push(Element::from(v.as_slice()));
            }
        }
        let mut pc = PcGroup {
            pres: pres.clone(),
            rel: pres.rel_orders.iter().map(|&r| r as u64).collect(),
            order: pres.order().expect("validated"),
            tails,
            comm_id,
            power_id,
            tail_powers: Vec::new(),
        };
        let mut powers = Vec::with_capacity(pc.tails.len());
        for t in &pc.tails {
            let mut list = vec![Element::identity(k)];
            let mut cur = t.clone();
            while !cur.is_identity() {
                if list.len() as u64 > pc.order {
                    return Err(Error::InconsistentPresentation {
                        reason: "a tail has no finite order dividing the group order".into(),
                        witness: vec![t.exps().to_vec()],
                    });
                }
                list.push(cur.clone());
                cur = pc.try_mul(&cur, t, 0)?;
            }
            powers.push(list);
        }
        pc.tail_powers = powers;
        Ok(pc)
    }

    pub(crate) fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub(crate) fn num_gens(&self) -> usize {
        self.rel.len()
    }

    pub(crate) fn rel_orders(&self) -> &[u32] {
        &self.pres.rel_orders
    }

    pub(crate) fn order(&self) -> u64 {
        self.order
    }

    fn depth_error(a: &Element, b: &Element) -> Error {
        Error::InconsistentPresentation {
            reason: "collection did not terminate".into(),
            witness: vec![a.exps().to_vec(), b.exps().to_vec()],
        }
    }

    fn tail_pow(&self, t: usize, ex: u64, depth: u32) -> Result<Element> {
        if let Some(list) = self.tail_powers.get(t) {
            return Ok(list[(ex % list.len() as u64) as usize].clone());
        }
        let mut acc = Element::identity(self.num_gens());
        let mut base = self.tails[t].clone();
        let mut ex = ex;
        while ex > 0 {
            if ex & 1 == 1 {
                acc = self.try_mul(&acc, &base, depth + 1)?;
            }
            ex >>= 1;
            if ex > 0 {
                base = self.try_mul(&base, &base, depth + 1)?;
            }
        }
        Ok(acc)
    }

    #[allow(clippy::needless_range_loop)]
    fn try_mul(&self, a: &Element, b: &Element, depth: u32) -> Result<Element> {
        if depth > MAX_DEPTH {
            return Err(Self::depth_error(a, b));
        }
        let k = self.num_gens();
        let (a, b) = (a.exps(), b.exps());
        let mut e: SmallVec<[u64; 8]> = a.iter().zip(b).map(|(&x, &y)| x as u64 + y as u64).collect();
        let mut pending: SmallVec<[(usize, u64); 8]> = SmallVec::new();
        for i in 1..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..i {
                if b[j] == 0 {
                    continue;
                }
                if let Some(t) = self.comm_id[i * k + j] {
                    pending.push((t, a[i] as u64 * b[j] as u64));
                }
            }
        }
        for i in 0..k {
            if e[i] >= self.rel[i] {
                let q = e[i] / self.rel[i];
                e[i] %= self.rel[i];
                if let Some(t) = self.power_id[i] {
                    pending.push((t, q));
                }
            }
        }
        let mut res = Element::new(e.iter().map(|&x| x as u32));
        for (t, ex) in pending {
            let c = self.tail_pow(t, ex, depth)?;
            if !c.is_identity() {
                res = self.try_mul(&res, &c, depth + 1)?;
            }
        }
        Ok(res)
    }

    /// `a^-1`: the naive reversal `b` leaves `a·b` central, then correct.
    fn try_inverse(&self, a: &Element, depth: u32) -> Result<Element> {
        if depth > MAX_DEPTH {
            return Err(Self::depth_error(a, a));
        }
        let naive = Element::new(a.exps().iter().zip(&self.rel).map(|(&x, &r)| ((r - x as u64) % r) as u32));
        let z = self.try_mul(a, &naive, depth)?;
        if z.is_identity() {
            return Ok(naive);
        }
        let zi = self.try_inverse(&z, depth + 1)?;
        self.try_mul(&naive, &zi, depth)
    }

    pub(crate) fn mul(&self, a: &Element, b: &Element) -> Element {
        self.try_mul(a, b, 0).unwrap_or_else(|e| panic!("{}: {e}", self.pres.label))
    }

    pub(crate) fn inverse(&self, a: &Element) -> Element {
        self.try_inverse(a, 0).unwrap_or_else(|e| panic!("{}: {e}", self.pres.label))
    }

    fn generator(&self, i: usize) -> Element {
        let mut v = vec![0u32; self.num_gens()];
        v[i] = 1;
        Element::from(v)
    }

    fn element_at(&self, mut idx: u64) -> Element {
        let mut v = vec![0u32; self.num_gens()];
        for (slot, &r) in v.iter_mut().zip(&self.rel).rev() {
            *slot = (idx % r) as u32;
            idx /= r;
        }
        Element::from(v)
    }

    fn index_of(&self, a: &Element) -> u64 {
        a.exps().iter().zip(&self.rel).fold(0, |acc, (&e, &r)| acc * r + e as u64)
    }

    /// Every tail must commute with every generator.
    fn check_central_tails(&self) -> Result<()> {
        for t in &self.tails {
            for i in 0..self.num_gens() {
                let g = self.generator(i);
                if self.try_mul(t, &g, 0)? != self.try_mul(&g, t, 0)? {
                    return Err(Error::NotClass2 {
                        reason: format!("tail {:?} does not commute with generator {}", t, i + 1),
                        witness: vec![t.exps().to_vec(), g.exps().to_vec()],
                    });
                }
            }
        }
        Ok(())
    }
}

/// How far [`check_consistency`] goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConsistencyOptions {
    /// Largest group order checked exhaustively.
    pub budget: u64,
    /// Element triples sampled above the budget.
    pub samples: u64,
    pub seed: u64,
}

impl Default for ConsistencyOptions {
    fn default() -> Self {
        ConsistencyOptions { budget: 10_000, samples: 1_000_000, seed: DEFAULT_SEED }
    }
}

/// Successful consistency verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Consistency {
    /// `(g x) y = g (x y)` for every generator `g` and all elements `x, y`,
    /// and left/right multiplication by each generator is a bijection. Since
    /// every element is a product of generators, this certifies
    /// associativity of the whole table.
    Exhaustive { triples: u64 },
    /// Uniformly sampled element triples.
    Sampled { triples: u64, seed: u64 },
}

/// Checks that collection defines an associative product.
pub fn check_consistency(p: &PcPresentation, opts: ConsistencyOptions) -> Result<Consistency> {
    let pc = PcGroup::new(p)?;
    consistency_of(&pc, opts)
}

fn consistency_of(pc: &PcGroup, opts: ConsistencyOptions) -> Result<Consistency> {
    let m = pc.order();
    let k = pc.num_gens();
    let inconsistent = |reason: &str, w: &[&Element]| Error::InconsistentPresentation {
        reason: reason.to_string(),
        witness: w.iter().map(|e| e.exps().to_vec()).collect(),
    };
    if m <= opts.budget {
        let elems: Vec<Element> = (0..m).map(|i| pc.element_at(i)).collect();
        // Latin-square property for generator rows and columns.
        for i in 0..k {
            let g = pc.generator(i);
            let mut seen_left = vec![None; m as usize];
            let mut seen_right = vec![None; m as usize];
            for x in &elems {
                let gx = pc.try_mul(&g, x, 0)?;
                let slot = &mut seen_left[pc.index_of(&gx) as usize];
                if let Some(prev) = slot.replace(x.clone()) {
                    return Err(inconsistent("left multiplication by a generator is not injective", &[&g, &prev, x]));
                }
                let xg = pc.try_mul(x, &g, 0)?;
                let slot = &mut seen_right[pc.index_of(&xg) as usize];
                if let Some(prev) = slot.replace(x.clone()) {
                    return Err(inconsistent("right multiplication by a generator is not injective", &[&g, &prev, x]));
                }
            }
        }
        let mut triples = 0u64;
        for i in 0..k {
            let g = pc.generator(i);
            let gx: Vec<Element> = elems.iter().map(|x| pc.try_mul(&g, x, 0)).collect::<Result<_>>()?;
            for (x, gx) in elems.iter().zip(&gx) {
                for y in &elems {
                    let left = pc.try_mul(gx, y, 0)?;
                    let right = pc.try_mul(&g, &pc.try_mul(x, y, 0)?, 0)?;
                    if left != right {
                        return Err(inconsistent("(g x) y != g (x y)", &[&g, x, y]));
                    }
                    triples += 1;
                }
            }
        }
        Ok(Consistency::Exhaustive { triples })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.samples {
            let x = pc.element_at(rng.random_range(0..m));
            let y = pc.element_at(rng.random_range(0..m));
            let z = pc.element_at(rng.random_range(0..m));
            let left = pc.try_mul(&pc.try_mul(&x, &y, 0)?, &z, 0)?;
            let right = pc.try_mul(&x, &pc.try_mul(&y, &z, 0)?, 0)?;
            if left != right {
                return Err(inconsistent("(x y) z != x (y z)", &[&x, &y, &z]));
            }
        }
        Ok(Consistency::Sampled { triples: opts.samples, seed: opts.seed })
    }
}

/// Realizes a presentation: validates ranges, requires central tails, and
/// runs [`check_consistency`] with default options.
pub fn build_pc_group(p: &PcPresentation) -> Result<Group> {
    build_pc_group_with(p, ConsistencyOptions::default())
}

pub(crate) fn build_pc_group_with(p: &PcPresentation, opts: ConsistencyOptions) -> Result<Group> {
    let pc = PcGroup::new(p)?;
    pc.check_central_tails()?;
    consistency_of(&pc, opts)?;
    Ok(Group::from_repr(p.label.clone(), Repr::Pc(pc)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg_tail_g3() -> PcPresentation {
        PcPresentation::new("H27", vec![3, 3, 3]).with_commutator(1, 0, vec![0, 0, 1])
    }

    #[test]
    fn cyclic_27() {
        let p = PcPresentation::new("Z27", vec![27]);
        assert!(matches!(check_consistency(&p, Default::default()), Ok(Consistency::Exhaustive { .. })));
        let g = build_pc_group(&p).unwrap();
        assert_eq!(g.order(), 27);
        assert!(g.is_abelian());
    }

    #[test]
    fn rejects_non_prime_power_orders() {
        let p = PcPresentation::new("Z6", vec![6]);
        assert!(matches!(build_pc_group(&p), Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn rejects_out_of_range_tails() {
        let p = PcPresentation::new("bad", vec![3, 3]).with_commutator(1, 0, vec![3, 0]);
        assert!(matches!(build_pc_group(&p), Err(Error::InvalidPresentation(_))));
        let p = PcPresentation::new("bad", vec![3, 3]).with_commutator(0, 1, vec![1, 0]);
        assert!(matches!(build_pc_group(&p), Err(Error::InvalidPresentation(_))));
        let p = PcPresentation::new("bad", vec![3, 3]).with_power(0, vec![0]);
        assert!(matches!(build_pc_group(&p), Err(Error::InvalidPresentation(_))));
    }

    #[test]
    fn commutator_tail_of_wrong_order_is_inconsistent() {
        // [g2, g1] = g3 has order 9, but [g2, g1]^3 = [g2^3, g1] = 1.
        let p = PcPresentation::new("broken", vec![3, 3, 9]).with_commutator(1, 0, vec![0, 0, 1]);
        match check_consistency(&p, Default::default()) {
            Err(Error::InconsistentPresentation { witness, .. }) => assert_eq!(witness.len(), 3),
            other => panic!("expected a witness triple, got {other:?}"),
        }
        assert!(matches!(build_pc_group(&p), Err(Error::InconsistentPresentation { .. })));
    }

    #[test]
    fn non_central_tail_is_not_class_2() {
        let p = PcPresentation::new("class3", vec![3, 3, 3, 3])
            .with_commutator(1, 0, vec![0, 0, 1, 0])
            .with_commutator(2, 0, vec![0, 0, 0, 1]);
        assert!(matches!(build_pc_group(&p), Err(Error::NotClass2 { .. })));
    }

    #[test]
    fn central_power_tail() {
        // Z_9 as <g1, g2 | g1^3 = g2, g2^3 = 1>.
        let p = PcPresentation::new("Z9", vec![3, 3]).with_power(0, vec![0, 1]);
        let g = build_pc_group(&p).unwrap();
        let x = Element::new([1, 0]);
        assert_eq!(g.element_order(&x), 9);
        assert_eq!(g.power(&x, 3), Element::new([0, 1]));
    }

    #[test]
    fn inverse_matches_power() {
        let g = build_pc_group(&heisenberg_tail_g3()).unwrap();
        for a in g.elements() {
            assert_eq!(g.inverse(&a), g.power(&a, g.order() as i64 - 1));
            assert!(g.multiply(&a, &g.inverse(&a)).is_identity());
        }
    }

    #[test]
    fn sampled_mode_above_budget() {
        let opts = ConsistencyOptions { budget: 10, samples: 500, seed: 7 };
        let v = check_consistency(&heisenberg_tail_g3(), opts).unwrap();
        assert_eq!(v, Consistency::Sampled { triples: 500, seed: 7 });
    }

    #[test]
    fn json_format_is_one_based() {
        let src = r#"{"label": "A3", "generators": [{"order": 27}, {"order": 3}],
                      "commutators": {"2,1": [9, 0]}}"#;
        let p = PcPresentation::from_json(src).unwrap();
        assert_eq!(p.comm_tails.get(&(1, 0)), Some(&vec![9, 0]));
        assert!(p.power_tails.is_empty());
        let back = PcPresentation::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        assert!(
            PcPresentation::from_json(r#"{"label":"x","generators":[{"order":3}],"commutators":{"0,1":[0]}}"#).is_err()
        );
    }
}
