//! Isomorphism testing: fingerprint refutation, factorwise decision for
//! coprime direct products, and backtracking over generator images.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::fingerprint;
use crate::arith;
use crate::error::{Error, Result};
use crate::group::{Element, Group, MultiplicationTable};
use crate::twist::sylow_factors;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IsoOptions {
    /// Maximum number of candidate images tried.
    pub budget: u64,
    /// Largest order searched by backtracking.
    pub search_limit: u64,
}

impl Default for IsoOptions {
    fn default() -> Self {
        IsoOptions { budget: 2_000_000, search_limit: 1_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoVerdict {
    pub isomorphic: bool,
    /// Generator images `(g, φ(g))` of an isomorphism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<(Element, Element)>>,
    /// Fingerprint field that separates the groups.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separating_invariant: Option<String>,
}

impl IsoVerdict {
    fn refuted(field: impl Into<String>) -> Self {
        IsoVerdict { isomorphic: false, witness: None, separating_invariant: Some(field.into()) }
    }

    fn found(pairs: Vec<(Element, Element)>) -> Self {
        IsoVerdict { isomorphic: true, witness: Some(pairs), separating_invariant: None }
    }
}

pub fn is_isomorphic(g: &Group, h: &Group) -> Result<IsoVerdict> {
    is_isomorphic_with(g, h, IsoOptions::default())
}

pub fn is_isomorphic_with(g: &Group, h: &Group, opts: IsoOptions) -> Result<IsoVerdict> {
    if g.order() != h.order() {
        return Ok(IsoVerdict::refuted("group_order"));
    }
    if g.same_as(h) {
        return Ok(IsoVerdict::found(g.generators().into_iter().map(|x| (x.clone(), x)).collect()));
    }
    let primes = arith::factorize(g.order());
    if primes.len() > 1 {
        // Sylow subgroups of a nilpotent group are characteristic, so the
        // groups are isomorphic iff their Sylow factors are, prime by prime.
        let fg = sylow_factors(g)?;
        let fh = sylow_factors(h)?;
        let mut pairs = Vec::new();
        for (a, b) in fg.iter().zip(&fh) {
            debug_assert_eq!(a.prime, b.prime);
            let v = is_isomorphic_with(&a.group, &b.group, opts)?;
            if !v.isomorphic {
                let field = v.separating_invariant.unwrap_or_else(|| "no isomorphism".into());
                return Ok(IsoVerdict::refuted(format!("sylow_{}:{}", a.prime, field)));
            }
            for (x, y) in v.witness.unwrap_or_default() {
                pairs.push((a.lift(&x), b.lift(&y)));
            }
        }
        return Ok(IsoVerdict::found(pairs));
    }
    let (fa, fb) = (fingerprint(g), fingerprint(h));
    if let Some(field) = fa.first_difference(&fb) {
        return Ok(IsoVerdict::refuted(field));
    }
    if g.order() > opts.search_limit {
        return Err(Error::SearchBudgetExceeded {
            explored: 0,
            context: format!(
                "{} and {} agree on every fingerprint field and order {} exceeds the search limit {}",
                g.label(),
                h.label(),
                g.order(),
                opts.search_limit
            ),
        });
    }
    let tg = g.cayley_table();
    let th = h.cayley_table();
    if tg == th {
        return Ok(IsoVerdict::found(g.generators().into_iter().map(|x| (x.clone(), x)).collect()));
    }
    let mut search = Search::new(&tg, &th, opts.budget, g.label(), h.label());
    match search.run()? {
        Some(images) => Ok(IsoVerdict::found(
            search.gens.iter().zip(images).map(|(&a, b)| (g.element_at(a), h.element_at(b))).collect(),
        )),
        None => Ok(IsoVerdict::refuted("no isomorphism")),
    }
}

/// Whether the generator images extend to a bijective homomorphism `g -> h`,
/// and the images generate all of `g`.
pub fn verify_isomorphism(g: &Group, h: &Group, pairs: &[(Element, Element)]) -> bool {
    if g.order() != h.order() {
        return false;
    }
    let m = g.order() as usize;
    let mut img: Vec<Option<usize>> = vec![None; m];
    let mut used = vec![false; m];
    img[0] = Some(0);
    used[0] = true;
    let mut queue = VecDeque::from([(g.identity(), h.identity())]);
    let mut reached = 1;
    while let Some((x, fx)) = queue.pop_front() {
        for (a, b) in pairs {
            let y = g.multiply(&x, a);
            let fy = h.multiply(&fx, b);
            let (iy, ify) = (g.index_of(&y), h.index_of(&fy));
            match img[iy] {
                Some(prev) if prev != ify => return false,
                Some(_) => {}
                None => {
                    if used[ify] {
                        return false;
                    }
                    img[iy] = Some(ify);
                    used[ify] = true;
                    reached += 1;
                    queue.push_back((y, fy));
                }
            }
        }
    }
    reached == m
}

struct Profile {
    table: Arc<MultiplicationTable>,
    orders: Vec<u64>,
    central: Vec<bool>,
    centralizer: Vec<u32>,
}

impl Profile {
    fn new(t: &Arc<MultiplicationTable>) -> Profile {
        let m = t.size();
        let centralizer: Vec<u32> =
            (0..m).map(|x| (0..m).filter(|&y| t.mul(x, y) == t.mul(y, x)).count() as u32).collect();
        Profile {
            table: t.clone(),
            orders: t.element_orders(),
            central: centralizer.iter().map(|&c| c as usize == m).collect(),
            centralizer,
        }
    }

    fn matches(&self, x: usize, other: &Profile, y: usize) -> bool {
        self.orders[x] == other.orders[y]
            && self.central[x] == other.central[y]
            && self.centralizer[x] == other.centralizer[y]
    }

    fn closure(&self, seeds: &[usize], start: &[bool]) -> Vec<bool> {
        let t = &self.table;
        let mut inside = start.to_vec();
        inside[0] = true;
        let mut queue: VecDeque<usize> = (0..inside.len()).filter(|&i| inside[i]).collect();
        while let Some(x) = queue.pop_front() {
            for &s in seeds {
                let y = t.mul(x, s);
                if !inside[y] {
                    inside[y] = true;
                    queue.push_back(y);
                }
            }
        }
        inside
    }

    /// Minimal generating set for `p`-groups (a basis modulo the Frattini
    /// subgroup); a greedy generating set otherwise. Candidates are taken by
    /// decreasing order, then index.
    fn generators(&self) -> Vec<usize> {
        let t = &self.table;
        let m = t.size();
        let mut by_order: Vec<usize> = (1..m).collect();
        by_order.sort_by_key(|&x| (std::cmp::Reverse(self.orders[x]), x));
        let mut inside = vec![false; m];
        inside[0] = true;
        let mut seeds: Vec<usize> = Vec::new();
        if let Some((p, _)) = arith::prime_power(m as u64) {
            // Frattini subgroup: p-th powers and commutators.
            let mut frattini_seeds: Vec<usize> = Vec::new();
            let mut phi = vec![false; m];
            phi[0] = true;
            for x in 0..m {
                for cand in [t.power(x, p)].into_iter().chain((0..m).map(|y| t.commutator(x, y))) {
                    if !phi[cand] {
                        frattini_seeds.push(cand);
                        phi = self.closure(&frattini_seeds, &phi);
                    }
                }
            }
            inside = phi;
            seeds = frattini_seeds;
        }
        let mut gens = Vec::new();
        for x in by_order {
            if inside[x] {
                continue;
            }
            gens.push(x);
            seeds.push(x);
            inside = self.closure(&seeds, &inside);
            if inside.iter().all(|&b| b) {
                break;
            }
        }
        gens
    }
}

struct Search<'a> {
    src: Profile,
    dst: Profile,
    gens: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    budget: u64,
    explored: u64,
    labels: (&'a str, &'a str),
}

impl<'a> Search<'a> {
    fn new(
        tg: &Arc<MultiplicationTable>,
        th: &Arc<MultiplicationTable>,
        budget: u64,
        lg: &'a str,
        lh: &'a str,
    ) -> Self {
        let src = Profile::new(tg);
        let dst = Profile::new(th);
        let gens = src.generators();
        let candidates = gens.iter().map(|&x| (0..th.size()).filter(|&y| src.matches(x, &dst, y)).collect()).collect();
        Search { src, dst, gens, candidates, budget, explored: 0, labels: (lg, lh) }
    }

    fn run(&mut self) -> Result<Option<Vec<usize>>> {
        let mut images = Vec::with_capacity(self.gens.len());
        Ok(self.descend(&mut images)?.then_some(images))
    }

    fn descend(&mut self, images: &mut Vec<usize>) -> Result<bool> {
        let level = images.len();
        if level == self.gens.len() {
            return Ok(true);
        }
        for ci in 0..self.candidates[level].len() {
            self.explored += 1;
            if self.explored > self.budget {
                return Err(Error::SearchBudgetExceeded {
                    explored: self.explored - 1,
                    context: format!("{} vs {}", self.labels.0, self.labels.1),
                });
            }
            images.push(self.candidates[level][ci]);
            if self.extends(images) && self.descend(images)? {
                return Ok(true);
            }
            images.pop();
        }
        Ok(false)
    }

    /// Whether `gens[i] -> images[i]` extends to an injective homomorphism
    /// on the subgroup the assigned generators span.
    fn extends(&self, images: &[usize]) -> bool {
        let (tg, th) = (&self.src.table, &self.dst.table);
        let m = tg.size();
        let mut img = vec![u32::MAX; m];
        let mut used = vec![false; th.size()];
        img[0] = 0;
        used[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let fx = img[x] as usize;
            for (&a, &b) in self.gens[..images.len()].iter().zip(images) {
                let y = tg.mul(x, a);
                let fy = th.mul(fx, b);
                if img[y] == u32::MAX {
                    if used[fy] {
                        return false;
                    }
                    img[y] = fy as u32;
                    used[fy] = true;
                    queue.push_back(y);
                } else if img[y] as usize != fy {
                    return false;
                }
            }
        }
        true
    }
}
