//! Explicit multiplication tables.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;
use std::sync::Arc;

use super::{Group, Repr};
use crate::error::{Error, Result};

/// Row-major `m × m` table of element indices. Element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicationTable {
    size: usize,
    cells: Vec<u32>,
    inv: Vec<u32>,
}

impl MultiplicationTable {
    pub(crate) fn trivial() -> Self {
        MultiplicationTable { size: 1, cells: vec![0], inv: vec![0] }
    }

    /// Table from explicit rows. Only the shape and index ranges are checked
    /// here; [`build_table_group`] checks the group axioms.
    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidTable { reason: "empty table".into(), witness: vec![] });
        }
        let mut cells = Vec::with_capacity(m * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::InvalidTable { reason: "row has wrong length".into(), witness: vec![i] });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= m {
                    return Err(Error::InvalidTable { reason: "entry out of range".into(), witness: vec![i, j] });
                }
                cells.push(v as u32);
            }
        }
        Ok(MultiplicationTable::from_raw(m, cells))
    }

    /// Unchecked construction; inverses are found by row scan (`u32::MAX`
    /// where none exists).
    pub(crate) fn from_raw(size: usize, cells: Vec<u32>) -> Self {
        assert_eq!(cells.len(), size * size);
        let inv = (0..size)
            .map(|a| cells[a * size..(a + 1) * size].iter().position(|&c| c == 0).map_or(u32::MAX, |b| b as u32))
            .collect();
        MultiplicationTable { size, cells, inv }
    }

    /// Closes `gens` under `op` starting from `identity`. Elements are
    /// indexed in discovery order, identity first. Returns the table and the
    /// element list.
    pub fn from_generators<T, F>(identity: T, gens: &[T], op: F) -> (Self, Vec<T>)
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut index: HashMap<T, usize> = HashMap::from([(identity.clone(), 0)]);
        let mut elems = vec![identity];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let y = op(&elems[i], g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(y);
                }
            }
        }
        let m = elems.len();
        let mut cells = Vec::with_capacity(m * m);
        for a in &elems {
            for b in &elems {
                cells.push(index[&op(a, b)] as u32);
            }
        }
        (MultiplicationTable::from_raw(m, cells), elems)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cells[a * self.size + b] as usize
    }

    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.cells[a * self.size..(a + 1) * self.size]
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ia_ib = self.mul(self.inverse(a), self.inverse(b));
        self.mul(ia_ib, self.mul(a, b))
    }

    pub fn power(&self, a: usize, m: u64) -> usize {
        let mut acc = 0;
        for _ in 0..m {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
            assert!(k <= self.size as u64 + 1, "element {a} has no finite order");
        }
        k
    }

    pub fn element_orders(&self) -> Vec<u64> {
        (0..self.size).map(|a| self.element_order(a)).collect()
    }

    /// `[x,y]^n x y`.
    #[inline]
    pub fn twisted_product(&self, x: usize, y: usize, n: u64) -> usize {
        let c = self.power(self.commutator(x, y), n);
        self.mul(self.mul(c, x), y)
    }

    /// The table of `x ∘ y = [x,y]^n x y` on the same index set. Inverses are
    /// unchanged because `[x, x^-1] = 1`.
    pub fn twisted(&self, n: u64) -> MultiplicationTable {
        let m = self.size;
        let mut cells = Vec::with_capacity(m * m);
        for x in 0..m {
            for y in 0..m {
                cells.push(self.twisted_product(x, y, n) as u32);
            }
        }
        MultiplicationTable { size: m, cells, inv: self.inv.clone() }
    }

    /// `Err((row_or_col, value))` names a repeated entry; columns are
    /// reported with an offset of `size`.
    pub fn latin_witness(&self) -> Option<(usize, usize)> {
        let m = self.size;
        let mut seen = vec![usize::MAX; m];
        for a in 0..m {
            for b in 0..m {
                let v = self.mul(a, b);
                if seen[v] == a {
                    return Some((a, v));
                }
                seen[v] = a;
            }
        }
        seen.fill(usize::MAX);
        for b in 0..m {
            for a in 0..m {
                let v = self.mul(a, b);
                if seen[v] == b {
                    return Some((m + b, v));
                }
                seen[v] = b;
            }
        }
        None
    }

    pub fn is_latin(&self) -> bool {
        self.latin_witness().is_none()
    }

    /// Generators chosen greedily in index order, each outside the
    /// right-multiplication closure of the previous ones.
    pub fn greedy_generators(&self) -> Vec<usize> {
        let m = self.size;
        let mut covered = vec![false; m];
        covered[0] = true;
        let mut members = vec![0usize];
        let mut gens = Vec::new();
        for idx in 1..m {
            if covered[idx] {
                continue;
            }
            gens.push(idx);
            let mut queue: VecDeque<usize> = members.iter().copied().collect();
            while let Some(x) = queue.pop_front() {
                for &g in &gens {
                    let y = self.mul(x, g);
                    if !covered[y] {
                        covered[y] = true;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
        }
        gens
    }

    /// A triple with `(a b) c != a (b c)`. Only generator left factors are
    /// tried: the set of left-associative elements is closed under products,
    /// so if it holds the generators it is everything.
    pub fn associativity_witness(&self) -> Option<[usize; 3]> {
        let m = self.size;
        for g in self.greedy_generators() {
            for x in 0..m {
                let gx = self.mul(g, x);
                for y in 0..m {
                    if self.mul(gx, y) != self.mul(g, self.mul(x, y)) {
                        return Some([g, x, y]);
                    }
                }
            }
        }
        None
    }
}

/// Wraps a validated table as a group.
pub fn build_table_group(t: MultiplicationTable, label: impl Into<String>) -> Result<Group> {
    let m = t.size();
    for a in 0..m {
        if t.mul(0, a) != a || t.mul(a, 0) != a {
            return Err(Error::InvalidTable { reason: "element 0 is not the identity".into(), witness: vec![a] });
        }
    }
    if let Some((line, v)) = t.latin_witness() {
        return Err(Error::InvalidTable { reason: "not a Latin square".into(), witness: vec![line, v] });
    }
    if let Some(w) = t.associativity_witness() {
        return Err(Error::InvalidTable { reason: "not associative".into(), witness: w.to_vec() });
    }
    Ok(Group::from_repr(label, Repr::Table(Arc::new(t))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop5() -> MultiplicationTable {
        MultiplicationTable::from_rows(&[
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ])
        .unwrap()
    }

    #[test]
    fn trivial_table() {
        let g = build_table_group(MultiplicationTable::from_rows(&[vec![0]]).unwrap(), "1").unwrap();
        assert_eq!(g.order(), 1);
        assert!(g.is_abelian());
    }

    #[test]
    fn non_associative_loop_of_order_5_is_rejected() {
        let t = loop5();
        assert!(t.is_latin());
        // Brute-force confirmation that some triple fails.
        let brute = (0..5).any(|a| (0..5).any(|b| (0..5).any(|c| t.mul(t.mul(a, b), c) != t.mul(a, t.mul(b, c)))));
        assert!(brute);
        match build_table_group(t.clone(), "loop5") {
            Err(Error::InvalidTable { witness, .. }) => {
                let [a, b, c] = [witness[0], witness[1], witness[2]];
                assert_ne!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn non_latin_table_is_rejected() {
        let t = MultiplicationTable::from_rows(&[vec![0, 1], vec![1, 1]]).unwrap();
        assert!(matches!(build_table_group(t, "bad"), Err(Error::InvalidTable { .. })));
    }

    #[test]
    fn cyclic_closure() {
        let (t, elems) = MultiplicationTable::from_generators(0u32, &[1], |a, b| (a + b) % 7);
        assert_eq!(t.size(), 7);
        assert_eq!(elems[0], 0);
        let g = build_table_group(t, "Z7").unwrap();
        assert!(g.is_abelian());
    }
}
