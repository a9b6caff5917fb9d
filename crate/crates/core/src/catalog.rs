//! Concrete groups: the class-2 groups of order `p^4`, abelian groups,
//! Heisenberg groups over `Z/p^k`, unitriangular matrix groups, and the
//! order-structure classification built on them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::arith;
use crate::error::{Error, Result};
use crate::group::{build_pc_group, build_table_group, product_of, Group, MultiplicationTable, PcPresentation};
use crate::invariants::{is_isomorphic_with, order_structure, IsoOptions, OrderStructure};
use crate::twist::string_of;

/// The six nonabelian class-2 groups of order `p^4`, odd `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Which {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Which {
    pub const ALL: [Which; 6] = [Which::A, Which::B, Which::C, Which::D, Which::E, Which::F];

    pub fn letter(self) -> char {
        match self {
            Which::A => 'A',
            Which::B => 'B',
            Which::C => 'C',
            Which::D => 'D',
            Which::E => 'E',
            Which::F => 'F',
        }
    }
}

impl FromStr for Which {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Which::A),
            "B" | "b" => Ok(Which::B),
            "C" | "c" => Ok(Which::C),
            "D" | "d" => Ok(Which::D),
            "E" | "e" => Ok(Which::E),
            "F" | "f" => Ok(Which::F),
            _ => Err(Error::BadSpec { spec: s.into(), reason: "expected one of A..F".into() }),
        }
    }
}

fn require_odd_prime(p: u64) -> Result<u32> {
    if p.is_multiple_of(2) || !arith::is_prime(p) {
        return Err(Error::BadSpec { spec: format!("p={p}"), reason: "p must be an odd prime".into() });
    }
    u32::try_from(p).map_err(|_| Error::BadSpec { spec: format!("p={p}"), reason: "p too large".into() })
}

fn checked_pow(p: u32, k: u32) -> Result<u32> {
    p.checked_pow(k)
        .ok_or_else(|| Error::BadSpec { spec: format!("{p}^{k}"), reason: "modulus does not fit in 32 bits".into() })
}

pub fn burnside_label(which: Which, p: u64) -> String {
    format!("{}(p={p})", which.letter())
}

/// Power-commutator form of the named group. Generators keep their
/// conventional names and order; a conjugation relation `v^-1 u v = u w`
/// becomes the tail `[v,u] = w^-1`.
pub fn burnside_presentation(p: u64, which: Which) -> Result<PcPresentation> {
    let p = require_odd_prime(p)?;
    let p2 = checked_pow(p, 2)?;
    let label = burnside_label(which, p as u64);
    Ok(match which {
        // <x,y | x^{p^3}, y^p, y^-1 x y = x^{1+p^2}>
        Which::A => {
            let p3 = checked_pow(p, 3)?;
            PcPresentation::new(label, vec![p3, p]).with_commutator(1, 0, vec![p3 - p2, 0])
        }
        // <x,y,z | x^{p^2}, y^p, z^p, z^-1 y z = y x^p, x central>
        Which::B => PcPresentation::new(label, vec![p2, p, p]).with_commutator(2, 1, vec![p2 - p, 0, 0]),
        // <x,y | x^{p^2}, y^{p^2}, y^-1 x y = x^{1+p}>
        Which::C => PcPresentation::new(label, vec![p2, p2]).with_commutator(1, 0, vec![p2 - p, 0]),
        // <x,y,z | x^{p^2}, y^p, z^p, z^-1 x z = x^{1+p}, y central>
        Which::D => PcPresentation::new(label, vec![p2, p, p]).with_commutator(2, 0, vec![p2 - p, 0, 0]),
        // <x,y,z | x^{p^2}, y^p, z^p, z^-1 x z = x y, y central>
        Which::E => PcPresentation::new(label, vec![p2, p, p]).with_commutator(2, 0, vec![0, p - 1, 0]),
        // <x,y,z,a | all of order p, a^-1 z a = z x, everything else commuting>
        Which::F => PcPresentation::new(label, vec![p, p, p, p]).with_commutator(3, 2, vec![p - 1, 0, 0, 0]),
    })
}

pub fn burnside_p4(p: u64, which: Which) -> Result<Group> {
    build_pc_group(&burnside_presentation(p, which)?)
}

/// Label such as `Z_27 x Z_3`; cyclic parts listed by increasing prime,
/// largest first within a prime.
pub fn abelian_label(parts: &BTreeMap<u64, Vec<u32>>) -> String {
    let names: Vec<String> = canonical_parts(parts).iter().map(|(p, e)| format!("Z_{}", p.pow(*e))).collect();
    if names.is_empty() {
        "1".into()
    } else {
        names.join(" x ")
    }
}

fn canonical_parts(parts: &BTreeMap<u64, Vec<u32>>) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for (&p, exps) in parts {
        let mut exps = exps.clone();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        out.extend(exps.into_iter().map(|e| (p, e)));
    }
    out
}

/// Direct product of cyclic groups `Z_{p^e}`, given as `prime -> [e, ...]`.
pub fn abelian_group(parts: &BTreeMap<u64, Vec<u32>>) -> Result<Group> {
    for (&p, exps) in parts {
        if !arith::is_prime(p) {
            return Err(Error::BadSpec { spec: p.to_string(), reason: "not a prime".into() });
        }
        if exps.is_empty() || exps.contains(&0) {
            return Err(Error::BadSpec {
                spec: format!("{p}: {exps:?}"),
                reason: "partition must be nonempty with positive parts".into(),
            });
        }
    }
    let label = abelian_label(parts);
    let orders = canonical_parts(parts)
        .into_iter()
        .map(|(p, e)| {
            u32::try_from(p)
                .map_err(|_| Error::BadSpec { spec: p.to_string(), reason: "prime too large".into() })
                .and_then(|p| checked_pow(p, e))
        })
        .collect::<Result<Vec<u32>>>()?;
    if orders.is_empty() {
        return Ok(Group::trivial().with_label(label));
    }
    build_pc_group(&PcPresentation::new(label, orders))
}

/// `Z_{p^e1} x Z_{p^e2} x ...` for a single prime.
pub fn abelian_p_group(p: u64, exps: &[u32]) -> Result<Group> {
    abelian_group(&BTreeMap::from([(p, exps.to_vec())]))
}

pub fn heisenberg_presentation(p: u64, k: u32) -> Result<PcPresentation> {
    let p = require_odd_prime(p)?;
    if k == 0 {
        return Err(Error::BadSpec { spec: "k=0".into(), reason: "k must be positive".into() });
    }
    let q = checked_pow(p, k)?;
    // x = E12, y = E23, z = E13: [x,y] = z, so [y,x] = z^-1.
    Ok(PcPresentation::new(format!("heisenberg(p={p},k={k})"), vec![q, q, q]).with_commutator(1, 0, vec![0, 0, q - 1]))
}

/// 3x3 unitriangular matrices over `Z/p^k`, as `x^a y^b z^c`.
pub fn heisenberg(p: u64, k: u32) -> Result<Group> {
    build_pc_group(&heisenberg_presentation(p, k)?)
}

/// Largest unitriangular group materialized as a table.
const UNITRIANGULAR_LIMIT: u64 = 5_000;

/// `n x n` unitriangular matrices over `Z/p`, closed from the elementary
/// matrices `I + E_{i,i+1}`. Table-backed; class `n - 1`.
pub fn unitriangular(p: u64, n: usize) -> Result<Group> {
    if !arith::is_prime(p) || n < 2 {
        return Err(Error::BadSpec {
            spec: format!("unitriangular:p={p}:n={n}"),
            reason: "need a prime p and n >= 2".into(),
        });
    }
    let dim = (n * (n - 1) / 2) as u32;
    if p.checked_pow(dim).is_none_or(|o| o > UNITRIANGULAR_LIMIT) {
        return Err(Error::BadSpec {
            spec: format!("unitriangular:p={p}:n={n}"),
            reason: format!("order exceeds {UNITRIANGULAR_LIMIT}"),
        });
    }
    let identity: Vec<u64> = (0..n * n).map(|c| u64::from(c / n == c % n)).collect();
    let gens: Vec<Vec<u64>> = (0..n - 1)
        .map(|i| {
            let mut m = identity.clone();
            m[i * n + i + 1] = 1;
            m
        })
        .collect();
    let mul = |a: &Vec<u64>, b: &Vec<u64>| {
        let mut c = vec![0u64; n * n];
        for i in 0..n {
            for k in i..n {
                let aik = a[i * n + k];
                if aik == 0 {
                    continue;
                }
                for j in k..n {
                    c[i * n + j] = (c[i * n + j] + aik * b[k * n + j]) % p;
                }
            }
        }
        c
    };
    let (table, _) = MultiplicationTable::from_generators(identity, &gens, mul);
    build_table_group(table, format!("unitriangular(p={p},n={n})"))
}

/// A named group. Parsed from shorthand strings or a presentation file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CatalogSpec {
    Burnside { which: Which, p: u64 },
    Abelian(BTreeMap<u64, Vec<u32>>),
    Heisenberg { p: u64, k: u32 },
    Unitriangular { p: u64, n: usize },
    Product(Vec<CatalogSpec>),
    File(String),
}

impl CatalogSpec {
    pub fn build(&self) -> Result<Group> {
        match self {
            CatalogSpec::Burnside { which, p } => burnside_p4(*p, *which),
            CatalogSpec::Abelian(parts) => abelian_group(parts),
            CatalogSpec::Heisenberg { p, k } => heisenberg(*p, *k),
            CatalogSpec::Unitriangular { p, n } => unitriangular(*p, *n),
            CatalogSpec::Product(parts) => {
                let groups = parts.iter().map(CatalogSpec::build).collect::<Result<Vec<_>>>()?;
                Ok(product_of(&groups))
            }
            CatalogSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
                build_pc_group(&PcPresentation::from_json(&text)?)
            }
        }
    }

    /// Like `parse`, but a bare letter `A`..`F` names the order `p^4` group
    /// at the given prime.
    pub fn parse_with_prime(s: &str, p: u64) -> Result<CatalogSpec> {
        let t = s.trim();
        if t.len() == 1 {
            if let Ok(which) = t.parse::<Which>() {
                return Ok(CatalogSpec::Burnside { which, p });
            }
        }
        t.parse()
    }
}

fn bad(spec: &str, reason: impl Into<String>) -> Error {
    Error::BadSpec { spec: spec.into(), reason: reason.into() }
}

/// `key=value` fields after the family name.
fn fields<'a>(spec: &str, parts: impl Iterator<Item = &'a str>) -> Result<BTreeMap<&'a str, u64>> {
    let mut out = BTreeMap::new();
    for part in parts {
        let (k, v) = part.split_once('=').ok_or_else(|| bad(spec, format!("expected key=value, got {part:?}")))?;
        let v = v.trim().parse().map_err(|_| bad(spec, format!("{k} is not a number")))?;
        out.insert(k.trim(), v);
    }
    Ok(out)
}

fn split_top_level(spec: &str, inner: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in inner.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(bad(spec, "unbalanced parentheses"));
        }
        cur.push(ch);
    }
    if depth != 0 {
        return Err(bad(spec, "unbalanced parentheses"));
    }
    out.push(cur);
    Ok(out)
}

fn parse_abelian(spec: &str, body: &str) -> Result<BTreeMap<u64, Vec<u32>>> {
    let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for factor in body.split(['×', 'x', '*']) {
        let factor = factor.trim();
        let n: u64 = match factor.split_once('^') {
            Some((b, e)) => {
                let b: u64 = b.trim().parse().map_err(|_| bad(spec, format!("bad factor {factor:?}")))?;
                let e: u32 = e.trim().parse().map_err(|_| bad(spec, format!("bad factor {factor:?}")))?;
                b.checked_pow(e).ok_or_else(|| bad(spec, "factor overflows"))?
            }
            None => factor.parse().map_err(|_| bad(spec, format!("bad factor {factor:?}")))?,
        };
        let (p, e) = arith::prime_power(n).ok_or_else(|| bad(spec, format!("{n} is not a prime power")))?;
        parts.entry(p).or_default().push(e);
    }
    Ok(parts)
}

impl FromStr for CatalogSpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let s = spec.trim();
        if let Some(inner) = s.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
            let parts =
                split_top_level(spec, inner)?.iter().map(|p| p.parse()).collect::<Result<Vec<CatalogSpec>>>()?;
            return Ok(CatalogSpec::Product(parts));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(CatalogSpec::File(path.into()));
        }
        if s.ends_with(".json") || Path::new(s).is_file() {
            return Ok(CatalogSpec::File(s.into()));
        }
        let mut it = s.split(':');
        let family = it.next().unwrap_or_default();
        match family {
            "burnside" => {
                let which: Which = it.next().ok_or_else(|| bad(spec, "missing group letter"))?.parse()?;
                let f = fields(spec, it)?;
                let p = *f.get("p").ok_or_else(|| bad(spec, "missing p"))?;
                Ok(CatalogSpec::Burnside { which, p })
            }
            "heisenberg" => {
                let f = fields(spec, it)?;
                let p = *f.get("p").ok_or_else(|| bad(spec, "missing p"))?;
                let k = f.get("k").copied().unwrap_or(1);
                Ok(CatalogSpec::Heisenberg { p, k: u32::try_from(k).map_err(|_| bad(spec, "k too large"))? })
            }
            "unitriangular" => {
                let f = fields(spec, it)?;
                let p = *f.get("p").ok_or_else(|| bad(spec, "missing p"))?;
                let n = f.get("n").copied().unwrap_or(4) as usize;
                Ok(CatalogSpec::Unitriangular { p, n })
            }
            "abelian" => {
                let body = it.next().ok_or_else(|| bad(spec, "missing factors"))?;
                if it.next().is_some() {
                    return Err(bad(spec, "unexpected trailing fields"));
                }
                Ok(CatalogSpec::Abelian(parse_abelian(spec, body)?))
            }
            _ => Err(bad(spec, format!("unknown family {family:?}"))),
        }
    }
}

impl fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogSpec::Burnside { which, p } => write!(f, "burnside:{}:p={p}", which.letter()),
            CatalogSpec::Abelian(parts) => {
                let factors: Vec<String> = canonical_parts(parts)
                    .iter()
                    .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
                    .collect();
                write!(f, "abelian:{}", factors.join("x"))
            }
            CatalogSpec::Heisenberg { p, k } => write!(f, "heisenberg:p={p}:k={k}"),
            CatalogSpec::Unitriangular { p, n } => write!(f, "unitriangular:p={p}:n={n}"),
            CatalogSpec::Product(parts) => {
                let inner: Vec<String> = parts.iter().map(|s| s.to_string()).collect();
                write!(f, "product({})", inner.join(","))
            }
            CatalogSpec::File(path) => write!(f, "file:{path}"),
        }
    }
}

/// Groups sharing one order structure.
#[derive(Clone, Debug)]
pub struct StructureClass {
    pub order_structure: OrderStructure,
    pub members: Vec<Group>,
    /// Filled in by [`StructureClass::resolve_maximal`].
    pub maximal_members: Vec<Group>,
    pub minimal_member: Option<Group>,
}

impl StructureClass {
    pub fn member_labels(&self) -> Vec<String> {
        self.members.iter().map(|g| g.label().to_string()).collect()
    }

    pub fn resolve_maximal(&mut self, opts: IsoOptions) -> Result<()> {
        self.maximal_members = find_maximal(self, opts)?;
        Ok(())
    }
}

/// Partitions by exact order structure. Classes come in order-structure
/// order; members keep their input order.
pub fn classify_by_order_structure(groups: &[Group]) -> Vec<StructureClass> {
    let mut classes: BTreeMap<OrderStructure, Vec<Group>> = BTreeMap::new();
    for g in groups {
        classes.entry(order_structure(g)).or_default().push(g.clone());
    }
    classes
        .into_iter()
        .map(|(os, members)| {
            let minimal_member = members.iter().find(|g| g.is_abelian()).cloned();
            StructureClass { order_structure: os, members, maximal_members: Vec::new(), minimal_member }
        })
        .collect()
}

/// Members `G` such that no other member `H` has a string term `F_j(H)`,
/// `j >= 1`, isomorphic to `G`.
pub fn find_maximal(cls: &StructureClass, opts: IsoOptions) -> Result<Vec<Group>> {
    let strings = cls.members.iter().map(string_of).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (gi, g) in cls.members.iter().enumerate() {
        let mut reached = false;
        'search: for (hi, s) in strings.iter().enumerate() {
            if hi == gi {
                continue;
            }
            for term in &s.terms()[1..] {
                if is_isomorphic_with(term, g, opts)?.isomorphic {
                    reached = true;
                    break 'search;
                }
            }
        }
        if !reached {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// The partitions of 4, as abelian groups of order `p^4`, largest
/// cyclic factor first.
const P4_PARTITIONS: [&[u32]; 5] = [&[3, 1], &[2, 1, 1], &[2, 2], &[1, 1, 1, 1], &[4]];

/// All eleven class-2 groups of order `p^4`: A..F, then the abelian ones.
pub fn p4_catalog(p: u64) -> Result<Vec<Group>> {
    let mut out = Which::ALL.iter().map(|&w| burnside_p4(p, w)).collect::<Result<Vec<_>>>()?;
    for parts in P4_PARTITIONS {
        out.push(abelian_p_group(p, parts)?);
    }
    Ok(out)
}

/// The order-structure classes of order `p^4`, as labels.
pub fn p4_expected_classes(p: u64) -> Vec<Vec<String>> {
    let name = |w| burnside_label(w, p);
    let ab = |parts: &[u32]| abelian_label(&BTreeMap::from([(p, parts.to_vec())]));
    vec![
        vec![name(Which::A), ab(P4_PARTITIONS[0])],
        vec![name(Which::B), name(Which::D), name(Which::E), ab(P4_PARTITIONS[1])],
        vec![name(Which::C), ab(P4_PARTITIONS[2])],
        vec![name(Which::F), ab(P4_PARTITIONS[3])],
        vec![ab(P4_PARTITIONS[4])],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::verify_class_at_most_2;

    #[test]
    fn spec_strings_round_trip() {
        for s in [
            "burnside:A:p=3",
            "heisenberg:p=3:k=2",
            "abelian:3^3x3",
            "unitriangular:p=3:n=4",
            "product(heisenberg:p=3:k=1,heisenberg:p=5:k=1)",
        ] {
            let spec: CatalogSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        let a: CatalogSpec = "abelian:3^3×3".parse().unwrap();
        assert_eq!(a, CatalogSpec::Abelian(BTreeMap::from([(3, vec![3, 1])])));
        assert_eq!(CatalogSpec::parse_with_prime("E", 5).unwrap(), CatalogSpec::Burnside { which: Which::E, p: 5 });
    }

    #[test]
    fn bad_specs_are_rejected() {
        for s in ["burnside:G:p=3", "heisenberg:k=2", "abelian:6", "product(abelian:3", "mystery:p=3"] {
            assert!(matches!(s.parse::<CatalogSpec>(), Err(Error::BadSpec { .. })), "{s}");
        }
        assert!(burnside_p4(2, Which::A).is_err());
        assert!(heisenberg(9, 1).is_err());
    }

    #[test]
    fn abelian_labels() {
        let g = abelian_group(&BTreeMap::from([(2, vec![1, 2])])).unwrap();
        assert_eq!(g.label(), "Z_4 x Z_2");
        assert_eq!(g.order(), 8);
        assert_eq!(abelian_group(&BTreeMap::new()).unwrap().order(), 1);
    }

    #[test]
    fn catalog_groups_have_order_p4_and_class_2() {
        for g in p4_catalog(3).unwrap() {
            assert_eq!(g.order(), 81, "{}", g.label());
            assert!(verify_class_at_most_2(&g), "{}", g.label());
        }
    }
}
