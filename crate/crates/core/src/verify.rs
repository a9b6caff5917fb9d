//! Verification suites: exhaustive checks of the twist identities, the string
//! theorem and the order-`p^4` classification, collected into reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::catalog::{
    abelian_group, classify_by_order_structure, find_maximal, p4_catalog, p4_expected_classes, CatalogSpec, Which,
};
use crate::error::{Error, Result};
use crate::group::{check_consistency, class2_witness, ConsistencyOptions, Element, Group, DEFAULT_SEED};
use crate::invariants::{
    center, derived_subgroup, exponent_of, is_isomorphic_with, order_structure, IsoOptions, OrderStructure, Subgroup,
};
use crate::twist::{iterate_twist, string_of, sylow_factors, twist, twist_with, TwistMode};

/// Largest order for which suites materialize full multiplication tables.
pub const TABLE_LIMIT: u64 = 4096;

/// Largest order for which associativity is checked on every triple.
pub const EXHAUSTIVE_TRIPLES_LIMIT: u64 = 81;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    LemmaS,
    LemmaCenter,
    Theorem,
    P4Classification,
    Corollary,
    Associativity,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::LemmaS,
        Suite::LemmaCenter,
        Suite::Theorem,
        Suite::P4Classification,
        Suite::Corollary,
        Suite::Associativity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaS => "lemma-s",
            Suite::LemmaCenter => "lemma-center",
            Suite::Theorem => "theorem",
            Suite::P4Classification => "p4-classification",
            Suite::Corollary => "corollary",
            Suite::Associativity => "associativity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifySuiteConfig {
    pub suite: Suite,
    pub primes: Vec<u64>,
    /// Overrides the suite's default fixtures when nonempty.
    pub groups: Vec<CatalogSpec>,
    /// Isomorphism search budget, in candidate images.
    pub budget: u64,
    pub seed: u64,
    /// Triples sampled when a group is too large for exhaustive checks.
    pub samples: u64,
}

impl VerifySuiteConfig {
    pub fn new(suite: Suite) -> Self {
        VerifySuiteConfig {
            suite,
            primes: vec![3],
            groups: Vec::new(),
            budget: IsoOptions::default().budget,
            seed: DEFAULT_SEED,
            samples: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 || self.samples == 0 {
            return Err(Error::Config("budgets must be positive".into()));
        }
        if self.groups.is_empty() && self.primes.is_empty() {
            return Err(Error::Config("no primes and no groups given".into()));
        }
        for &p in &self.primes {
            if p % 2 == 0 || !arith::is_prime(p) {
                return Err(Error::Config(format!("{p} is not an odd prime")));
            }
        }
        Ok(())
    }

    fn iso(&self) -> IsoOptions {
        IsoOptions { budget: self.budget, ..IsoOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    BudgetExceeded,
}

impl Status {
    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::BudgetExceeded => "BUDGET",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    /// Unique within a report: `anchor/subject`.
    pub name: String,
    /// The property being checked.
    pub anchor: String,
    pub subject: String,
    pub status: Status,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<String>,
    /// Command that reruns the check.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub replay: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Report {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub suite: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub version: String,
    /// Wall-clock milliseconds per check; text output only.
    #[serde(skip)]
    pub timings: BTreeMap<String, u128>,
}

impl PartialEq for Report {
    fn eq(&self, other: &Self) -> bool {
        self.suite == other.suite
            && self.inputs == other.inputs
            && self.checks == other.checks
            && self.seed == other.seed
            && self.version == other.version
    }
}

impl Eq for Report {}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }

    /// 0 on pass, 1 on any failed check, 3 when only budgets ran out.
    pub fn exit_code(&self) -> i32 {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else if self.checks.iter().any(|c| c.status == Status::BudgetExceeded) {
            3
        } else {
            0
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn checks_for<'a>(&'a self, anchor: &'a str) -> impl Iterator<Item = &'a Check> {
        self.checks.iter().filter(move |c| c.anchor == anchor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::Config(format!("unknown format {s:?}"))),
        }
    }
}

/// Deterministic rendering: JSON with sorted keys, or one line per check.
pub fn render_report(r: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Json => {
            let value = serde_json::to_value(r).expect("reports serialize");
            let mut out = if value.as_object().is_some_and(|m| m.is_empty()) {
                "{}".to_string()
            } else {
                serde_json::to_string_pretty(&value).expect("values serialize")
            };
            out.push('\n');
            out.into_bytes()
        }
        Format::Text => {
            let mut out = String::new();
            for c in &r.checks {
                out.push_str(&format!("{} {} {} ({})\n", c.status.tag(), c.anchor, c.detail, c.subject));
                for w in &c.witness {
                    out.push_str(&format!("    witness: {w}\n"));
                }
                if c.status != Status::Pass && !c.replay.is_empty() {
                    out.push_str(&format!("    replay: {}\n", c.replay));
                }
            }
            if !r.suite.is_empty() {
                let passed = r.checks.iter().filter(|c| c.status == Status::Pass).count();
                out.push_str(&format!("{}: {passed}/{} checks passed\n", r.suite, r.checks.len()));
            }
            out.into_bytes()
        }
    }
}

pub fn parse_report(json: &str) -> Result<Report> {
    serde_json::from_str(json).map_err(|e| Error::Config(format!("bad report: {e}")))
}

/// A group together with the spec that rebuilds it.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub spec: CatalogSpec,
    pub group: Group,
}

impl Fixture {
    pub fn new(spec: CatalogSpec) -> Result<Fixture> {
        let group = spec.build()?;
        Ok(Fixture { spec, group })
    }
}

/// Class-2 fixtures per prime: the order-`p^4` catalog and the Heisenberg
/// groups small enough to tabulate.
pub fn default_fixtures(p: u64) -> Result<Vec<Fixture>> {
    let mut specs: Vec<CatalogSpec> = Which::ALL.iter().map(|&which| CatalogSpec::Burnside { which, p }).collect();
    for part in [&[3u32, 1][..], &[2, 1, 1], &[2, 2], &[1, 1, 1, 1], &[4]] {
        specs.push(CatalogSpec::Abelian(BTreeMap::from([(p, part.to_vec())])));
    }
    for k in 1..=3 {
        if p.checked_pow(3 * k).is_some_and(|o| o <= 729) {
            specs.push(CatalogSpec::Heisenberg { p, k });
        }
    }
    specs.into_iter().map(Fixture::new).collect()
}

struct Runner<'a> {
    cfg: &'a VerifySuiteConfig,
    checks: Vec<Check>,
    timings: BTreeMap<String, u128>,
}

/// What a single check concluded.
struct Outcome {
    status: Status,
    detail: String,
    witness: Vec<String>,
}

impl Outcome {
    fn pass(detail: impl Into<String>) -> Outcome {
        Outcome { status: Status::Pass, detail: detail.into(), witness: Vec::new() }
    }

    fn fail(detail: impl Into<String>, witness: Vec<String>) -> Outcome {
        Outcome { status: Status::Fail, detail: detail.into(), witness }
    }

    fn expect(ok: bool, detail: impl Into<String>, witness: impl FnOnce() -> Vec<String>) -> Outcome {
        if ok {
            Outcome::pass(detail)
        } else {
            Outcome::fail(detail, witness())
        }
    }
}

impl<'a> Runner<'a> {
    fn record(&mut self, anchor: &str, subject: &str, replay: String, f: impl FnOnce() -> Result<Outcome>) {
        let start = Instant::now();
        let outcome = match f() {
            Ok(o) => o,
            Err(Error::SearchBudgetExceeded { explored, context }) => Outcome {
                status: Status::BudgetExceeded,
                detail: format!("search budget exhausted after {explored} candidates"),
                witness: vec![context],
            },
            Err(e) => Outcome::fail(format!("error: {e}"), vec![e.to_string()]),
        };
        let name = format!("{anchor}/{subject}");
        self.timings.insert(name.clone(), start.elapsed().as_millis());
        self.checks.push(Check {
            name,
            anchor: anchor.into(),
            subject: subject.into(),
            status: outcome.status,
            detail: outcome.detail,
            witness: outcome.witness,
            replay,
        });
    }

    fn replay(&self, specs: &[&CatalogSpec]) -> String {
        let mut cmd = format!("nilpotwist verify --suite {}", self.cfg.suite);
        if specs.is_empty() {
            for p in &self.cfg.primes {
                cmd.push_str(&format!(" --p {p}"));
            }
        }
        for s in specs {
            cmd.push_str(&format!(" --group '{s}'"));
        }
        cmd.push_str(&format!(" --seed {} --budget {}", self.cfg.seed, self.cfg.budget));
        cmd
    }

    fn fixtures(&self) -> Result<Vec<Fixture>> {
        if !self.cfg.groups.is_empty() {
            return self.cfg.groups.iter().cloned().map(Fixture::new).collect();
        }
        let mut out = Vec::new();
        for &p in &self.cfg.primes {
            out.extend(default_fixtures(p)?);
        }
        Ok(out)
    }
}

fn show(g: &Group, e: &Element) -> String {
    format!("{}{:?}", g.label(), e)
}

fn tables_equal(a: &Group, b: &Group) -> Option<[usize; 2]> {
    let (ta, tb) = (a.cayley_table(), b.cayley_table());
    let m = ta.size();
    (0..m).flat_map(|x| (0..m).map(move |y| [x, y])).find(|&[x, y]| ta.mul(x, y) != tb.mul(x, y))
}

/// Runs the configured suite.
pub fn run_verify_suite(cfg: &VerifySuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let mut runner = Runner { cfg, checks: Vec::new(), timings: BTreeMap::new() };
    let inputs: Vec<String> = match cfg.suite {
        Suite::LemmaS => suite_lemma_s(&mut runner)?,
        Suite::LemmaCenter => suite_lemma_center(&mut runner)?,
        Suite::Theorem => suite_theorem(&mut runner)?,
        Suite::P4Classification => suite_p4(&mut runner)?,
        Suite::Corollary => suite_corollary(&mut runner)?,
        Suite::Associativity => suite_associativity(&mut runner)?,
    };
    let mut checks = runner.checks;
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Report {
        suite: cfg.suite.to_string(),
        inputs,
        checks,
        seed: Some(cfg.seed),
        version: env!("CARGO_PKG_VERSION").to_string(),
        timings: runner.timings,
    })
}

fn too_large(g: &Group) -> Outcome {
    Outcome {
        status: Status::BudgetExceeded,
        detail: format!("order {} exceeds table limit {TABLE_LIMIT}", g.order()),
        witness: vec![g.label().to_string()],
    }
}

fn suite_lemma_s(r: &mut Runner) -> Result<Vec<String>> {
    let fixtures = r.fixtures()?;
    for fx in &fixtures {
        let g = &fx.group;
        let replay = r.replay(&[&fx.spec]);
        r.record("iteration-law", g.label(), replay.clone(), || {
            if g.order() > TABLE_LIMIT {
                return Ok(too_large(g));
            }
            let mut compared = 0;
            for n in 1..=5i64 {
                let mut literal = g.clone();
                for i in 0..=6u32 {
                    if i > 0 {
                        literal = twist(&literal, n)?.into_group();
                    }
                    let closed = iterate_twist(g, n, i)?.into_group();
                    if let Some([x, y]) = tables_equal(&closed, &literal) {
                        return Ok(Outcome::fail(
                            format!("n={n} i={i}: closed form differs from {i}-fold twist"),
                            vec![show(g, &g.element_at(x)), show(g, &g.element_at(y))],
                        ));
                    }
                    compared += 1;
                }
            }
            Ok(Outcome::pass(format!("{compared} (n,i) tables identical for n<=5, i<=6")))
        });
        let replay = r.replay(&[&fx.spec]);
        r.record("order-structure-preserved", g.label(), replay, || {
            let base = order_structure(g);
            let t = exponent_of(&derived_subgroup(g));
            let levels = arith::factorize(t).iter().map(|&(_, e)| e).max().unwrap_or(0);
            for n in 0..=5i64 {
                for i in 0..=levels {
                    let os = order_structure(iterate_twist(g, n, i)?.group());
                    if os != base {
                        return Ok(Outcome::fail(format!("n={n} i={i}: {os} != {base}"), vec![os.to_string()]));
                    }
                }
            }
            Ok(Outcome::pass(format!("{base} for n<=5, i<={levels}")))
        });
    }
    let z2z4 = abelian_group(&BTreeMap::from([(2, vec![1, 2])]))?;
    let replay = r.replay(&[]);
    r.record("abelian-order-structure", z2z4.label(), replay, || {
        let os = order_structure(&z2z4);
        let expected = OrderStructure::from_pairs([(1, 1), (2, 3), (4, 4)]);
        Ok(Outcome::expect(os == expected, format!("{os}"), || vec![format!("expected {expected}")]))
    });
    Ok(fixtures.iter().map(|f| f.spec.to_string()).collect())
}

/// Center criteria for a `p`-group with `n = (p-1)/2`.
fn center_criteria(r: &mut Runner, spec: &CatalogSpec, g: &Group, p: u64) -> Result<()> {
    let n = ((p - 1) / 2) as i64;
    let e = exponent_of(&derived_subgroup(g));
    let t = arith::exact_log(p, e).expect("derived exponent of a p-group");
    let levels: Vec<Group> = (0..=t).map(|i| iterate_twist(g, n, i).map(|s| s.into_group())).collect::<Result<_>>()?;
    let centers: Vec<Subgroup> = levels.iter().map(center).collect();
    let label = g.label().to_string();

    let replay = r.replay(&[spec]);
    r.record("center-power-criterion", &label, replay, || {
        for i in 0..=t {
            let q = p.pow(i) as i64;
            for x in g.elements() {
                let lhs = centers[i as usize].contains(&x);
                let rhs = centers[0].contains(&g.power(&x, q));
                if lhs != rhs {
                    return Ok(Outcome::fail(
                        format!("i={i}: x in Z(S^i) is {lhs} but x^{q} in Z(G) is {rhs}"),
                        vec![show(g, &x)],
                    ));
                }
            }
        }
        Ok(Outcome::pass(format!("x in Z(S^i) iff x^(p^i) in Z(G), all {} elements, i<={t}", g.order())))
    });

    let replay = r.replay(&[spec]);
    r.record("center-step-criterion", &label, replay, || {
        for i in 0..t as usize {
            for x in g.elements() {
                let lhs = centers[i + 1].contains(&x);
                let rhs = centers[i].contains(&levels[i].power(&x, p as i64));
                if lhs != rhs {
                    return Ok(Outcome::fail(
                        format!("i={i}: x in Z(S^(i+1)) is {lhs} but x^p in Z(S^i) is {rhs}"),
                        vec![show(g, &x)],
                    ));
                }
            }
        }
        Ok(Outcome::pass(format!("x in Z(S^(i+1)) iff x^p in Z(S^i), i<{t}")))
    });

    let replay = r.replay(&[spec]);
    r.record("center-normal-in-next-level", &label, replay, || {
        for i in 0..t as usize {
            let next = &levels[i + 1];
            let z = &centers[i];
            for a in z.elements() {
                for b in z.elements() {
                    if !z.contains(&next.multiply(a, b)) {
                        return Ok(Outcome::fail(
                            format!("i={i}: Z(S^i) not closed at level i+1"),
                            vec![show(g, a), show(g, b)],
                        ));
                    }
                }
                for x in next.elements() {
                    let conj = next.multiply(&next.multiply(&next.inverse(&x), a), &x);
                    if !z.contains(&conj) {
                        return Ok(Outcome::fail(
                            format!("i={i}: Z(S^i) not normal at level i+1"),
                            vec![show(g, a), show(g, &x)],
                        ));
                    }
                }
            }
        }
        Ok(Outcome::pass(format!("Z(S^i) is a normal subgroup of S^(i+1), i<{t}")))
    });

    let replay = r.replay(&[spec]);
    r.record("center-chain", &label, replay, || {
        let orders: Vec<u64> = centers.iter().map(Subgroup::order).collect();
        let chain = orders.iter().map(u64::to_string).collect::<Vec<_>>().join("<");
        let strict = orders.windows(2).all(|w| w[0] < w[1]);
        let ends_abelian = levels.last().is_some_and(Group::is_abelian);
        Ok(Outcome::expect(strict && ends_abelian, format!("|Z| chain {chain}"), || {
            orders.iter().map(u64::to_string).collect()
        }))
    });
    Ok(())
}

fn suite_lemma_center(r: &mut Runner) -> Result<Vec<String>> {
    let fixtures: Vec<Fixture> = r.fixtures()?.into_iter().filter(|f| !f.group.is_abelian()).collect();
    for fx in &fixtures {
        if fx.group.order() > TABLE_LIMIT {
            let replay = r.replay(&[&fx.spec]);
            r.record("center-power-criterion", fx.group.label(), replay, || Ok(too_large(&fx.group)));
            continue;
        }
        for sf in sylow_factors(&fx.group)? {
            if !sf.group.is_abelian() {
                center_criteria(r, &fx.spec, &sf.group, sf.prime)?;
            }
        }
    }
    Ok(fixtures.iter().map(|f| f.spec.to_string()).collect())
}

fn suite_theorem(r: &mut Runner) -> Result<Vec<String>> {
    let fixtures = r.fixtures()?;
    let iso = r.cfg.iso();
    for fx in &fixtures {
        let g = &fx.group;
        let s = string_of(g)?;
        let label = g.label().to_string();
        let replay = r.replay(&[&fx.spec]);
        r.record("center-chain", &label, replay, || {
            let orders: Vec<u64> = s.terms().iter().map(|t| center(t).order()).collect();
            let chain = orders.iter().map(u64::to_string).collect::<Vec<_>>().join("<");
            Ok(Outcome::expect(orders.windows(2).all(|w| w[0] < w[1]), format!("|Z| chain {chain}"), || {
                orders.iter().map(u64::to_string).collect()
            }))
        });
        let replay = r.replay(&[&fx.spec]);
        r.record("terms-non-isomorphic", &label, replay, || {
            let terms = s.terms();
            for i in 0..terms.len() {
                for j in i + 1..terms.len() {
                    let v = is_isomorphic_with(&terms[i], &terms[j], iso)?;
                    if v.isomorphic {
                        let w = v.witness.unwrap_or_default();
                        return Ok(Outcome::fail(
                            format!("F{i} and F{j} are isomorphic"),
                            w.iter().map(|(a, b)| format!("{a:?} -> {b:?}")).collect(),
                        ));
                    }
                }
            }
            Ok(Outcome::pass(format!("{} terms pairwise non-isomorphic", terms.len())))
        });
        let replay = r.replay(&[&fx.spec]);
        r.record("last-term-abelian", &label, replay, || {
            let last = s.last();
            let m = last.order() as usize;
            if m as u64 > TABLE_LIMIT {
                return Ok(Outcome::expect(
                    last.is_abelian(),
                    format!("F{} commutative on generators", s.len() - 1),
                    || vec![last.label().to_string()],
                ));
            }
            let t = last.cayley_table();
            let pair = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).find(|&(x, y)| t.mul(x, y) != t.mul(y, x));
            Ok(match pair {
                None => Outcome::pass(format!("F{} commutative on all {} pairs", s.len() - 1, m * m)),
                Some((x, y)) => Outcome::fail(
                    "last term is not commutative",
                    vec![show(last, &last.element_at(x)), show(last, &last.element_at(y))],
                ),
            })
        });
    }
    // Last terms agree across each order-structure class.
    let groups: Vec<Group> = fixtures.iter().map(|f| f.group.clone()).collect();
    let spec_of = |g: &Group| fixtures.iter().find(|f| f.group.same_as(g)).map(|f| &f.spec);
    for cls in classify_by_order_structure(&groups) {
        let Some(minimal) = cls.minimal_member.clone() else { continue };
        for member in &cls.members {
            let specs: Vec<&CatalogSpec> = [member, &minimal].into_iter().filter_map(spec_of).collect();
            let replay = r.replay(&specs);
            r.record("last-terms-agree", member.label(), replay, || {
                let s = string_of(member)?;
                let v = is_isomorphic_with(s.last(), &minimal, iso)?;
                Ok(Outcome::expect(v.isomorphic, format!("F{} isomorphic to {}", s.len() - 1, minimal.label()), || {
                    vec![format!("separated by {}", v.separating_invariant.clone().unwrap_or_default())]
                }))
            });
        }
    }
    Ok(fixtures.iter().map(|f| f.spec.to_string()).collect())
}

fn suite_p4(r: &mut Runner) -> Result<Vec<String>> {
    let iso = r.cfg.iso();
    let primes = r.cfg.primes.clone();
    for &p in &primes {
        let groups = p4_catalog(p)?;
        let subject = format!("p={p}");
        let replay = r.replay(&[]);
        r.record("presentations-consistent", &subject, replay, || {
            let opts = ConsistencyOptions { seed: r.cfg.seed, samples: r.cfg.samples, ..Default::default() };
            for g in &groups {
                let pres = g.presentation().expect("catalog groups are polycyclic");
                check_consistency(pres, opts)?;
                if let Some(w) = class2_witness(g) {
                    return Ok(Outcome::fail(
                        format!("{} has class above 2", g.label()),
                        w.iter().map(|e| show(g, e)).collect(),
                    ));
                }
            }
            Ok(Outcome::pass(format!("{} presentations consistent, class <= 2", groups.len())))
        });

        let classes = classify_by_order_structure(&groups);
        let replay = r.replay(&[]);
        r.record("order-structure-classes", &subject, replay, || {
            let mut found: Vec<Vec<String>> = classes.iter().map(|c| sorted(c.member_labels())).collect();
            let mut expected: Vec<Vec<String>> = p4_expected_classes(p).into_iter().map(sorted).collect();
            found.sort();
            expected.sort();
            let summary = classes.iter().map(|c| format!("{{{}}}", c.member_labels().join(", "))).collect::<Vec<_>>();
            Ok(Outcome::expect(found == expected, format!("{} classes: {}", classes.len(), summary.join(" ")), || {
                vec![format!("expected {expected:?}")]
            }))
        });

        let replay = r.replay(&[]);
        r.record("pairwise-non-isomorphic", &subject, replay, || {
            let mut calls = 0;
            for i in 0..groups.len() {
                for j in i + 1..groups.len() {
                    calls += 1;
                    let v = is_isomorphic_with(&groups[i], &groups[j], iso)?;
                    if v.isomorphic {
                        return Ok(Outcome::fail(
                            format!("{} and {} are isomorphic", groups[i].label(), groups[j].label()),
                            v.witness.unwrap_or_default().iter().map(|(a, b)| format!("{a:?} -> {b:?}")).collect(),
                        ));
                    }
                }
            }
            Ok(Outcome::pass(format!("{} groups, {calls} pairs non-isomorphic", groups.len())))
        });

        let expected_max = [(vec![Which::A], "A"), (vec![Which::B, Which::D, Which::E], "B")];
        for (whiches, key) in expected_max {
            let key_label = crate::catalog::burnside_label(key.parse()?, p);
            let Some(cls) = classes.iter().find(|c| c.member_labels().contains(&key_label)) else { continue };
            let subject = format!("{} p={p}", cls.member_labels().join(","));
            let replay = r.replay(&[]);
            r.record("maximal-elements", &subject, replay, || {
                let found: Vec<String> = find_maximal(cls, iso)?.iter().map(|g| g.label().to_string()).collect();
                let expected: Vec<String> = whiches.iter().map(|&w| crate::catalog::burnside_label(w, p)).collect();
                Ok(Outcome::expect(found == expected, format!("maximal {{{}}}", found.join(", ")), || {
                    vec![format!("expected {{{}}}", expected.join(", "))]
                }))
            });
        }
    }
    Ok(primes.iter().map(|p| format!("p4_catalog(p={p})")).collect())
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

fn suite_corollary(r: &mut Runner) -> Result<Vec<String>> {
    let fixtures = if r.cfg.groups.is_empty() {
        vec![Fixture::new("product(heisenberg:p=3:k=1,heisenberg:p=5:k=1)".parse()?)?]
    } else {
        r.fixtures()?
    };
    let iso = r.cfg.iso();
    for fx in &fixtures {
        let g = &fx.group;
        let replay = r.replay(&[&fx.spec]);
        r.record("non-isomorphic-count", g.label(), replay, || {
            let e = exponent_of(&derived_subgroup(g));
            let bound: u32 = arith::factorize(e).iter().map(|&(_, r)| r).sum();
            let s = string_of(g)?;
            let terms = s.terms();
            let nonabelian: Vec<usize> = (0..terms.len()).filter(|&i| !terms[i].is_abelian()).collect();
            for (a, &i) in nonabelian.iter().enumerate() {
                for &j in &nonabelian[a + 1..] {
                    if is_isomorphic_with(&terms[i], &terms[j], iso)?.isomorphic {
                        return Ok(Outcome::fail(format!("F{i} and F{j} are isomorphic"), vec![]));
                    }
                }
            }
            let centers: Vec<String> = terms.iter().map(|t| center(t).order().to_string()).collect();
            let ok = terms.len() as u32 == bound + 1 && nonabelian.len() as u32 == bound && s.last().is_abelian();
            Ok(Outcome::expect(
                ok,
                format!(
                    "derived exponent {e}: {} terms, {} nonabelian pairwise non-isomorphic, last abelian; |Z| {}",
                    terms.len(),
                    nonabelian.len(),
                    centers.join("<")
                ),
                || vec![format!("expected {} nonabelian terms", bound)],
            ))
        });
    }
    Ok(fixtures.iter().map(|f| f.spec.to_string()).collect())
}

/// A triple `(x∘y)∘z != x∘(y∘z)`, over all triples or a seeded sample.
pub fn associativity_witness(g: &Group, exhaustive: bool, samples: u64, seed: u64) -> Option<[usize; 3]> {
    let t = g.cayley_table();
    let m = t.size();
    let fails = |[x, y, z]: [usize; 3]| t.mul(t.mul(x, y), z) != t.mul(x, t.mul(y, z));
    if exhaustive {
        (0..m).flat_map(|x| (0..m).flat_map(move |y| (0..m).map(move |z| [x, y, z]))).find(|&w| fails(w))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| [rng.random_range(0..m), rng.random_range(0..m), rng.random_range(0..m)])
            .find(|&w| fails(w))
    }
}

fn suite_associativity(r: &mut Runner) -> Result<Vec<String>> {
    let mut fixtures = r.fixtures()?;
    if r.cfg.groups.is_empty() {
        for &p in &r.cfg.primes {
            if p.pow(6) <= TABLE_LIMIT {
                fixtures.push(Fixture::new(CatalogSpec::Unitriangular { p, n: 4 })?);
            }
        }
    }
    let (seed, samples) = (r.cfg.seed, r.cfg.samples);
    for fx in &fixtures {
        let g = &fx.group;
        let replay = r.replay(&[&fx.spec]);
        if class2_witness(g).is_some() {
            r.record("class-3-non-associative", g.label(), replay, || {
                if g.order() > TABLE_LIMIT {
                    return Ok(too_large(g));
                }
                let t = twist_with(g, 1, TwistMode::Unchecked)?.into_group();
                let exhaustive = g.order() <= EXHAUSTIVE_TRIPLES_LIMIT;
                Ok(match associativity_witness(&t, exhaustive, samples, seed) {
                    Some(w) => {
                        let w = w.map(|i| g.element_at(i));
                        Outcome {
                            status: Status::Pass,
                            detail: "twist by 1 is not associative".into(),
                            witness: w.iter().map(|e| show(g, e)).collect(),
                        }
                    }
                    None => Outcome::fail("no non-associative triple found for the twist by 1", vec![]),
                })
            });
            continue;
        }
        r.record("twisted-associativity", g.label(), replay, || {
            if g.order() > TABLE_LIMIT {
                return Ok(too_large(g));
            }
            let e = exponent_of(&derived_subgroup(g));
            let exhaustive = g.order() <= EXHAUSTIVE_TRIPLES_LIMIT;
            for n in 0..=e as i64 {
                let t = twist(g, n)?.into_group();
                if let Some(w) = associativity_witness(&t, exhaustive, samples, seed) {
                    return Ok(Outcome::fail(
                        format!("twist by {n} is not associative"),
                        w.iter().map(|&i| show(g, &g.element_at(i))).collect(),
                    ));
                }
            }
            let mode = if exhaustive { "all triples".to_string() } else { format!("{samples} sampled triples") };
            Ok(Outcome::pass(format!("associative for n=0..={e}, {mode}")))
        });
    }
    Ok(fixtures.iter().map(|f| f.spec.to_string()).collect())
}
