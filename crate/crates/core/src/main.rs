use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use nilpotwist::catalog::{classify_by_order_structure, p4_catalog, CatalogSpec};
use nilpotwist::group::{check_consistency, class2_witness, ConsistencyOptions, Group, DEFAULT_SEED};
use nilpotwist::invariants::{
    abelian_type, center, derived_subgroup, exponent_of, fingerprint, is_isomorphic_with, order_structure, IsoOptions,
};
use nilpotwist::twist::{string_of, string_report, twist_with, TwistMode};
use nilpotwist::verify::{
    associativity_witness, render_report, run_verify_suite, Format, Suite, VerifySuiteConfig, EXHAUSTIVE_TRIPLES_LIMIT,
};
use nilpotwist::{Error, Result};

#[derive(Parser)]
#[command(name = "nilpotwist", version, about = "Twisted products on class-2 nilpotent groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a group, validate it and print its invariants.
    Build {
        #[command(flatten)]
        common: Common,
        /// Twist the group by this parameter before reporting.
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<i64>,
    },
    /// Compute the string of a group.
    String {
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether two groups are isomorphic.
    Iso {
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        suite: String,
        /// Triples sampled when a group is too large for exhaustive checks.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// List the class-2 groups of order p^4 and their order-structure classes.
    Catalog {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Presentation file (JSON).
    #[arg(long)]
    spec: Vec<PathBuf>,
    /// Group shorthand such as `burnside:A:p=3`, `heisenberg:p=3:k=2`,
    /// `abelian:3^3x3` or a bare letter A..F.
    #[arg(long)]
    group: Vec<String>,
    /// Prime used by bare letters and by suites.
    #[arg(long)]
    p: Vec<u64>,
    /// Also write the JSON output to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Isomorphism search budget, in candidate images.
    #[arg(long, default_value_t = IsoOptions::default().budget)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Refuse to twist groups of class above 2 (default).
    #[arg(long, conflicts_with = "unchecked")]
    strict: bool,
    /// Twist without the class-2 check.
    #[arg(long)]
    unchecked: bool,
    #[arg(long, default_value = "text")]
    format: String,
}

impl Common {
    fn prime(&self) -> u64 {
        self.p.first().copied().unwrap_or(3)
    }

    fn specs(&self) -> Result<Vec<CatalogSpec>> {
        let mut out: Vec<CatalogSpec> = self.spec.iter().map(|p| CatalogSpec::File(p.display().to_string())).collect();
        for g in &self.group {
            out.push(CatalogSpec::parse_with_prime(g, self.prime())?);
        }
        Ok(out)
    }

    fn groups(&self) -> Result<Vec<Group>> {
        self.specs()?.iter().map(CatalogSpec::build).collect()
    }

    fn one_group(&self) -> Result<Group> {
        let mut gs = self.groups()?;
        if gs.len() != 1 {
            return Err(Error::Config(format!("expected exactly one group, got {}", gs.len())));
        }
        Ok(gs.remove(0))
    }

    fn iso(&self) -> IsoOptions {
        IsoOptions { budget: self.budget, ..IsoOptions::default() }
    }

    fn format(&self) -> Result<Format> {
        self.format.parse()
    }

    fn mode(&self) -> TwistMode {
        if self.unchecked {
            TwistMode::Unchecked
        } else {
            TwistMode::Strict
        }
    }

    /// Prints `text` or `value` per `--format`, and writes `value` to
    /// `--json` when given.
    fn emit(&self, text: &str, value: &serde_json::Value) -> Result<()> {
        let rendered = serde_json::to_string_pretty(value).expect("values serialize") + "\n";
        if let Some(path) = &self.json {
            fs::write(path, &rendered)?;
        }
        let mut out = std::io::stdout().lock();
        match self.format()? {
            Format::Json => out.write_all(rendered.as_bytes())?,
            Format::Text => out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn build(common: &Common, twist: Option<i64>) -> Result<i32> {
    let mut g = common.one_group()?;
    let consistency = match g.presentation() {
        Some(p) => Some(check_consistency(p, ConsistencyOptions { seed: common.seed, ..Default::default() })?),
        None => None,
    };
    let mut associative = None;
    if let Some(n) = twist {
        g = twist_with(&g, n, common.mode())?.into_group();
        let exhaustive = g.order() <= EXHAUSTIVE_TRIPLES_LIMIT;
        associative = Some(associativity_witness(&g, exhaustive, 1_000_000, common.seed));
    }
    let is_group = !associative.is_some_and(|w| w.is_some());
    let class2 = if is_group { class2_witness(&g) } else { None };
    let os = order_structure(&g);
    let abelian = g.is_abelian();
    let mut text = format!("{}\n  order {}\n  backend {:?}\n", g.label(), g.order(), g.backend());
    if is_group {
        let z = center(&g);
        let d = derived_subgroup(&g);
        text.push_str(&format!(
            "  class <= 2: {}\n  abelian: {abelian}\n  order structure {os}\n  |Z| {}\n  |G'| {} exponent {}\n",
            class2.is_none(),
            z.order(),
            d.order(),
            exponent_of(&d),
        ));
    } else {
        text.push_str(&format!("  not a group\n  order structure {os}\n"));
    }
    if let Some(c) = &consistency {
        text.push_str(&format!("  consistency {c:?}\n"));
    }
    if abelian {
        text.push_str(&format!("  abelian type {}\n", abelian_type(&os)?));
    }
    if let Some(w) = &class2 {
        text.push_str(&format!("  double commutator witness {w:?}\n"));
    }
    if let Some(Some(w)) = &associative {
        let w: Vec<_> = w.iter().map(|&i| g.element_at(i)).collect();
        text.push_str(&format!("  not associative: (xy)z != x(yz) for {w:?}\n"));
    }
    let value = json!({
        "label": g.label(),
        "order": g.order(),
        "class_at_most_2": is_group.then_some(class2.is_none()),
        "associative": associative.map(|w| w.is_none()),
        "consistency": consistency,
        "fingerprint": is_group.then(|| fingerprint(&g)),
    });
    common.emit(&text, &value)?;
    Ok(0)
}

fn string(common: &Common) -> Result<i32> {
    let g = common.one_group()?;
    let s = string_of(&g)?;
    let report = string_report(&s, common.iso())?;
    let mut text = format!("{} : {} terms\n", report.input, s.len());
    for sy in &report.sylow {
        text.push_str(&format!("  p={} n={} t={}\n", sy.p, sy.n, sy.t));
    }
    for t in &report.terms {
        text.push_str(&format!(
            "  F{} abelian={} |Z|={} order structure {}\n",
            t.index, t.abelian, t.center_order, t.fingerprint.order_structure
        ));
    }
    text.push_str(&format!("  pairwise non-isomorphic: {}\n", report.pairwise_non_isomorphic));
    common.emit(&text, &serde_json::to_value(&report).expect("reports serialize"))?;
    Ok(0)
}

fn iso(common: &Common) -> Result<i32> {
    let gs = common.groups()?;
    let [g, h] = gs.as_slice() else {
        return Err(Error::Config(format!("iso needs exactly two groups, got {}", gs.len())));
    };
    let v = is_isomorphic_with(g, h, common.iso())?;
    let mut text = format!("{} {} {}\n", g.label(), if v.isomorphic { "~=" } else { "!~=" }, h.label());
    if let Some(field) = &v.separating_invariant {
        text.push_str(&format!("  separated by {field}\n"));
    }
    for (a, b) in v.witness.iter().flatten() {
        text.push_str(&format!("  {a:?} -> {b:?}\n"));
    }
    common.emit(&text, &json!({ "left": g.label(), "right": h.label(), "verdict": v }))?;
    Ok(0)
}

fn verify(common: &Common, suite: &str, samples: u64) -> Result<i32> {
    let mut cfg = VerifySuiteConfig::new(suite.parse::<Suite>()?);
    if !common.p.is_empty() {
        cfg.primes = common.p.clone();
    }
    cfg.groups = common.specs()?;
    cfg.budget = common.budget;
    cfg.seed = common.seed;
    cfg.samples = samples;
    let report = run_verify_suite(&cfg)?;
    let json = render_report(&report, Format::Json);
    if let Some(path) = &common.json {
        fs::write(path, &json)?;
    }
    let mut out = std::io::stdout().lock();
    match common.format()? {
        Format::Json => out.write_all(&json)?,
        Format::Text => out.write_all(&render_report(&report, Format::Text))?,
    }
    if common.format()? == Format::Text {
        for (name, ms) in &report.timings {
            eprintln!("{ms:>8} ms  {name}");
        }
    }
    Ok(report.exit_code())
}

fn catalog(common: &Common) -> Result<i32> {
    let groups = if common.group.is_empty() && common.spec.is_empty() {
        p4_catalog(common.prime())?
    } else {
        common.groups()?
    };
    let mut classes = classify_by_order_structure(&groups);
    for c in &mut classes {
        c.resolve_maximal(common.iso())?;
    }
    let mut text = String::new();
    let mut rows = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let maximal: Vec<&str> = c.maximal_members.iter().map(Group::label).collect();
        text.push_str(&format!(
            "X{} {}\n  members {{{}}}\n  maximal {{{}}}\n  minimal {}\n",
            i + 1,
            c.order_structure,
            c.member_labels().join(", "),
            maximal.join(", "),
            c.minimal_member.as_ref().map_or("-", Group::label),
        ));
        rows.push(json!({
            "order_structure": c.order_structure,
            "members": c.member_labels(),
            "maximal": maximal,
            "minimal": c.minimal_member.as_ref().map(Group::label),
        }));
    }
    common.emit(&text, &json!({ "classes": rows }))?;
    Ok(0)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::BadSpec { .. } | Error::Io(_) => 2,
        Error::SearchBudgetExceeded { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build { common, twist } => build(common, *twist),
        Command::String { common } => string(common),
        Command::Iso { common } => iso(common),
        Command::Verify { common, suite, samples } => verify(common, suite, *samples),
        Command::Catalog { common } => catalog(common),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
