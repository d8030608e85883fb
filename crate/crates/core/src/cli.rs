//! Command-line surface. Every command produces a [`RunReport`]; the exit
//! code is 0 when the property holds (or a search succeeds), 1 when it
//! fails, 2 when a budget ran out and 3 on input errors.

use crate::algebra::{
    commutative_majority_search, cong_compose, cong_join, cong_meet, congruences,
    has_majority_term, has_maltsev_term, lattice_checks, parse_algebra, parse_algebra_json,
    polymorphism_search_with_budget, preserves_relations, verify_majority, verify_maltsev,
    FiniteAlgebra, OperationTable, PolyKind, PolySearch, TermSearch, DEFAULT_CLONE_BUDGET,
    DEFAULT_NODE_BUDGET,
};
use crate::demos::{self, DemoData, DEFAULT_SEED, DEMOS};
use crate::error::{Error, Result};
use crate::matrix::{
    builtin_matrix, is_strictly_closed, parse_matrix, replay_closure_witness, ExtendedMatrix,
    BUILTIN_MATRICES,
};
use crate::relobjects::{
    classify, maltsev_coreflection, replay_majority_witness, replay_maltsev_witness,
};
use crate::structures::{parse_structure, parse_structure_json, Structure, DEFAULT_UNIVERSE_CAP};
use crate::witness::Witness;
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNDECIDED: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "majority",
    version,
    about = "Majority and Mal'tsev conditions on finite structures and algebras"
)]
pub struct Cli {
    /// Emit the stable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Node budget for polymorphism search, table budget for term search.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Largest universe any command may construct.
    #[arg(long, global = true, default_value_t = DEFAULT_UNIVERSE_CAP)]
    pub max_universe: usize,
    /// Re-validate every reported witness or certificate through the library.
    #[arg(long, global = true)]
    pub verify_witness: bool,
    /// Seed for sampled sweeps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is a relation strictly closed under an extended matrix?
    CheckClosed {
        structure: PathBuf,
        /// Builtin name (majority, maltsev, unital, subtractive) or matrix file.
        matrix: String,
        /// Relation to check; defaults to the only one.
        #[arg(long)]
        relation: Option<String>,
    },
    /// Mal'tsev-object and majority-object verdicts.
    Classify { structure: PathBuf },
    /// Least enlargement of the relation that is a Mal'tsev object.
    Coreflect {
        structure: PathBuf,
        /// Where to write the result; printed when omitted.
        out: Option<PathBuf>,
    },
    /// Search for a majority or Mal'tsev polymorphism.
    Poly { structure: PathBuf, kind: PolyKind },
    /// Search the ternary term clone of an algebra.
    Terms { algebra: PathBuf, kind: PolyKind },
    /// List congruences, optionally with lattice checks.
    Congruences {
        algebra: PathBuf,
        #[arg(long)]
        checks: bool,
    },
    /// Exhaustive search for commutative majority operations.
    CommutativeMajority { n: usize },
    /// Reproduce every desk-scale claim.
    PaperDemos {
        /// Print the demo inventory without running.
        #[arg(long)]
        list: bool,
        /// Read fixtures from this directory instead of the bundled copies.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

impl clap::ValueEnum for PolyKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[PolyKind::Majority, PolyKind::Maltsev]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 of the canonical text of each parsed input.
    pub inputs: BTreeMap<String, String>,
    pub verdict: Value,
    pub witnesses: Vec<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub audit: Option<bool>,
    pub exit_code: i32,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            verdict: Value::Null,
            witnesses: Vec::new(),
            audit: None,
            exit_code: EXIT_HOLDS,
            lines: Vec::new(),
        }
    }

    fn digest(&mut self, role: &str, canonical: &str) {
        self.inputs.insert(
            role.to_string(),
            hex::encode(Sha256::digest(canonical.as_bytes())),
        );
    }

    fn say(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    /// Records an audit result; a failed audit overrides the exit code.
    fn audited(&mut self, ok: bool) {
        self.audit = Some(self.audit.unwrap_or(true) && ok);
        self.say(format!(
            "witness audit: {}",
            if ok { "ok" } else { "FAILED" }
        ));
        if !ok {
            self.exit_code = EXIT_INPUT_ERROR;
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("report serializes");
            s.push('\n');
            s
        } else {
            let mut s = String::new();
            for line in &self.lines {
                s.push_str(line);
                s.push('\n');
            }
            s
        }
    }
}

/// Rendered output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses arguments and runs. Usage errors map to exit code 3, help and
/// version to 0. In JSON mode input errors are reported on stdout as well.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Output {
                        stdout: text,
                        stderr: String::new(),
                        code: EXIT_HOLDS,
                    }
                }
                _ => Output {
                    stdout: String::new(),
                    stderr: text,
                    code: EXIT_INPUT_ERROR,
                },
            };
        }
    };
    match execute(&cli) {
        Ok(report) => Output {
            stdout: report.render(cli.json),
            stderr: String::new(),
            code: report.exit_code,
        },
        Err(e) => {
            let stdout = if cli.json {
                let v = json!({ "error": e.to_string(), "exit_code": EXIT_INPUT_ERROR });
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&v).expect("serializes")
                )
            } else {
                String::new()
            };
            Output {
                stdout,
                stderr: format!("error: {e}\n"),
                code: EXIT_INPUT_ERROR,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn is_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

pub fn load_structure(path: &Path) -> Result<Structure> {
    let text = read(path)?;
    let s = if is_json(&text) {
        parse_structure_json(&text)
    } else {
        parse_structure(&text)
    };
    s.map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_algebra(path: &Path) -> Result<FiniteAlgebra> {
    let text = read(path)?;
    let a = if is_json(&text) {
        parse_algebra_json(&text)
    } else {
        parse_algebra(&text)
    };
    a.map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn load_matrix(name: &str) -> Result<ExtendedMatrix> {
    if BUILTIN_MATRICES.contains(&name) {
        return builtin_matrix(name);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::UnknownMatrix(name.to_string()));
    }
    parse_matrix(&read(path)?).map_err(|e| Error::Io {
        path: name.to_string(),
        message: e.to_string(),
    })
}

fn check_cube(s: &Structure, cap: usize) -> Result<()> {
    let cube = s.size().checked_pow(3).unwrap_or(usize::MAX);
    if cube > cap {
        return Err(Error::UniverseCap { size: cube, cap });
    }
    Ok(())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn execute(cli: &Cli) -> Result<RunReport> {
    match &cli.command {
        Command::CheckClosed {
            structure,
            matrix,
            relation,
        } => check_closed(cli, structure, matrix, relation.as_deref()),
        Command::Classify { structure } => classify_cmd(cli, structure),
        Command::Coreflect { structure, out } => coreflect(cli, structure, out.as_deref()),
        Command::Poly { structure, kind } => poly(cli, structure, *kind),
        Command::Terms { algebra, kind } => terms(cli, algebra, *kind),
        Command::Congruences { algebra, checks } => congruences_cmd(cli, algebra, *checks),
        Command::CommutativeMajority { n } => commutative(cli, *n),
        Command::PaperDemos { list, data_dir } => paper_demos(cli, *list, data_dir.as_deref()),
    }
}

fn check_closed(cli: &Cli, path: &Path, matrix: &str, relation: Option<&str>) -> Result<RunReport> {
    let s = load_structure(path)?;
    let m = load_matrix(matrix)?;
    let name = match relation {
        Some(n) => n.to_string(),
        None => s.sole_relation()?.0.to_string(),
    };
    let r = s
        .relation(&name)
        .ok_or_else(|| Error::Invalid(format!("no relation `{name}`")))?;
    let mut report = RunReport::new("check-closed");
    report.digest("structure", &s.to_text());
    report.digest("matrix", &m.to_text());
    let v = is_strictly_closed(&r, &m)?;
    report.verdict = json!({ "relation": name, "closed": v.holds });
    report.say(format!("relation {name} strictly closed: {}", yes(v.holds)));
    if let Some(w) = v.witness {
        report.say(format!("witness: {w}"));
        if cli.verify_witness {
            let ok = replay_closure_witness(&r, &m, &w)?;
            report.audited(ok);
        }
        report.witnesses.push(w);
        report.exit_code = report.exit_code.max(EXIT_FAILS);
    }
    Ok(report)
}

fn classify_cmd(cli: &Cli, path: &Path) -> Result<RunReport> {
    let s = load_structure(path)?;
    check_cube(&s, cli.max_universe)?;
    let mut report = RunReport::new("classify");
    report.digest("structure", &s.to_text());
    let v = classify(&s)?;
    report.say(format!("Mal'tsev object: {}", yes(v.is_maltsev_object)));
    report.say(format!("majority object: {}", yes(v.is_majority_object)));
    report.verdict = json!({ "maltsev": v.is_maltsev_object, "majority": v.is_majority_object });
    if let Some(w) = &v.witnesses.maltsev {
        report.say(format!("Mal'tsev witness: {w}"));
        if cli.verify_witness {
            let ok = replay_maltsev_witness(&s, w)?;
            report.audited(ok);
        }
        report.witnesses.push(w.clone());
    }
    if let Some(w) = &v.witnesses.majority {
        report.say(format!("majority witness: {w}"));
        if cli.verify_witness {
            let ok = replay_majority_witness(&s, w)?;
            report.audited(ok);
        }
        report.witnesses.push(w.clone());
    }
    if !(v.is_maltsev_object && v.is_majority_object) {
        report.exit_code = report.exit_code.max(EXIT_FAILS);
    }
    Ok(report)
}

fn coreflect(cli: &Cli, path: &Path, out: Option<&Path>) -> Result<RunReport> {
    let s = load_structure(path)?;
    check_cube(&s, cli.max_universe)?;
    let mut report = RunReport::new("coreflect");
    report.digest("structure", &s.to_text());
    let core = maltsev_coreflection(&s)?;
    let text = core.to_text();
    let (_, before) = s.sole_relation()?;
    let (_, after) = core.sole_relation()?;
    let added = after.len() - before.len();
    report.verdict = json!({ "added": added, "structure": core.to_json() });
    report.say(format!("added {added} tuples"));
    if cli.verify_witness {
        let ok = classify(&core)?.is_maltsev_object;
        report.audited(ok);
    }
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|e| Error::Io {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
            report.say(format!("wrote {}", p.display()));
        }
        None => report.lines.extend(text.lines().map(String::from)),
    }
    Ok(report)
}

fn table_certificate(table: &OperationTable, name: &str) -> Value {
    json!({ "universe": table.size(), "operations": { name: crate::algebra::OperationJson::from(table) } })
}

fn identities(kind: PolyKind, table: &OperationTable) -> Result<bool> {
    Ok(match kind {
        PolyKind::Majority => verify_majority(table)?.holds,
        PolyKind::Maltsev => verify_maltsev(table)?.holds,
    })
}

fn op_name(kind: PolyKind) -> &'static str {
    match kind {
        PolyKind::Majority => "p",
        PolyKind::Maltsev => "q",
    }
}

fn poly(cli: &Cli, path: &Path, kind: PolyKind) -> Result<RunReport> {
    let s = load_structure(path)?;
    let mut report = RunReport::new("poly");
    report.digest("structure", &s.to_text());
    let budget = cli.budget.unwrap_or(DEFAULT_NODE_BUDGET);
    let result = polymorphism_search_with_budget(&s, kind, budget)?;
    report.say(format!(
        "{} polymorphism: {}",
        kind.name(),
        demos::poly_summary(&result)
    ));
    match result {
        PolySearch::Found { table, nodes } => {
            report.verdict = json!({ "kind": kind.name(), "result": "found", "nodes": nodes, "table": table_certificate(&table, op_name(kind)) });
            report
                .lines
                .extend(table.to_text(op_name(kind)).lines().map(String::from));
            if cli.verify_witness {
                let ok = identities(kind, &table)? && preserves_relations(&table, &s);
                report.audited(ok);
            }
        }
        PolySearch::NotFound { nodes } => {
            report.verdict = json!({ "kind": kind.name(), "result": "none", "nodes": nodes });
            report.exit_code = EXIT_FAILS;
        }
        PolySearch::Undecided { nodes } => {
            report.verdict = json!({ "kind": kind.name(), "result": "undecided", "nodes": nodes });
            report.exit_code = EXIT_UNDECIDED;
        }
    }
    Ok(report)
}

fn terms(cli: &Cli, path: &Path, kind: PolyKind) -> Result<RunReport> {
    let a = load_algebra(path)?;
    let mut report = RunReport::new("terms");
    report.digest("algebra", &a.to_text());
    let budget = match cli.budget {
        Some(b) => usize::try_from(b).map_err(|_| Error::Invalid("budget too large".into()))?,
        None => DEFAULT_CLONE_BUDGET,
    };
    let result = match kind {
        PolyKind::Majority => has_majority_term(&a, budget)?,
        PolyKind::Maltsev => has_maltsev_term(&a, budget)?,
    };
    match result {
        TermSearch::Yes(table) => {
            report.say(format!("{} term: yes", kind.name()));
            report
                .lines
                .extend(table.to_text(op_name(kind)).lines().map(String::from));
            report.verdict = json!({ "kind": kind.name(), "result": "yes", "table": table_certificate(&table, op_name(kind)) });
            if cli.verify_witness {
                let ok = identities(kind, &table)?;
                report.audited(ok);
            }
        }
        TermSearch::No { clone_size } => {
            report.say(format!(
                "{} term: no (complete clone of {clone_size} ternary tables)",
                kind.name()
            ));
            report.verdict =
                json!({ "kind": kind.name(), "result": "no", "clone_size": clone_size });
            report.exit_code = EXIT_FAILS;
        }
        TermSearch::Undecided { explored } => {
            report.say(format!(
                "{} term: undecided after {explored} ternary tables",
                kind.name()
            ));
            report.verdict =
                json!({ "kind": kind.name(), "result": "undecided", "explored": explored });
            report.exit_code = EXIT_UNDECIDED;
        }
    }
    Ok(report)
}

fn mark(b: bool) -> &'static str {
    if b {
        "✓"
    } else {
        "✗"
    }
}

fn congruences_cmd(cli: &Cli, path: &Path, checks: bool) -> Result<RunReport> {
    let a = load_algebra(path)?;
    let mut report = RunReport::new("congruences");
    report.digest("algebra", &a.to_text());
    let cs = congruences(&a, cli.max_universe)?;
    report.say(format!("{} congruences", cs.len()));
    for (i, c) in cs.iter().enumerate() {
        report.say(format!("  [{i}] {}", c.describe()));
    }
    let listed: Vec<String> = cs.iter().map(|c| c.describe()).collect();
    if !checks {
        report.verdict = json!({ "congruences": listed });
        return Ok(report);
    }
    let r = lattice_checks(&cs)?;
    report.say(format!(
        "distributive {} permutable {}",
        mark(r.distributive),
        mark(r.permutable)
    ));
    if let Some([i, j, k]) = r.distributivity_witness {
        report.say(format!("distributivity fails at ([{i}], [{j}], [{k}])"));
        if cli.verify_witness {
            let (x, y, z) = (&cs[i], &cs[j], &cs[k]);
            let lhs = cong_meet(x, &cong_join(y, z)?)?;
            let rhs = cong_join(&cong_meet(x, y)?, &cong_meet(x, z)?)?;
            report.audited(lhs != rhs);
        }
    }
    if let Some([i, j]) = r.permutability_witness {
        report.say(format!("[{i}] and [{j}] do not permute"));
        if cli.verify_witness {
            let ok = cong_compose(&cs[i], &cs[j])? != cong_compose(&cs[j], &cs[i])?;
            report.audited(ok);
        }
    }
    if !(r.distributive && r.permutable) {
        report.exit_code = report.exit_code.max(EXIT_FAILS);
    }
    report.verdict = json!({ "congruences": listed, "checks": r });
    Ok(report)
}

fn commutative(cli: &Cli, n: usize) -> Result<RunReport> {
    let mut report = RunReport::new("commutative-majority");
    let s = commutative_majority_search(n)?;
    match &s.table {
        Some(t) => {
            report.say(format!("found ({} candidates)", s.candidates));
            report
                .lines
                .extend(t.to_text("p").lines().map(String::from));
            report.verdict = json!({ "n": n, "result": "found", "candidates": s.candidates, "table": table_certificate(t, "p") });
            if cli.verify_witness {
                let ok = crate::algebra::is_commutative_majority(t)?.holds;
                report.audited(ok);
            }
        }
        None => {
            report.say(format!("none ({} candidates)", s.candidates));
            report.verdict = json!({ "n": n, "result": "none", "candidates": s.candidates });
            report.exit_code = EXIT_FAILS;
        }
    }
    Ok(report)
}

fn paper_demos(cli: &Cli, list: bool, data_dir: Option<&Path>) -> Result<RunReport> {
    let mut report = RunReport::new("paper-demos");
    if list {
        let inventory: Vec<Value> = DEMOS
            .iter()
            .map(|d| json!({ "id": d.id, "key": d.key, "location": d.location, "claim": d.claim }))
            .collect();
        for d in DEMOS {
            report.say(format!(
                "{} {:<22} {}: {}",
                d.id, d.key, d.location, d.claim
            ));
        }
        report.verdict = json!({ "demos": inventory });
        return Ok(report);
    }
    let data = match data_dir {
        Some(dir) => DemoData::from_dir(dir)?,
        None => DemoData::bundled(),
    };
    for (name, _) in demos::DATA_FILES {
        report.digest(name, data.text(name));
    }
    let outcomes = demos::run_all(&data, cli.seed);
    for o in &outcomes {
        report.say(format!(
            "{} {} {:<22} {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.key,
            o.location
        ));
        for d in &o.details {
            report.say(format!("    {d}"));
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    report.say(format!("{passed}/{} passed", outcomes.len()));
    if passed != outcomes.len() {
        report.exit_code = EXIT_FAILS;
    }
    report.verdict =
        json!({ "seed": cli.seed, "passed": passed, "total": outcomes.len(), "demos": outcomes });
    Ok(report)
}
