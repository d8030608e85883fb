//! Executable reproductions of the desk-scale claims, one per acceptance
//! criterion. Each demo returns a pass flag and a list of deterministic
//! detail lines; the same functions back `majority paper-demos`, the
//! acceptance test target and the examples.

use crate::algebra::{
    commutative_majority_search, cong_compose, cong_join, congruences,
    distributivity_identity_check, has_majority_term, has_maltsev_term, is_commutative_majority,
    lattice_checks, lattice_majority_term, lemma_trace, parse_algebra, polymorphism_search,
    replay_commutativity_witness, ring_majority_term, verify_majority, FiniteAlgebra,
    OperationTable, PolyKind, PolySearch, RingTables, TermSearch, DEFAULT_CLONE_BUDGET,
};
use crate::error::{Error, Result};
use crate::matrix::{
    builtin_matrix, is_strictly_closed, is_strictly_closed_brute_force, strict_closure,
    ExtendedMatrix,
};
use crate::relobjects::{
    classify, is_majority_object_direct, is_maltsev_object, maltsev_coreflection,
    maltsev_coreflection_stepwise,
};
use crate::structures::{
    decode_power_element, parse_structure, product_tuples, FiniteSet, Relation, Structure, Tuple,
    DEFAULT_UNIVERSE_CAP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::Path;

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Bundled input files, by file name.
pub const DATA_FILES: [(&str, &str); 11] = [
    (
        "counterexample.rel",
        include_str!("../data/counterexample.rel"),
    ),
    ("diagonal.rel", include_str!("../data/diagonal.rel")),
    ("chain2.rel", include_str!("../data/chain2.rel")),
    ("lattice2.alg", include_str!("../data/lattice2.alg")),
    ("semilattice2.alg", include_str!("../data/semilattice2.alg")),
    ("m3.alg", include_str!("../data/m3.alg")),
    ("n5.alg", include_str!("../data/n5.alg")),
    ("z2.alg", include_str!("../data/z2.alg")),
    ("z4.alg", include_str!("../data/z4.alg")),
    ("z6.alg", include_str!("../data/z6.alg")),
    ("boolean4.alg", include_str!("../data/boolean4.alg")),
];

/// The fixture texts the demos parse.
#[derive(Debug, Clone)]
pub struct DemoData {
    files: Vec<(String, String)>,
}

impl DemoData {
    pub fn bundled() -> Self {
        DemoData {
            files: DATA_FILES
                .iter()
                .map(|(n, t)| (n.to_string(), t.to_string()))
                .collect(),
        }
    }

    /// Reads every fixture from `dir`; all files must be present.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut files = Vec::new();
        for (name, _) in DATA_FILES {
            let path = dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            files.push((name.to_string(), text));
        }
        Ok(DemoData { files })
    }

    pub fn text(&self, name: &str) -> &str {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t.as_str())
            .unwrap_or_else(|| panic!("unknown fixture {name}"))
    }

    fn structure(&self, name: &str) -> Result<Structure> {
        parse_structure(self.text(name)).map_err(|e| in_file(name, e))
    }

    fn algebra(&self, name: &str) -> Result<FiniteAlgebra> {
        parse_algebra(self.text(name)).map_err(|e| in_file(name, e))
    }
}

fn in_file(name: &str, e: Error) -> Error {
    Error::Io {
        path: name.to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DemoInfo {
    pub id: usize,
    pub key: &'static str,
    pub location: &'static str,
    pub claim: &'static str,
}

pub const DEMOS: [DemoInfo; 8] = [
    DemoInfo {
        id: 1,
        key: "counterexample",
        location: "Rel_3 counterexample",
        claim: "S is a Mal'tsev object but not a majority object",
    },
    DemoInfo {
        id: 2,
        key: "rel2-comajority",
        location: "Rel_2 example",
        claim: "every binary relational structure is a majority object",
    },
    DemoInfo {
        id: 3,
        key: "matrix-oracle",
        location: "strict M-closedness",
        claim: "unification check equals brute force; closure is least",
    },
    DemoInfo {
        id: 4,
        key: "term-builders",
        location: "lattice and ring majority terms",
        claim: "built terms satisfy the majority identities",
    },
    DemoInfo {
        id: 5,
        key: "term-separation",
        location: "majority versus Mal'tsev terms",
        claim: "lattice yes, semilattice no, Z2 Mal'tsev but not majority",
    },
    DemoInfo {
        id: 6,
        key: "congruence-calculus",
        location: "distributive congruence lattices",
        claim: "join is composition; lattices distributive and permutable",
    },
    DemoInfo {
        id: 7,
        key: "commutative-majority",
        location: "commutative majority algebras",
        claim: "no commutative majority algebra on 2 or 3 elements",
    },
    DemoInfo {
        id: 8,
        key: "closure-laws",
        location: "closure operators",
        claim: "closure and coreflection are extensive, idempotent, monotone, least",
    },
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemoOutcome {
    pub id: usize,
    pub key: String,
    pub location: String,
    pub claim: String,
    pub passed: bool,
    pub details: Vec<String>,
}

struct Checks {
    passed: bool,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let mark = if ok { "ok" } else { "FAIL" };
        self.details.push(format!("{mark}: {}", what.into()));
        self.passed &= ok;
    }
}

/// Runs one demo by id (1 to 8). Library errors become a failed outcome.
pub fn run_demo(id: usize, data: &DemoData, seed: u64) -> DemoOutcome {
    let info = DEMOS
        .iter()
        .find(|d| d.id == id)
        .unwrap_or_else(|| panic!("no demo {id}"));
    let mut c = Checks::new();
    let result = match id {
        1 => counterexample(data, &mut c),
        2 => rel2_comajority(seed, &mut c),
        3 => matrix_oracle(&mut c),
        4 => term_builders(data, &mut c),
        5 => term_separation(data, &mut c),
        6 => congruence_calculus(data, &mut c),
        7 => commutative_majority(&mut c),
        _ => closure_laws(seed, &mut c),
    };
    if let Err(e) = result {
        c.check(false, format!("error: {e}"));
    }
    DemoOutcome {
        id,
        key: info.key.to_string(),
        location: info.location.to_string(),
        claim: info.claim.to_string(),
        passed: c.passed,
        details: c.details,
    }
}

pub fn run_all(data: &DemoData, seed: u64) -> Vec<DemoOutcome> {
    DEMOS.iter().map(|d| run_demo(d.id, data, seed)).collect()
}

fn counterexample(data: &DemoData, c: &mut Checks) -> Result<()> {
    let s = data.structure("counterexample.rel")?;
    let v = classify(&s)?;
    c.check(
        v.is_maltsev_object,
        format!("Mal'tsev object: {}", v.is_maltsev_object),
    );
    c.check(
        !v.is_majority_object,
        format!("majority object: {}", v.is_majority_object),
    );
    match &v.witnesses.majority {
        Some(w) => {
            let expected: Vec<Tuple> = vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 1, 0]];
            c.check(
                w.premises == expected,
                format!("witness premises {:?}", w.premises),
            );
            c.check(
                w.conclusion == vec![0, 1, 0],
                format!("absent conclusion {:?}", w.conclusion),
            );
            let (_, rel) = s.sole_relation()?;
            c.check(!rel.contains(&w.conclusion), "conclusion is not in R_S");
        }
        None => c.check(false, "no majority witness"),
    }
    let poly = polymorphism_search(&s, PolyKind::Majority)?;
    c.check(
        matches!(poly, PolySearch::NotFound { .. }),
        format!("majority polymorphism search: {}", poly_summary(&poly)),
    );
    Ok(())
}

pub fn poly_summary(p: &PolySearch) -> String {
    match p {
        PolySearch::Found { nodes, .. } => format!("found after {nodes} nodes"),
        PolySearch::NotFound { nodes } => format!("none, exhausted after {nodes} nodes"),
        PolySearch::Undecided { nodes } => format!("undecided after {nodes} nodes"),
    }
}

fn binary_structure(n: usize, tuples: Vec<Tuple>) -> Result<Structure> {
    Structure::single(FiniteSet::new(n), "E", 2, tuples)
}

fn rel2_comajority(seed: u64, c: &mut Checks) -> Result<()> {
    let cells: Vec<Tuple> = product_tuples(&[4, 4]).collect();
    let mut failures = 0usize;
    for mask in 0u32..(1 << 16) {
        let tuples = (0..16)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| cells[i].clone())
            .collect();
        if !is_majority_object_direct(&binary_structure(4, tuples)?)? {
            failures += 1;
        }
    }
    c.check(
        failures == 0,
        format!("|U|=4: 65536 relations, {failures} failures"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [5usize, 6] {
        let mut failures = 0usize;
        for _ in 0..10_000 {
            let tuples = product_tuples(&[n, n])
                .filter(|_| rng.gen_bool(0.5))
                .collect();
            if !is_majority_object_direct(&binary_structure(n, tuples)?)? {
                failures += 1;
            }
        }
        c.check(
            failures == 0,
            format!("|U|={n}: 10000 samples, {failures} failures"),
        );
    }
    Ok(())
}

/// All relations on a product of component sets, indexed by bit mask over
/// the cells in lexicographic order.
fn all_relations(signature: &[FiniteSet]) -> Result<Vec<Relation>> {
    let sizes: Vec<usize> = signature.iter().map(|s| s.size()).collect();
    let cells: Vec<Tuple> = product_tuples(&sizes).collect();
    assert!(cells.len() <= 16, "too many relations to enumerate");
    (0u32..(1 << cells.len()))
        .map(|mask| {
            let tuples = (0..cells.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| cells[i].clone());
            Relation::new(signature.to_vec(), tuples)
        })
        .collect()
}

/// Checks closure laws for every relation on `signature` against all of
/// its closed supersets. Returns the number of discrepancies.
fn exhaustive_closure_leastness(
    signature: &[FiniteSet],
    m: &ExtendedMatrix,
    brute: bool,
) -> Result<(usize, usize)> {
    let rels = all_relations(signature)?;
    let closed: Vec<bool> = rels
        .iter()
        .map(|r| is_strictly_closed(r, m).map(|v| v.holds))
        .collect::<Result<_>>()?;
    let mut oracle_mismatches = 0;
    if brute {
        for (r, &flag) in rels.iter().zip(&closed) {
            if is_strictly_closed_brute_force(r, m)? != flag {
                oracle_mismatches += 1;
            }
        }
    }
    let mut least_failures = 0;
    for r in &rels {
        let cl = strict_closure(r, m)?;
        let ok = r.is_subset(&cl)
            && is_strictly_closed(&cl, m)?.holds
            && rels
                .iter()
                .zip(&closed)
                .filter(|(sup, &is_closed)| is_closed && r.is_subset(sup))
                .all(|(sup, _)| cl.is_subset(sup));
        if !ok {
            least_failures += 1;
        }
    }
    Ok((oracle_mismatches, least_failures))
}

fn matrix_oracle(c: &mut Checks) -> Result<()> {
    let two = FiniteSet::new(2);
    let m = builtin_matrix("majority")?;
    let (mismatch, least) =
        exhaustive_closure_leastness(&[two.clone(), two.clone(), two], &m, true)?;
    c.check(
        mismatch == 0,
        format!("majority, 256 relations: {mismatch} oracle mismatches"),
    );
    c.check(
        least == 0,
        format!("majority, 256 relations: {least} least-ness failures"),
    );
    Ok(())
}

fn lattice_term_check(a: &FiniteAlgebra, name: &str, c: &mut Checks) -> Result<()> {
    let (meet, join) = match (a.operation("meet"), a.operation("join")) {
        (Some(m), Some(j)) => (m, j),
        _ => return Err(Error::Invalid(format!("{name} lacks meet/join"))),
    };
    let t = lattice_majority_term(meet, join)?;
    let v = verify_majority(&t.table)?;
    let n = a.size();
    c.check(
        v.holds && t.absorption_failure.is_none(),
        format!(
            "lattice term on {name}: majority over {} triples",
            n * n * n
        ),
    );
    Ok(())
}

fn term_builders(data: &DemoData, c: &mut Checks) -> Result<()> {
    lattice_term_check(&data.algebra("lattice2.alg")?, "2-chain", c)?;
    lattice_term_check(&data.algebra("m3.alg")?, "M3", c)?;
    lattice_term_check(&data.algebra("n5.alg")?, "N5", c)?;
    for (m, n) in [(2usize, 2usize), (6, 3)] {
        let p = ring_majority_term(&RingTables::modular(m), n)?;
        c.check(
            verify_majority(&p)?.holds,
            format!("ring term on Z{m} with n={n}: majority"),
        );
    }
    match ring_majority_term(&RingTables::modular(4), 2) {
        Err(Error::Precondition(msg)) => c.check(
            msg.contains("x = 2"),
            format!("ring term on Z4 with n=2 rejected: {msg}"),
        ),
        other => c.check(false, format!("ring term on Z4 with n=2: {other:?}")),
    }
    Ok(())
}

fn term_summary(t: &TermSearch) -> String {
    match t {
        TermSearch::Yes(_) => "yes".into(),
        TermSearch::No { clone_size } => format!("no (complete clone of {clone_size} tables)"),
        TermSearch::Undecided { explored } => format!("undecided after {explored} tables"),
    }
}

fn term_separation(data: &DemoData, c: &mut Checks) -> Result<()> {
    let b = DEFAULT_CLONE_BUDGET;
    let lattice = has_majority_term(&data.algebra("lattice2.alg")?, b)?;
    c.check(
        matches!(lattice, TermSearch::Yes(_)),
        format!(
            "2-element lattice majority term: {}",
            term_summary(&lattice)
        ),
    );
    let semi = has_majority_term(&data.algebra("semilattice2.alg")?, b)?;
    c.check(
        semi == TermSearch::No { clone_size: 7 },
        format!(
            "2-element semilattice majority term: {}",
            term_summary(&semi)
        ),
    );
    let z2 = data.algebra("z2.alg")?;
    let maj = has_majority_term(&z2, b)?;
    c.check(
        matches!(maj, TermSearch::No { .. }),
        format!("Z2 majority term: {}", term_summary(&maj)),
    );
    let mal = has_maltsev_term(&z2, b)?;
    let xyz = OperationTable::from_fn(3, 2, |a| (a[0] + a[1] + a[2]) % 2);
    c.check(
        mal == TermSearch::Yes(xyz),
        format!("Z2 Mal'tsev term: {} (x+y+z)", term_summary(&mal)),
    );
    Ok(())
}

fn congruence_calculus(data: &DemoData, c: &mut Checks) -> Result<()> {
    for name in ["z4.alg", "z6.alg", "boolean4.alg"] {
        let a = data.algebra(name)?;
        let label = name.trim_end_matches(".alg");
        let mal = has_maltsev_term(&a, DEFAULT_CLONE_BUDGET)?;
        c.check(
            matches!(mal, TermSearch::Yes(_)),
            format!("{label}: Mal'tsev term {}", term_summary(&mal)),
        );
        let cs = congruences(&a, DEFAULT_UNIVERSE_CAP)?;
        let mut join_failures = 0;
        for x in &cs {
            for y in &cs {
                let join = cong_join(x, y)?.to_relation();
                if cong_compose(x, y)? != join || cong_compose(y, x)? != join {
                    join_failures += 1;
                }
            }
        }
        let pairs = cs.len() * cs.len();
        c.check(
            join_failures == 0,
            format!("{label}: {} congruences, join = composition on {pairs} pairs ({join_failures} failures)", cs.len()),
        );
        let report = lattice_checks(&cs)?;
        c.check(
            report.distributive && report.permutable,
            format!(
                "{label}: distributive {}, permutable {}",
                report.distributive, report.permutable
            ),
        );
        let mut identity_failures = 0;
        for ka in &cs {
            for kb in &cs {
                for kc in &cs {
                    if !distributivity_identity_check(ka, kb, kc)?.holds {
                        identity_failures += 1;
                    }
                }
            }
        }
        c.check(
            identity_failures == 0,
            format!(
                "{label}: K_B ∧ (K_A ∘ K_C) = (K_B ∧ K_A) ∘ (K_B ∧ K_C) on {} triples ({identity_failures} failures)",
                cs.len().pow(3)
            ),
        );
    }
    Ok(())
}

fn commutative_majority(c: &mut Checks) -> Result<()> {
    for (n, expected) in [(2usize, 1u64), (3, 729)] {
        let s = commutative_majority_search(n)?;
        c.check(
            s.table.is_none() && s.candidates == expected,
            format!(
                "n={n}: {} ({} candidates)",
                if s.table.is_none() { "none" } else { "found" },
                s.candidates
            ),
        );
    }
    let p = crate::algebra::boolean_majority();
    let v = is_commutative_majority(&p)?;
    match &v.witness {
        Some(w) => c.check(
            replay_commutativity_witness(&p, w),
            format!("Boolean majority not commutative, witness replays: {w}"),
        ),
        None => c.check(false, "Boolean majority reported commutative"),
    }
    let trace = lemma_trace(&p, 0, 1)?;
    let chain: Vec<String> = trace.steps.iter().map(|s| s.value.to_string()).collect();
    c.check(
        trace.broken_at.map(|i| trace.steps[i].by.as_str()) == Some("commutativity"),
        format!(
            "chain at x=0, y=1: {} (breaks at the commutativity step)",
            chain.join(" = ")
        ),
    );
    Ok(())
}

fn random_relation(
    rng: &mut ChaCha8Rng,
    signature: &[FiniteSet],
    density: f64,
) -> Result<Relation> {
    let sizes: Vec<usize> = signature.iter().map(|s| s.size()).collect();
    let tuples: Vec<Tuple> = product_tuples(&sizes)
        .filter(|_| rng.gen_bool(density))
        .collect();
    Relation::new(signature.to_vec(), tuples)
}

fn union(a: &Relation, b: &Relation) -> Result<Relation> {
    Relation::new(
        a.signature().to_vec(),
        a.tuples().iter().chain(b.tuples()).cloned(),
    )
}

fn closure_laws(seed: u64, c: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = ["majority", "maltsev", "unital", "subtractive"];
    let mut closure_failures = 0;
    let mut coreflection_failures = 0;
    for _ in 0..500 {
        let name = names[rng.gen_range(0..names.len())];
        let m = builtin_matrix(name)?;
        let signature: Vec<FiniteSet> = (0..m.row_count())
            .map(|_| {
                let n = rng.gen_range(1..=3);
                FiniteSet::new(n).with_basepoint(0)
            })
            .collect::<Result<_>>()?;
        let r = random_relation(&mut rng, &signature, 0.25)?;
        let bigger = union(&r, &random_relation(&mut rng, &signature, 0.15)?)?;
        let cl = strict_closure(&r, &m)?;
        let ok = r.is_subset(&cl)
            && strict_closure(&cl, &m)? == cl
            && is_strictly_closed(&cl, &m)?.holds
            && cl.is_subset(&strict_closure(&bigger, &m)?);
        if !ok {
            closure_failures += 1;
        }

        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(2..=3);
        let cube = vec![FiniteSet::new(n); k];
        let r = random_relation(&mut rng, &cube, 0.2)?;
        let bigger = union(&r, &random_relation(&mut rng, &cube, 0.1)?)?;
        let s = Structure::single(FiniteSet::new(n), "R", k, r.tuples().iter().cloned())?;
        let t = s.with_tuples("R", bigger.tuples().iter().cloned())?;
        let core = maltsev_coreflection(&s)?;
        let core_rel = core.relation("R").expect("relation");
        let ok = r.is_subset(&core_rel)
            && maltsev_coreflection(&core)? == core
            && is_maltsev_object(&core)?.holds
            && maltsev_coreflection_stepwise(&s)? == core
            && core_rel.is_subset(&maltsev_coreflection(&t)?.relation("R").expect("relation"));
        if !ok {
            coreflection_failures += 1;
        }
    }
    c.check(
        closure_failures == 0,
        format!("strict closure, 500 random inputs: {closure_failures} failures"),
    );
    c.check(
        coreflection_failures == 0,
        format!("Mal'tsev coreflection, 500 random inputs: {coreflection_failures} failures"),
    );

    let two = FiniteSet::new(2).with_basepoint(0)?;
    for name in ["maltsev", "unital", "subtractive"] {
        let (_, least) = exhaustive_closure_leastness(
            &[two.clone(), two.clone()],
            &builtin_matrix(name)?,
            false,
        )?;
        c.check(
            least == 0,
            format!("{name} closure least on all 16 relations at |U|=2 ({least} failures)"),
        );
    }
    let (_, least) = exhaustive_closure_leastness(
        &[two.clone(), two.clone(), two],
        &builtin_matrix("majority")?,
        false,
    )?;
    c.check(
        least == 0,
        format!("majority closure least on all 256 relations at |U|=2 ({least} failures)"),
    );

    for k in [2usize, 3] {
        let cells = 1usize << k;
        let structures: Vec<Structure> = (0u32..(1 << cells))
            .map(|mask| {
                let tuples = (0..cells)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| decode_power_element(i, 2, k));
                Structure::single(FiniteSet::new(2), "R", k, tuples)
            })
            .collect::<Result<_>>()?;
        let objects: Vec<bool> = structures
            .iter()
            .map(|s| is_maltsev_object(s).map(|v| v.holds))
            .collect::<Result<_>>()?;
        let mut failures = 0;
        for s in &structures {
            let rel = s.relation("R").expect("relation");
            let core = maltsev_coreflection(s)?.relation("R").expect("relation");
            let least = structures
                .iter()
                .zip(&objects)
                .filter(|(_, &obj)| obj)
                .map(|(t, _)| t.relation("R").expect("relation"))
                .filter(|sup| rel.is_subset(sup))
                .all(|sup| core.is_subset(&sup));
            if !least {
                failures += 1;
            }
        }
        c.check(
            failures == 0,
            format!("coreflection least on all {} relations of arity {k} at |U|=2 ({failures} failures)", 1 << cells),
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fixtures_parse() {
        let d = DemoData::bundled();
        for (name, _) in DATA_FILES {
            if name.ends_with(".rel") {
                d.structure(name).unwrap();
            } else {
                d.algebra(name).unwrap();
            }
        }
        assert_eq!(d.algebra("z4.alg").unwrap(), FiniteAlgebra::cyclic_group(4));
        assert_eq!(d.algebra("lattice2.alg").unwrap(), FiniteAlgebra::chain(2));
    }

    #[test]
    fn quick_demos_pass() {
        let d = DemoData::bundled();
        for id in [1, 4, 5, 7] {
            let out = run_demo(id, &d, DEFAULT_SEED);
            assert!(out.passed, "{out:?}");
        }
    }

    #[test]
    fn mutated_counterexample_flips_demo_one() {
        let mut d = DemoData::bundled();
        for (name, text) in &mut d.files {
            if name == "counterexample.rel" {
                *text = text.replace("end", "0 1 0\nend");
            }
        }
        assert!(!run_demo(1, &d, DEFAULT_SEED).passed);
    }
}
