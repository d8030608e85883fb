//! Extended term matrices and strict closedness of finite relations.
//!
//! A matrix has one row per relation component. Its left block lists the
//! premise columns; the last column is the conclusion. A relation is
//! strictly closed under the matrix when every row-wise assignment that puts
//! all premise columns inside the relation also puts the conclusion inside.

mod format;

pub use format::parse_matrix;

use crate::error::{Error, Result};
use crate::structures::{Relation, Tuple};
use crate::witness::{Verdict, Witness, WitnessKind};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Entry {
    /// Index into the row's variable namespace.
    Var(usize),
    /// The basepoint of the row's component.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedMatrix {
    rows: Vec<Vec<Entry>>,
    names: Vec<Vec<String>>,
}

/// Names accepted by [`builtin_matrix`].
pub const BUILTIN_MATRICES: [&str; 4] = ["majority", "maltsev", "unital", "subtractive"];

impl ExtendedMatrix {
    /// Builds a matrix from symbol rows; the last symbol of each row is the
    /// conclusion and `"0"` denotes ZERO.
    pub fn from_symbols<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(Error::Invalid("matrix needs at least one row".into()));
        }
        if width < 2 {
            return Err(Error::Invalid(
                "matrix rows need at least one premise column and a conclusion".into(),
            ));
        }
        let mut entries = Vec::with_capacity(rows.len());
        let mut names = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Invalid(format!(
                    "row {i} has {} entries, expected {width}",
                    row.len()
                )));
            }
            let mut row_names: Vec<String> = Vec::new();
            let mut row_entries = Vec::with_capacity(width);
            for sym in row {
                let sym = sym.as_ref();
                if sym == "0" {
                    row_entries.push(Entry::Zero);
                    continue;
                }
                if sym.is_empty() || sym == "|" || sym.contains(char::is_whitespace) {
                    return Err(Error::Invalid(format!("bad matrix symbol {sym:?}")));
                }
                let idx = match row_names.iter().position(|n| n == sym) {
                    Some(idx) => idx,
                    None => {
                        row_names.push(sym.to_string());
                        row_names.len() - 1
                    }
                };
                row_entries.push(Entry::Var(idx));
            }
            entries.push(row_entries);
            names.push(row_names);
        }
        Ok(ExtendedMatrix {
            rows: entries,
            names,
        })
    }

    /// Number of rows, which must equal the arity of a checked relation.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Number of premise columns.
    pub fn premise_width(&self) -> usize {
        self.rows[0].len() - 1
    }

    pub fn rows(&self) -> &[Vec<Entry>] {
        &self.rows
    }

    pub fn variable_names(&self, row: usize) -> &[String] {
        &self.names[row]
    }

    pub fn uses_zero(&self) -> bool {
        self.rows.iter().flatten().any(|e| *e == Entry::Zero)
    }

    fn conclusion(&self, row: usize) -> Entry {
        *self.rows[row].last().expect("non-empty row")
    }

    /// Display symbol of an entry.
    pub fn symbol(&self, row: usize, entry: Entry) -> &str {
        match entry {
            Entry::Zero => "0",
            Entry::Var(v) => &self.names[row][v],
        }
    }

    /// Key under which a variable's value is reported in witnesses. Names
    /// shared across rows are qualified with the row index.
    fn slot_name(&self, row: usize, var: usize) -> String {
        let name = &self.names[row][var];
        let shared = self
            .names
            .iter()
            .enumerate()
            .any(|(r, ns)| r != row && ns.contains(name));
        if shared {
            format!("{name}[{row}]")
        } else {
            name.clone()
        }
    }
}

impl fmt::Display for ExtendedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// The named matrices: majority, Mal'tsev, unital and subtractive.
pub fn builtin_matrix(name: &str) -> Result<ExtendedMatrix> {
    let rows: Vec<Vec<&str>> = match name {
        "majority" => vec![
            vec!["a1", "a1", "a2", "a1"],
            vec!["b1", "b2", "b1", "b1"],
            vec!["c2", "c1", "c1", "c1"],
        ],
        "maltsev" => vec![vec!["x1", "x1", "x2", "x2"], vec!["y2", "y1", "y1", "y2"]],
        "unital" => vec![vec!["x", "0", "x"], vec!["0", "x", "x"]],
        "subtractive" => vec![vec!["x", "x", "0"], vec!["x", "0", "x"]],
        other => return Err(Error::UnknownMatrix(other.to_string())),
    };
    ExtendedMatrix::from_symbols(&rows)
}

/// Row-wise variable bindings during enumeration.
struct Bindings {
    values: Vec<Vec<Option<usize>>>,
}

impl Bindings {
    fn new(m: &ExtendedMatrix) -> Self {
        Bindings {
            values: m.names.iter().map(|ns| vec![None; ns.len()]).collect(),
        }
    }
}

fn check_preconditions(r: &Relation, m: &ExtendedMatrix) -> Result<Vec<Option<usize>>> {
    if m.row_count() != r.arity() {
        return Err(Error::Arity {
            expected: m.row_count(),
            found: r.arity(),
        });
    }
    let mut basepoints = Vec::with_capacity(m.row_count());
    for (i, row) in m.rows.iter().enumerate() {
        let bp = r.signature()[i].basepoint();
        if row.contains(&Entry::Zero) && bp.is_none() {
            return Err(Error::MissingBasepoint { component: i });
        }
        basepoints.push(bp);
    }
    Ok(basepoints)
}

/// Walks every instance of the matrix in `r`: each choice of premise tuples
/// (one per column, lexicographic order) consistent with the pattern, and
/// for each, every conclusion tuple (free conclusion-only variables range
/// over their component). The visitor gets premises, conclusion and bindings.
fn for_each_instance<F>(
    r: &Relation,
    m: &ExtendedMatrix,
    basepoints: &[Option<usize>],
    mut visit: F,
) where
    F: FnMut(&[&Tuple], &Tuple, &Bindings) -> ControlFlow<()>,
{
    let tuples: Vec<&Tuple> = r.tuples().iter().collect();
    let mut bindings = Bindings::new(m);
    let mut premises: Vec<&Tuple> = Vec::with_capacity(m.premise_width());
    let sizes: Vec<usize> = r.signature().iter().map(|s| s.size()).collect();
    let _ = descend(
        m,
        &tuples,
        basepoints,
        &sizes,
        &mut bindings,
        &mut premises,
        &mut visit,
    );
}

fn descend<'a, F>(
    m: &ExtendedMatrix,
    tuples: &[&'a Tuple],
    basepoints: &[Option<usize>],
    sizes: &[usize],
    bindings: &mut Bindings,
    premises: &mut Vec<&'a Tuple>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[&Tuple], &Tuple, &Bindings) -> ControlFlow<()>,
{
    let col = premises.len();
    if col == m.premise_width() {
        return conclusions(m, basepoints, sizes, bindings, premises, visit);
    }
    for &t in tuples {
        let mut newly_bound: Vec<(usize, usize)> = Vec::new();
        let mut ok = true;
        for (row, entries) in m.rows.iter().enumerate() {
            match entries[col] {
                Entry::Zero => {
                    if Some(t[row]) != basepoints[row] {
                        ok = false;
                    }
                }
                Entry::Var(v) => match bindings.values[row][v] {
                    Some(x) if x != t[row] => ok = false,
                    Some(_) => {}
                    None => {
                        bindings.values[row][v] = Some(t[row]);
                        newly_bound.push((row, v));
                    }
                },
            }
            if !ok {
                break;
            }
        }
        if ok {
            premises.push(t);
            let flow = descend(m, tuples, basepoints, sizes, bindings, premises, visit);
            premises.pop();
            if flow.is_break() {
                return flow;
            }
        }
        for (row, v) in newly_bound {
            bindings.values[row][v] = None;
        }
    }
    ControlFlow::Continue(())
}

fn conclusions<F>(
    m: &ExtendedMatrix,
    basepoints: &[Option<usize>],
    sizes: &[usize],
    bindings: &mut Bindings,
    premises: &[&Tuple],
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[&Tuple], &Tuple, &Bindings) -> ControlFlow<()>,
{
    // Rows whose conclusion variable is not fixed by the premises.
    let free: Vec<usize> = (0..m.row_count())
        .filter(
            |&row| matches!(m.conclusion(row), Entry::Var(v) if bindings.values[row][v].is_none()),
        )
        .collect();
    let fixed: Tuple = (0..m.row_count())
        .map(|row| match m.conclusion(row) {
            Entry::Zero => basepoints[row].expect("checked basepoint"),
            Entry::Var(v) => bindings.values[row][v].unwrap_or(0),
        })
        .collect();
    if free.is_empty() {
        return visit(premises, &fixed, bindings);
    }
    let free_sizes: Vec<usize> = free.iter().map(|&row| sizes[row]).collect();
    for values in crate::structures::product_tuples(&free_sizes) {
        let mut c = fixed.clone();
        for (&row, &val) in free.iter().zip(&values) {
            c[row] = val;
            if let Entry::Var(v) = m.conclusion(row) {
                bindings.values[row][v] = Some(val);
            }
        }
        let flow = visit(premises, &c, bindings);
        for &row in &free {
            if let Entry::Var(v) = m.conclusion(row) {
                bindings.values[row][v] = None;
            }
        }
        flow?;
    }
    ControlFlow::Continue(())
}

fn closure_witness(
    m: &ExtendedMatrix,
    premises: &[&Tuple],
    conclusion: &Tuple,
    b: &Bindings,
) -> Witness {
    let mut w = Witness::new(WitnessKind::ClosureViolation)
        .with_premises(premises.iter().map(|t| (*t).clone()).collect())
        .with_conclusion(conclusion.clone());
    for (row, vals) in b.values.iter().enumerate() {
        for (v, val) in vals.iter().enumerate() {
            if let Some(x) = val {
                w = w.assign(m.slot_name(row, v), *x);
            }
        }
    }
    w
}

/// Decides strict closedness of `r` under `m`.
///
/// On failure, the witness is the least violation in (premises, conclusion)
/// order.
pub fn is_strictly_closed(r: &Relation, m: &ExtendedMatrix) -> Result<Verdict> {
    let basepoints = check_preconditions(r, m)?;
    let mut found = None;
    for_each_instance(r, m, &basepoints, |premises, conclusion, b| {
        if r.contains(conclusion) {
            ControlFlow::Continue(())
        } else {
            found = Some(closure_witness(m, premises, conclusion, b));
            ControlFlow::Break(())
        }
    });
    Ok(Verdict::from_violation(found))
}

/// Least strictly `m`-closed superset of `r`, by fixpoint iteration.
pub fn strict_closure(r: &Relation, m: &ExtendedMatrix) -> Result<Relation> {
    let basepoints = check_preconditions(r, m)?;
    let mut current = r.clone();
    loop {
        let mut forced: Vec<Tuple> = Vec::new();
        for_each_instance(&current, m, &basepoints, |_, conclusion, _| {
            if !current.contains(conclusion) {
                forced.push(conclusion.clone());
            }
            ControlFlow::Continue(())
        });
        if forced.is_empty() {
            return Ok(current);
        }
        for t in forced {
            current.insert_unchecked(t);
        }
    }
}

/// Difunctionality: `(x1,y2), (x1,y1), (x2,y1) ∈ R` forces `(x2,y2) ∈ R`.
pub fn is_difunctional(r: &Relation) -> Result<Verdict> {
    if r.arity() != 2 {
        return Err(Error::Arity {
            expected: 2,
            found: r.arity(),
        });
    }
    let verdict = is_strictly_closed(r, &builtin_matrix("maltsev")?)?;
    debug_assert_eq!(verdict.holds, difunctional_by_composition(r)?);
    Ok(verdict)
}

/// Independent route: `R ∘ Rᵀ ∘ R ⊆ R`.
pub fn difunctional_by_composition(r: &Relation) -> Result<bool> {
    let rt = r.converse()?;
    Ok(r.compose(&rt)?.compose(r)?.is_subset(r))
}

/// Enumerates every variable assignment directly, ignoring the relation's
/// tuples until the end. Exponential in the number of variables; a
/// reference for small inputs.
pub fn is_strictly_closed_brute_force(r: &Relation, m: &ExtendedMatrix) -> Result<bool> {
    let basepoints = check_preconditions(r, m)?;
    let slots: Vec<(usize, usize)> = m
        .names
        .iter()
        .enumerate()
        .flat_map(|(row, ns)| (0..ns.len()).map(move |v| (row, v)))
        .collect();
    let sizes: Vec<usize> = slots
        .iter()
        .map(|&(row, _)| r.signature()[row].size())
        .collect();
    let width = m.premise_width() + 1;
    for values in crate::structures::product_tuples(&sizes) {
        let mut assignment: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (slot, val) in slots.iter().zip(values) {
            assignment.insert(*slot, val);
        }
        let column = |col: usize| -> Tuple {
            (0..m.row_count())
                .map(|row| match m.rows[row][col] {
                    Entry::Zero => basepoints[row].expect("checked basepoint"),
                    Entry::Var(v) => assignment[&(row, v)],
                })
                .collect()
        };
        let premises_hold = (0..width - 1).all(|col| r.contains(&column(col)));
        if premises_hold && !r.contains(&column(width - 1)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Re-checks a closure-violation witness against `r` and `m`: the premises
/// are in `r`, the conclusion is not, and all columns agree with the
/// pattern under one assignment.
pub fn replay_closure_witness(r: &Relation, m: &ExtendedMatrix, w: &Witness) -> Result<bool> {
    let basepoints = check_preconditions(r, m)?;
    if w.kind != WitnessKind::ClosureViolation || w.premises.len() != m.premise_width() {
        return Ok(false);
    }
    if !w.premises.iter().all(|t| r.contains(t)) || r.contains(&w.conclusion) {
        return Ok(false);
    }
    let mut columns: Vec<&Tuple> = w.premises.iter().collect();
    columns.push(&w.conclusion);
    for (row, entries) in m.rows.iter().enumerate() {
        let mut seen: Vec<Option<usize>> = vec![None; m.names[row].len()];
        for (col, e) in entries.iter().enumerate() {
            let val = columns[col][row];
            match *e {
                Entry::Zero if Some(val) != basepoints[row] => return Ok(false),
                Entry::Zero => {}
                Entry::Var(v) => match seen[v] {
                    Some(x) if x != val => return Ok(false),
                    _ => seen[v] = Some(val),
                },
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::FiniteSet;

    fn rel(sizes: &[usize], tuples: &[&[usize]]) -> Relation {
        Relation::new(
            sizes.iter().map(|&s| FiniteSet::new(s)).collect(),
            tuples.iter().map(|t| t.to_vec()),
        )
        .unwrap()
    }

    fn rows_of(m: &ExtendedMatrix) -> Vec<String> {
        m.rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let syms: Vec<&str> = row.iter().map(|&e| m.symbol(i, e)).collect();
                let (left, concl) = syms.split_at(syms.len() - 1);
                format!("{} | {}", left.join(" "), concl[0])
            })
            .collect()
    }

    #[test]
    fn builtin_shapes() {
        assert_eq!(
            rows_of(&builtin_matrix("majority").unwrap()),
            ["a1 a1 a2 | a1", "b1 b2 b1 | b1", "c2 c1 c1 | c1"]
        );
        assert_eq!(
            rows_of(&builtin_matrix("maltsev").unwrap()),
            ["x1 x1 x2 | x2", "y2 y1 y1 | y2"]
        );
        assert_eq!(
            rows_of(&builtin_matrix("unital").unwrap()),
            ["x 0 | x", "0 x | x"]
        );
        assert_eq!(
            rows_of(&builtin_matrix("subtractive").unwrap()),
            ["x x | 0", "x 0 | x"]
        );
        assert!(matches!(
            builtin_matrix("pixley"),
            Err(Error::UnknownMatrix(_))
        ));
    }

    #[test]
    fn full_relation_is_majority_closed() {
        let full = Relation::full(vec![
            FiniteSet::new(2),
            FiniteSet::new(3),
            FiniteSet::new(2),
        ]);
        assert!(
            is_strictly_closed(&full, &builtin_matrix("majority").unwrap())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn diagonal_is_maltsev_closed() {
        let d = Relation::diagonal(&FiniteSet::new(4), 2);
        assert!(
            is_strictly_closed(&d, &builtin_matrix("maltsev").unwrap())
                .unwrap()
                .holds
        );
    }

    #[test]
    fn counterexample_relation_violates_majority() {
        let r = rel(&[2, 2, 2], &[&[1, 1, 0], &[0, 1, 1], &[0, 0, 0]]);
        let m = builtin_matrix("majority").unwrap();
        let v = is_strictly_closed(&r, &m).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(
            w.premises,
            vec![vec![0, 1, 1], vec![0, 0, 0], vec![1, 1, 0]]
        );
        assert_eq!(w.conclusion, vec![0, 1, 0]);
        assert_eq!(w.assignment["a1"], 0);
        assert_eq!(w.assignment["a2"], 1);
        assert!(replay_closure_witness(&r, &m, &w).unwrap());
        assert!(!is_strictly_closed_brute_force(&r, &m).unwrap());
    }

    #[test]
    fn arity_and_basepoint_errors() {
        let r = rel(&[2, 2], &[&[0, 0]]);
        assert!(matches!(
            is_strictly_closed(&r, &builtin_matrix("majority").unwrap()),
            Err(Error::Arity {
                expected: 3,
                found: 2
            })
        ));
        assert!(matches!(
            is_strictly_closed(&r, &builtin_matrix("unital").unwrap()),
            Err(Error::MissingBasepoint { component: 0 })
        ));
    }

    #[test]
    fn unital_uses_basepoints() {
        let a = FiniteSet::new(2).with_basepoint(0).unwrap();
        // (x,0) and (0,x) related for all x forces (x,x)
        let r = Relation::new(
            vec![a.clone(), a.clone()],
            vec![vec![0, 0], vec![1, 0], vec![0, 1]],
        )
        .unwrap();
        let m = builtin_matrix("unital").unwrap();
        let v = is_strictly_closed(&r, &m).unwrap();
        assert_eq!(v.witness.unwrap().conclusion, vec![1, 1]);
        let closed = strict_closure(&r, &m).unwrap();
        assert_eq!(closed.len(), 4);
        assert!(!is_strictly_closed_brute_force(&r, &m).unwrap());
    }

    #[test]
    fn subtractive_conclusion_is_zero() {
        let a = FiniteSet::new(2).with_basepoint(0).unwrap();
        // (x,x), (x,0) in R forces (0,x); least instance is x = (1,0)
        let r = Relation::new(vec![a.clone(), a.clone()], vec![vec![1, 1], vec![1, 0]]).unwrap();
        let m = builtin_matrix("subtractive").unwrap();
        let v = is_strictly_closed(&r, &m).unwrap();
        assert_eq!(v.witness.as_ref().unwrap().conclusion, vec![0, 0]);
        let closed = strict_closure(&r, &m).unwrap();
        assert!(closed.contains(&[0, 1]) && closed.contains(&[0, 0]));
        assert!(replay_closure_witness(&r, &m, v.witness.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn closure_of_three_pairs_is_full() {
        let r = rel(&[2, 2], &[&[0, 0], &[0, 1], &[1, 0]]);
        let m = builtin_matrix("maltsev").unwrap();
        let c = strict_closure(&r, &m).unwrap();
        assert_eq!(c.len(), 4);
        // minimality: the only superset of r inside {0,1}^2 that is closed
        // is the full relation, since r itself is the only other superset
        // besides the full one, and r is not closed
        assert!(!is_strictly_closed(&r, &m).unwrap().holds);
    }

    #[test]
    fn closure_of_empty_and_closed() {
        let m = builtin_matrix("majority").unwrap();
        let empty = rel(&[2, 2, 2], &[]);
        assert_eq!(strict_closure(&empty, &m).unwrap(), empty);
        let full = Relation::full(vec![FiniteSet::new(2); 3]);
        assert_eq!(strict_closure(&full, &m).unwrap(), full);
    }

    #[test]
    fn difunctional_examples() {
        let d = Relation::diagonal(&FiniteSet::new(3), 2);
        assert!(is_difunctional(&d).unwrap().holds);
        let graph = Relation::new(
            vec![FiniteSet::new(3), FiniteSet::new(2)],
            vec![vec![0, 1], vec![1, 1], vec![2, 0]],
        )
        .unwrap();
        assert!(is_difunctional(&graph).unwrap().holds);
        let r = rel(&[2, 2], &[&[0, 0], &[0, 1], &[1, 0]]);
        let v = is_difunctional(&r).unwrap();
        assert_eq!(v.witness.unwrap().conclusion, vec![1, 1]);
        assert!(is_difunctional(&rel(&[2, 2, 2], &[])).is_err());
    }

    #[test]
    fn conclusion_only_variables_range_over_component() {
        // (x | y): any nonempty relation must be full in the second component
        let m = ExtendedMatrix::from_symbols(&[vec!["x", "x"], vec!["u", "v"]]).unwrap();
        let r = rel(&[2, 3], &[&[0, 1]]);
        let v = is_strictly_closed(&r, &m).unwrap();
        assert_eq!(v.witness.unwrap().conclusion, vec![0, 0]);
        assert_eq!(strict_closure(&r, &m).unwrap().len(), 3);
        assert!(!is_strictly_closed_brute_force(&r, &m).unwrap());
    }

    #[test]
    fn malformed_matrices() {
        assert!(ExtendedMatrix::from_symbols(&[vec!["x"]]).is_err());
        assert!(ExtendedMatrix::from_symbols(&[vec!["x", "y"], vec!["x"]]).is_err());
        assert!(ExtendedMatrix::from_symbols::<&str>(&[]).is_err());
    }
}
