//! Commutative majority operations: `p` is a homomorphism `(X,p)^3 → (X,p)`.

use super::{prefilled_cells, verify_majority, OperationTable, PolyKind};
use crate::error::{Error, Result};
use crate::witness::{Verdict, Witness, WitnessKind};
use serde::{Deserialize, Serialize};

const SLOTS: [&str; 9] = ["a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2", "c3"];

/// Largest universe searched exhaustively.
pub const COMMUTATIVE_SEARCH_LIMIT: usize = 3;

/// Both sides of the commutativity equation for rows `a`, `b`, `c`:
/// `p(p(a1,b1,c1), p(a2,b2,c2), p(a3,b3,c3))` and `p(p(a), p(b), p(c))`.
fn sides(p: &OperationTable, m: &[usize; 9]) -> (usize, usize) {
    let col = |j: usize| p.apply3(m[j], m[3 + j], m[6 + j]);
    let row = |i: usize| p.apply3(m[3 * i], m[3 * i + 1], m[3 * i + 2]);
    let lhs = p.apply3(col(0), col(1), col(2));
    let rhs = p.apply3(row(0), row(1), row(2));
    (lhs, rhs)
}

fn first_violation(p: &OperationTable) -> Option<([usize; 9], usize, usize)> {
    let n = p.size();
    let mut m = [0usize; 9];
    loop {
        let (lhs, rhs) = sides(p, &m);
        if lhs != rhs {
            return Some((m, lhs, rhs));
        }
        let mut i = 9;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            m[i] += 1;
            if m[i] < n {
                break;
            }
            m[i] = 0;
        }
    }
}

/// Checks commutativity over all 9-tuples in lexicographic order of
/// `(a1,a2,a3,b1,..,c3)`. The witness lists rows `a`, `b`, `c` as premises
/// and `[lhs, rhs]` as the conclusion.
pub fn is_commutative_majority(p: &OperationTable) -> Result<Verdict> {
    if !verify_majority(p)?.holds {
        return Err(Error::Precondition(
            "table is not a majority operation".into(),
        ));
    }
    Ok(match first_violation(p) {
        None => Verdict::pass(),
        Some((m, lhs, rhs)) => {
            let mut w = Witness::new(WitnessKind::IdentityViolation)
                .with_premises(m.chunks(3).map(|r| r.to_vec()).collect())
                .with_conclusion(vec![lhs, rhs]);
            for (slot, v) in SLOTS.iter().zip(m) {
                w = w.assign(*slot, v);
            }
            Verdict::fail(w)
        }
    })
}

/// Recomputes both sides from the witness rows; true when they match the
/// recorded values and differ.
pub fn replay_commutativity_witness(p: &OperationTable, w: &Witness) -> bool {
    let rows = &w.premises;
    if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) || w.conclusion.len() != 2 {
        return false;
    }
    let mut m = [0usize; 9];
    for (i, v) in rows.iter().flatten().enumerate() {
        if *v >= p.size() {
            return false;
        }
        m[i] = *v;
    }
    if SLOTS
        .iter()
        .zip(m)
        .any(|(s, v)| w.assignment.get(*s) != Some(&v))
    {
        return false;
    }
    let (lhs, rhs) = sides(p, &m);
    lhs != rhs && [lhs, rhs] == w.conclusion[..]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub expression: String,
    pub value: usize,
    /// `identity` or `commutativity`: the law that justifies equality with
    /// the previous step.
    pub by: String,
    pub holds: bool,
}

/// The equation chain from `x` to `y` evaluated in a concrete table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaTrace {
    pub x: usize,
    pub y: usize,
    pub steps: Vec<TraceStep>,
    /// Index of the first step whose value differs from the previous one.
    pub broken_at: Option<usize>,
}

/// Evaluates the chain `x = p(x,x,y) = p(p(x,x,y),p(x,y,x),p(y,y,y))
/// = p(p(x,x,y),p(x,y,y),p(y,x,y)) = p(x,y,y) = y`, with rows
/// `(x,x,y)`, `(x,y,y)`, `(y,x,y)`.
pub fn lemma_trace(p: &OperationTable, x: usize, y: usize) -> Result<LemmaTrace> {
    p.expect_arity(3)?;
    if x >= p.size() || y >= p.size() {
        return Err(Error::Invalid(format!(
            "elements {x}, {y} outside universe of size {}",
            p.size()
        )));
    }
    let q = |a, b, c| p.apply3(a, b, c);
    let raw = [
        ("x".to_string(), x, "identity"),
        ("p(x,x,y)".to_string(), q(x, x, y), "identity"),
        (
            "p(p(x,x,y),p(x,y,x),p(y,y,y))".to_string(),
            q(q(x, x, y), q(x, y, x), q(y, y, y)),
            "identity",
        ),
        (
            "p(p(x,x,y),p(x,y,y),p(y,x,y))".to_string(),
            q(q(x, x, y), q(x, y, y), q(y, x, y)),
            "commutativity",
        ),
        ("p(x,y,y)".to_string(), q(x, y, y), "identity"),
        ("y".to_string(), y, "identity"),
    ];
    let mut steps = Vec::with_capacity(raw.len());
    let mut broken_at = None;
    for (i, (expression, value, by)) in raw.into_iter().enumerate() {
        let holds = i == 0 || steps.last().is_none_or(|s: &TraceStep| s.value == value);
        if !holds && broken_at.is_none() {
            broken_at = Some(i);
        }
        steps.push(TraceStep {
            expression,
            value,
            by: by.to_string(),
            holds,
        });
    }
    Ok(LemmaTrace {
        x,
        y,
        steps,
        broken_at,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutativeSearch {
    pub table: Option<OperationTable>,
    /// Majority tables examined (all of them when `table` is `None`).
    pub candidates: u64,
}

/// Enumerates every majority table on `n` elements, all-distinct cells in
/// lexicographic order, and returns the first commutative one.
pub fn commutative_majority_search(n: usize) -> Result<CommutativeSearch> {
    if n == 0 || n > COMMUTATIVE_SEARCH_LIMIT {
        return Err(Error::Unsupported(format!(
            "exhaustive search needs 1 <= n <= {COMMUTATIVE_SEARCH_LIMIT}, got {n}"
        )));
    }
    let cells = prefilled_cells(n, PolyKind::Majority)?;
    let free: Vec<usize> = (0..cells.len()).filter(|&c| cells[c].is_none()).collect();
    let mut values: Vec<usize> = cells.iter().map(|c| c.unwrap_or(0)).collect();
    let mut candidates = 0u64;
    loop {
        candidates += 1;
        let table = OperationTable::new(3, n, values.clone())?;
        if first_violation(&table).is_none() {
            debug_assert!(verify_majority(&table)?.holds);
            return Ok(CommutativeSearch {
                table: Some(table),
                candidates,
            });
        }
        let mut i = free.len();
        loop {
            if i == 0 {
                return Ok(CommutativeSearch {
                    table: None,
                    candidates,
                });
            }
            i -= 1;
            values[free[i]] += 1;
            if values[free[i]] < n {
                break;
            }
            values[free[i]] = 0;
        }
    }
}
