//! Finite algebras and the searches that run over them.
//!
//! Operation tables are stored row-major with the first argument most
//! significant, so `values[index(args)]` walks argument tuples in
//! lexicographic order.

mod clone;
mod commutative;
mod congruence;
mod format;
mod poly;
mod terms;

pub use clone::{
    has_majority_term, has_maltsev_term, ternary_term_clone, TermClone, TermSearch,
    DEFAULT_CLONE_BUDGET,
};
pub use commutative::{
    commutative_majority_search, is_commutative_majority, lemma_trace,
    replay_commutativity_witness, CommutativeSearch, LemmaTrace, TraceStep,
};
pub use congruence::{
    cong_compose, cong_join, cong_meet, congruences, congruences_by_filter,
    congruences_by_generation, distributivity_identity_check, lattice_checks, Congruence,
    LatticeReport, EXHAUSTIVE_PARTITION_LIMIT,
};
pub use format::{parse_algebra, parse_algebra_json, AlgebraJson, OperationJson};
pub use poly::{
    polymorphism_search, polymorphism_search_with_budget, preserves_relations, PolyKind,
    PolySearch, DEFAULT_NODE_BUDGET,
};
pub use terms::{lattice_majority_term, ring_majority_term, LatticeTerm, RingTables};

use crate::error::{Error, Result};
use crate::structures::FiniteSet;
use crate::witness::{Verdict, Witness, WitnessKind};
use std::collections::BTreeMap;

/// A total operation on `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperationTable {
    arity: usize,
    size: usize,
    values: Vec<usize>,
}

impl OperationTable {
    pub fn new(arity: usize, size: usize, values: Vec<usize>) -> Result<Self> {
        let expected = size
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::Invalid("operation table too large".into()))?;
        if values.len() != expected {
            return Err(Error::Invalid(format!(
                "table of arity {arity} on {size} elements needs {expected} values, found {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v >= size) {
            return Err(Error::Invalid(format!(
                "table value {v} outside universe of size {size}"
            )));
        }
        Ok(OperationTable {
            arity,
            size,
            values,
        })
    }

    pub fn from_fn<F>(arity: usize, size: usize, mut f: F) -> Self
    where
        F: FnMut(&[usize]) -> usize,
    {
        let sizes = vec![size; arity];
        let values = crate::structures::product_tuples(&sizes)
            .map(|args| {
                let v = f(&args);
                assert!(v < size, "operation value {v} out of range");
                v
            })
            .collect();
        OperationTable {
            arity,
            size,
            values,
        }
    }

    pub fn projection(arity: usize, size: usize, coordinate: usize) -> Self {
        Self::from_fn(arity, size, |args| args[coordinate])
    }

    pub fn constant(arity: usize, size: usize, value: usize) -> Self {
        Self::from_fn(arity, size, |_| value)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn index(&self, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity);
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn apply(&self, args: &[usize]) -> usize {
        self.values[self.index(args)]
    }

    pub fn apply3(&self, x: usize, y: usize, z: usize) -> usize {
        self.values[(x * self.size + y) * self.size + z]
    }

    fn expect_arity(&self, arity: usize) -> Result<()> {
        if self.arity != arity {
            return Err(Error::Arity {
                expected: arity,
                found: self.arity,
            });
        }
        Ok(())
    }
}

/// The two-element majority table.
pub fn boolean_majority() -> OperationTable {
    OperationTable::from_fn(3, 2, |a| usize::from(a[0] + a[1] + a[2] >= 2))
}

/// A finite universe with named operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    universe: FiniteSet,
    operations: BTreeMap<String, OperationTable>,
}

impl FiniteAlgebra {
    pub fn new(universe: FiniteSet) -> Self {
        FiniteAlgebra {
            universe,
            operations: BTreeMap::new(),
        }
    }

    pub fn with_operation(mut self, name: &str, table: OperationTable) -> Result<Self> {
        self.add_operation(name, table)?;
        Ok(self)
    }

    pub fn add_operation(&mut self, name: &str, table: OperationTable) -> Result<()> {
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Invalid(format!("bad operation name {name:?}")));
        }
        if table.size != self.universe.size() {
            return Err(Error::Signature(format!(
                "operation `{name}` is on {} elements, universe has {}",
                table.size,
                self.universe.size()
            )));
        }
        if self.operations.contains_key(name) {
            return Err(Error::Invalid(format!("duplicate operation `{name}`")));
        }
        self.operations.insert(name.to_string(), table);
        Ok(())
    }

    pub fn universe(&self) -> &FiniteSet {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.size()
    }

    pub fn operations(&self) -> &BTreeMap<String, OperationTable> {
        &self.operations
    }

    pub fn operation(&self, name: &str) -> Option<&OperationTable> {
        self.operations.get(name)
    }

    /// `Z_m` with `+`, unary `-` and the constant `0`.
    pub fn cyclic_group(m: usize) -> Self {
        FiniteAlgebra::new(FiniteSet::new(m))
            .with_operation("+", OperationTable::from_fn(2, m, |a| (a[0] + a[1]) % m))
            .and_then(|a| a.with_operation("-", OperationTable::from_fn(1, m, |a| (m - a[0]) % m)))
            .and_then(|a| a.with_operation("0", OperationTable::constant(0, m, 0)))
            .expect("well-formed group")
    }

    /// A lattice from its meet and join tables.
    pub fn lattice(meet: OperationTable, join: OperationTable) -> Result<Self> {
        FiniteAlgebra::new(FiniteSet::new(meet.size()))
            .with_operation("meet", meet)?
            .with_operation("join", join)
    }

    /// The chain `0 < 1 < ... < n-1` as a lattice.
    pub fn chain(n: usize) -> Self {
        Self::lattice(
            OperationTable::from_fn(2, n, |a| a[0].min(a[1])),
            OperationTable::from_fn(2, n, |a| a[0].max(a[1])),
        )
        .expect("well-formed chain")
    }
}

fn identity_witness(
    equation: usize,
    x: usize,
    y: usize,
    args: [usize; 3],
    got: usize,
    want: usize,
) -> Witness {
    Witness::new(WitnessKind::IdentityViolation)
        .assign("equation", equation)
        .assign("x", x)
        .assign("y", y)
        .assign("expected", want)
        .with_premises(vec![args.to_vec()])
        .with_conclusion(vec![got])
}

/// Checks the identities given as `(argument pattern, expected value)`
/// builders, reporting the least `(equation, x, y)` that fails.
fn verify_identities<F>(p: &OperationTable, equations: &[F]) -> Result<Verdict>
where
    F: Fn(usize, usize) -> ([usize; 3], usize),
{
    p.expect_arity(3)?;
    for (i, eq) in equations.iter().enumerate() {
        for x in 0..p.size {
            for y in 0..p.size {
                let (args, want) = eq(x, y);
                let got = p.apply(&args);
                if got != want {
                    return Ok(Verdict::fail(identity_witness(i, x, y, args, got, want)));
                }
            }
        }
    }
    Ok(Verdict::pass())
}

/// `p(x,x,y) = p(x,y,x) = p(y,x,x) = x`.
pub fn verify_majority(p: &OperationTable) -> Result<Verdict> {
    type Eq = fn(usize, usize) -> ([usize; 3], usize);
    let eqs: [Eq; 3] = [
        |x, y| ([x, x, y], x),
        |x, y| ([x, y, x], x),
        |x, y| ([y, x, x], x),
    ];
    verify_identities(p, &eqs)
}

/// `q(x,x,y) = y` and `q(y,x,x) = y`.
pub fn verify_maltsev(q: &OperationTable) -> Result<Verdict> {
    type Eq = fn(usize, usize) -> ([usize; 3], usize);
    let eqs: [Eq; 2] = [|x, y| ([x, x, y], y), |x, y| ([y, x, x], y)];
    verify_identities(q, &eqs)
}

/// Cells of a ternary table fixed by an identity family, with conflicts
/// detected. Returns the partial table.
pub(crate) fn prefilled_cells(size: usize, kind: PolyKind) -> Result<Vec<Option<usize>>> {
    let mut cells: Vec<Option<usize>> = vec![None; size * size * size];
    let idx = |t: [usize; 3]| (t[0] * size + t[1]) * size + t[2];
    let mut set = |t: [usize; 3], v: usize| -> Result<()> {
        let c = &mut cells[idx(t)];
        match *c {
            Some(old) if old != v => Err(Error::Invalid(format!(
                "identities conflict at {t:?}: {old} vs {v}"
            ))),
            _ => {
                *c = Some(v);
                Ok(())
            }
        }
    };
    for x in 0..size {
        for y in 0..size {
            match kind {
                PolyKind::Majority => {
                    set([x, x, y], x)?;
                    set([x, y, x], x)?;
                    set([y, x, x], x)?;
                }
                PolyKind::Maltsev => {
                    set([x, x, y], y)?;
                    set([y, x, x], y)?;
                }
            }
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_majority_is_majority_not_maltsev() {
        let p = boolean_majority();
        assert!(verify_majority(&p).unwrap().holds);
        let v = verify_maltsev(&p).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.assignment["equation"], 0);
        assert_eq!((w.assignment["x"], w.assignment["y"]), (0, 1));
        assert_eq!(w.conclusion, vec![0]);
    }

    #[test]
    fn first_projection_fails_third_majority_identity() {
        let p = OperationTable::projection(3, 3, 0);
        let w = verify_majority(&p).unwrap().witness.unwrap();
        assert_eq!(w.assignment["equation"], 2);
        assert_eq!((w.assignment["x"], w.assignment["y"]), (0, 1));
        assert_eq!(w.premises, vec![vec![1, 0, 0]]);
    }

    #[test]
    fn third_projection_fails_second_maltsev_identity() {
        let q = OperationTable::projection(3, 2, 2);
        let w = verify_maltsev(&q).unwrap().witness.unwrap();
        assert_eq!(w.assignment["equation"], 1);
        assert_eq!((w.assignment["x"], w.assignment["y"]), (0, 1));
    }

    #[test]
    fn group_difference_term_is_maltsev() {
        // x - y + z on Z4, all 16 (x, y) pairs of both identities
        let q = OperationTable::from_fn(3, 4, |a| (a[0] + 4 - a[1] + a[2]) % 4);
        assert!(verify_maltsev(&q).unwrap().holds);
    }

    #[test]
    fn arity_errors() {
        let b = OperationTable::projection(2, 2, 0);
        assert!(matches!(
            verify_majority(&b),
            Err(Error::Arity {
                expected: 3,
                found: 2
            })
        ));
        assert!(verify_maltsev(&b).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(OperationTable::new(2, 2, vec![0, 1, 1]).is_err());
        assert!(OperationTable::new(1, 2, vec![0, 2]).is_err());
        let t = OperationTable::new(2, 2, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(t.apply(&[1, 0]), 1);
        assert_eq!(t.index(&[1, 1]), 3);
        let mut a = FiniteAlgebra::new(FiniteSet::new(3));
        assert!(a.add_operation("+", t).is_err());
    }

    #[test]
    fn prefill_has_no_conflicts() {
        for n in 1..5 {
            let maj = prefilled_cells(n, PolyKind::Majority).unwrap();
            assert_eq!(
                maj.iter().filter(|c| c.is_none()).count(),
                n * (n - 1) * n.saturating_sub(2)
            );
            let mal = prefilled_cells(n, PolyKind::Maltsev).unwrap();
            assert_eq!(
                mal.iter().filter(|c| c.is_none()).count(),
                n * (n - 1) * (n - 1)
            );
        }
    }
}
