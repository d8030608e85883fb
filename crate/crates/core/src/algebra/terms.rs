//! Majority terms built from lattice and ring operations.

use super::OperationTable;
use crate::error::{Error, Result};

/// Result of the lattice term builder. The table is always produced; a
/// failed absorption law is reported alongside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeTerm {
    pub table: OperationTable,
    /// Least `(x, y)` where `x ∧ (x ∨ y) = x` or `x ∨ (x ∧ y) = x` fails.
    pub absorption_failure: Option<(usize, usize)>,
}

fn binary_pair(a: &OperationTable, b: &OperationTable) -> Result<usize> {
    a.expect_arity(2)?;
    b.expect_arity(2)?;
    if a.size() != b.size() {
        return Err(Error::Signature("tables are on different universes".into()));
    }
    Ok(a.size())
}

/// `p(x,y,z) = (x ∧ y) ∨ (x ∧ z) ∨ (y ∧ z)`.
pub fn lattice_majority_term(meet: &OperationTable, join: &OperationTable) -> Result<LatticeTerm> {
    let n = binary_pair(meet, join)?;
    let m = |a: usize, b: usize| meet.apply(&[a, b]);
    let j = |a: usize, b: usize| join.apply(&[a, b]);
    let table = OperationTable::from_fn(3, n, |a| {
        let (x, y, z) = (a[0], a[1], a[2]);
        j(j(m(x, y), m(x, z)), m(y, z))
    });
    let absorption_failure = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| m(x, j(x, y)) != x || j(x, m(x, y)) != x);
    Ok(LatticeTerm {
        table,
        absorption_failure,
    })
}

/// Ring operations as binary tables on a common universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingTables {
    pub add: OperationTable,
    pub sub: OperationTable,
    pub mul: OperationTable,
}

impl RingTables {
    pub fn new(add: OperationTable, sub: OperationTable, mul: OperationTable) -> Result<Self> {
        binary_pair(&add, &sub)?;
        binary_pair(&add, &mul)?;
        Ok(RingTables { add, sub, mul })
    }

    /// Integers modulo `m`.
    pub fn modular(m: usize) -> Self {
        RingTables {
            add: OperationTable::from_fn(2, m, |a| (a[0] + a[1]) % m),
            sub: OperationTable::from_fn(2, m, |a| (a[0] + m - a[1]) % m),
            mul: OperationTable::from_fn(2, m, |a| (a[0] * a[1]) % m),
        }
    }

    pub fn size(&self) -> usize {
        self.add.size()
    }

    fn pow(&self, x: usize, e: usize) -> usize {
        (1..e).fold(x, |acc, _| self.mul.apply(&[acc, x]))
    }
}

/// `p(x,y,z) = x − (x − y)(x − z)^(n−1)`, after checking `x^n = x` for all `x`.
pub fn ring_majority_term(ring: &RingTables, n: usize) -> Result<OperationTable> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "exponent must be at least 2, got {n}"
        )));
    }
    let size = ring.size();
    if let Some(x) = (0..size).find(|&x| ring.pow(x, n) != x) {
        return Err(Error::Precondition(format!(
            "x^{n} = x fails at x = {x} (x^{n} = {})",
            ring.pow(x, n)
        )));
    }
    let sub = |a: usize, b: usize| ring.sub.apply(&[a, b]);
    Ok(OperationTable::from_fn(3, size, |a| {
        let (x, y, z) = (a[0], a[1], a[2]);
        let tail = ring.mul.apply(&[sub(x, y), ring.pow(sub(x, z), n - 1)]);
        sub(x, tail)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{boolean_majority, verify_majority};

    #[test]
    fn two_chain_gives_boolean_majority() {
        let meet = OperationTable::from_fn(2, 2, |a| a[0].min(a[1]));
        let join = OperationTable::from_fn(2, 2, |a| a[0].max(a[1]));
        let t = lattice_majority_term(&meet, &join).unwrap();
        assert_eq!(t.table, boolean_majority());
        assert_eq!(t.absorption_failure, None);
    }

    #[test]
    fn non_lattice_is_flagged() {
        // meet = join = max: x ∧ (x ∨ y) = max(x, y) ≠ x at (0, 1)
        let max = OperationTable::from_fn(2, 2, |a| a[0].max(a[1]));
        let t = lattice_majority_term(&max, &max).unwrap();
        assert_eq!(t.absorption_failure, Some((0, 1)));
    }

    #[test]
    fn ring_terms() {
        for (m, n) in [(2, 2), (6, 3), (3, 3), (5, 5)] {
            let p = ring_majority_term(&RingTables::modular(m), n).unwrap();
            assert!(verify_majority(&p).unwrap().holds, "Z{m} n={n}");
        }
    }

    #[test]
    fn mod_four_fails_exponent_law() {
        let err = ring_majority_term(&RingTables::modular(4), 2).unwrap_err();
        assert!(
            matches!(&err, Error::Precondition(msg) if msg.contains("x = 2")),
            "{err}"
        );
        assert!(ring_majority_term(&RingTables::modular(2), 1).is_err());
    }
}
