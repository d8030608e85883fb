//! Ternary term operations of a finite algebra.

use super::{verify_majority, verify_maltsev, FiniteAlgebra, OperationTable};
use crate::error::{Error, Result};
use crate::witness::Verdict;
use std::collections::HashSet;

pub const DEFAULT_CLONE_BUDGET: usize = 10_000;

/// Ternary term operations found so far, in discovery order (the three
/// projections first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermClone {
    pub tables: Vec<OperationTable>,
    /// The closure stabilized within the budget.
    pub complete: bool,
}

/// Closes the ternary projections under the basic operations, applied
/// pointwise, stopping once `budget` distinct tables exist.
pub fn ternary_term_clone(a: &FiniteAlgebra, budget: usize) -> Result<TermClone> {
    if budget < 3 {
        return Err(Error::Invalid(format!(
            "clone budget must be at least 3, got {budget}"
        )));
    }
    let n = a.size();
    let cells = n * n * n;
    let mut tables: Vec<Vec<usize>> = (0..3)
        .map(|i| OperationTable::projection(3, n, i).values)
        .collect();
    let mut seen: HashSet<Vec<usize>> = tables.iter().cloned().collect();
    let ops: Vec<&OperationTable> = a.operations().values().collect();

    let mut push = |t: Vec<usize>, tables: &mut Vec<Vec<usize>>| -> bool {
        if seen.contains(&t) {
            return true;
        }
        if tables.len() >= budget {
            return false;
        }
        seen.insert(t.clone());
        tables.push(t);
        true
    };

    for op in ops.iter().filter(|op| op.arity() == 0) {
        if !push(vec![op.values()[0]; cells], &mut tables) {
            return Ok(finish(tables, n, false));
        }
    }

    // Semi-naive: when table `i` is processed, apply every operation to
    // argument tuples whose largest index is `i`.
    let mut i = 0;
    while i < tables.len() {
        for op in &ops {
            let r = op.arity();
            if r == 0 {
                continue;
            }
            for first in 0..r {
                if first > 0 && i == 0 {
                    break;
                }
                // positions before `first` range below i, `first` holds i,
                // positions after range up to i inclusive
                let mut args = vec![0usize; r];
                args[first] = i;
                loop {
                    let out: Vec<usize> = (0..cells)
                        .map(|c| {
                            let idx = args.iter().fold(0, |acc, &t| acc * n + tables[t][c]);
                            op.values()[idx]
                        })
                        .collect();
                    if !push(out, &mut tables) {
                        return Ok(finish(tables, n, false));
                    }
                    if !advance(&mut args, first, i) {
                        break;
                    }
                }
            }
        }
        i += 1;
    }
    Ok(finish(tables, n, true))
}

fn advance(args: &mut [usize], first: usize, i: usize) -> bool {
    for p in (0..args.len()).rev() {
        if p == first {
            continue;
        }
        let limit = if p < first { i } else { i + 1 };
        args[p] += 1;
        if args[p] < limit {
            return true;
        }
        args[p] = 0;
    }
    false
}

fn finish(tables: Vec<Vec<usize>>, n: usize, complete: bool) -> TermClone {
    TermClone {
        tables: tables
            .into_iter()
            .map(|values| OperationTable {
                arity: 3,
                size: n,
                values,
            })
            .collect(),
        complete,
    }
}

/// Outcome of scanning a term clone for a table with some property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermSearch {
    Yes(OperationTable),
    /// The complete clone has no such table.
    No {
        clone_size: usize,
    },
    /// Budget ran out before the clone stabilized.
    Undecided {
        explored: usize,
    },
}

fn scan<F>(a: &FiniteAlgebra, budget: usize, check: F) -> Result<TermSearch>
where
    F: Fn(&OperationTable) -> Result<Verdict>,
{
    if a.size() == 0 {
        return Err(Error::Invalid("empty algebra".into()));
    }
    let clone = ternary_term_clone(a, budget)?;
    for t in &clone.tables {
        if check(t)?.holds {
            return Ok(TermSearch::Yes(t.clone()));
        }
    }
    Ok(if clone.complete {
        TermSearch::No {
            clone_size: clone.tables.len(),
        }
    } else {
        TermSearch::Undecided {
            explored: clone.tables.len(),
        }
    })
}

pub fn has_majority_term(a: &FiniteAlgebra, budget: usize) -> Result<TermSearch> {
    scan(a, budget, verify_majority)
}

pub fn has_maltsev_term(a: &FiniteAlgebra, budget: usize) -> Result<TermSearch> {
    scan(a, budget, verify_maltsev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::boolean_majority;
    use crate::structures::FiniteSet;

    fn semilattice() -> FiniteAlgebra {
        FiniteAlgebra::new(FiniteSet::new(2))
            .with_operation("meet", OperationTable::from_fn(2, 2, |a| a[0].min(a[1])))
            .unwrap()
    }

    fn z2_plus_neg() -> FiniteAlgebra {
        FiniteAlgebra::new(FiniteSet::new(2))
            .with_operation("+", OperationTable::from_fn(2, 2, |a| (a[0] + a[1]) % 2))
            .unwrap()
            .with_operation("-", OperationTable::from_fn(1, 2, |a| a[0]))
            .unwrap()
    }

    #[test]
    fn semilattice_clone_is_seven_meets() {
        let c = ternary_term_clone(&semilattice(), 100).unwrap();
        assert!(c.complete);
        assert_eq!(c.tables.len(), 7);
        // every table is the meet of a nonempty variable subset
        let mut expected: Vec<Vec<usize>> = (1..8u32)
            .map(|mask| {
                OperationTable::from_fn(3, 2, |a| {
                    (0..3)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| a[i])
                        .min()
                        .unwrap()
                })
                .values
            })
            .collect();
        let mut got: Vec<Vec<usize>> = c.tables.iter().map(|t| t.values.clone()).collect();
        expected.sort();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn z2_clone_is_linear() {
        let c = ternary_term_clone(&z2_plus_neg(), 100).unwrap();
        assert!(c.complete);
        // sums of subsets of {x, y, z}, the empty sum being 0
        assert_eq!(c.tables.len(), 8);
        let xyz = OperationTable::from_fn(3, 2, |a| (a[0] + a[1] + a[2]) % 2);
        assert!(c.tables.contains(&xyz));
        assert!(!c.tables.contains(&boolean_majority()));
    }

    #[test]
    fn term_verdicts() {
        assert!(matches!(
            has_majority_term(&FiniteAlgebra::chain(2), 100).unwrap(),
            TermSearch::Yes(t) if t == boolean_majority()
        ));
        assert_eq!(
            has_majority_term(&semilattice(), 100).unwrap(),
            TermSearch::No { clone_size: 7 }
        );
        assert_eq!(
            has_majority_term(&z2_plus_neg(), 100).unwrap(),
            TermSearch::No { clone_size: 8 }
        );
        assert!(matches!(
            has_maltsev_term(&z2_plus_neg(), 100).unwrap(),
            TermSearch::Yes(_)
        ));
    }

    #[test]
    fn budget_exhaustion_is_undecided() {
        let a = FiniteAlgebra::cyclic_group(4);
        assert_eq!(
            has_majority_term(&a, 5).unwrap(),
            TermSearch::Undecided { explored: 5 }
        );
        assert!(ternary_term_clone(&a, 2).is_err());
        assert!(!ternary_term_clone(&a, 10).unwrap().complete);
    }

    #[test]
    fn constants_enter_the_clone() {
        let a = FiniteAlgebra::cyclic_group(3);
        let c = ternary_term_clone(&a, 1000).unwrap();
        assert!(c.complete);
        // ax + by + cz over Z3
        assert_eq!(c.tables.len(), 27);
        assert!(c.tables.contains(&OperationTable::constant(3, 3, 0)));
    }
}
