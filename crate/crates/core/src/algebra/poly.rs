//! Backtracking search for ternary polymorphisms satisfying majority or
//! Mal'tsev identities.
//!
//! Identity-forced cells are filled up front. The remaining cells are
//! assigned in lexicographic order with values ascending, so the first
//! solution is canonical. Every relation constraint (one per triple of
//! related tuples) is attached to the last free cell it reads and checked
//! as soon as that cell is assigned.

use super::{prefilled_cells, verify_majority, verify_maltsev, OperationTable};
use crate::error::{Error, Result};
use crate::structures::{Structure, Tuple};
use serde::{Deserialize, Serialize};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolyKind {
    Majority,
    Maltsev,
}

impl std::str::FromStr for PolyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majority" => Ok(PolyKind::Majority),
            "maltsev" => Ok(PolyKind::Maltsev),
            other => Err(Error::Invalid(format!(
                "unknown kind `{other}`, expected `majority` or `maltsev`"
            ))),
        }
    }
}

impl PolyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolyKind::Majority => "majority",
            PolyKind::Maltsev => "maltsev",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolySearch {
    Found {
        table: OperationTable,
        nodes: u64,
    },
    /// The whole space was exhausted; `nodes` is the number of assignments tried.
    NotFound {
        nodes: u64,
    },
    Undecided {
        nodes: u64,
    },
}

/// One relation constraint: the images of `cells` must form a tuple of `relation`.
struct Constraint {
    relation: usize,
    cells: Vec<usize>,
}

pub fn polymorphism_search(x: &Structure, kind: PolyKind) -> Result<PolySearch> {
    polymorphism_search_with_budget(x, kind, DEFAULT_NODE_BUDGET)
}

pub fn polymorphism_search_with_budget(
    x: &Structure,
    kind: PolyKind,
    budget: u64,
) -> Result<PolySearch> {
    let n = x.size();
    if n == 0 {
        return Err(Error::Invalid("empty universe".into()));
    }
    let mut cells = prefilled_cells(n, kind)?;
    let free: Vec<usize> = (0..cells.len()).filter(|&c| cells[c].is_none()).collect();
    let mut position = vec![usize::MAX; cells.len()];
    for (p, &c) in free.iter().enumerate() {
        position[c] = p;
    }

    let relations: Vec<&crate::structures::TupleSet> = x.relations().values().collect();
    let mut attached: Vec<Vec<Constraint>> = (0..free.len()).map(|_| Vec::new()).collect();
    for (ri, rel) in relations.iter().enumerate() {
        let tuples: Vec<&Tuple> = rel.tuples().iter().collect();
        for t1 in &tuples {
            for t2 in &tuples {
                for t3 in &tuples {
                    let cs: Vec<usize> = (0..rel.arity())
                        .map(|j| (t1[j] * n + t2[j]) * n + t3[j])
                        .collect();
                    let last = cs
                        .iter()
                        .filter(|&&c| position[c] != usize::MAX)
                        .map(|&c| position[c])
                        .max();
                    let constraint = Constraint {
                        relation: ri,
                        cells: cs,
                    };
                    match last {
                        Some(p) => attached[p].push(constraint),
                        None => {
                            if !satisfied(&constraint, &cells, &relations) {
                                return Ok(PolySearch::NotFound { nodes: 0 });
                            }
                        }
                    }
                }
            }
        }
    }

    let mut nodes = 0u64;
    let outcome = backtrack(
        0, &free, &attached, &relations, &mut cells, n, &mut nodes, budget,
    );
    Ok(match outcome {
        Step::Solved => {
            let values: Vec<usize> = cells.into_iter().map(|c| c.expect("complete")).collect();
            let table = OperationTable::new(3, n, values)?;
            // re-verify independently of the search state
            let identities = match kind {
                PolyKind::Majority => verify_majority(&table)?,
                PolyKind::Maltsev => verify_maltsev(&table)?,
            };
            assert!(
                identities.holds,
                "search produced a table failing its identities"
            );
            assert!(
                preserves_relations(&table, x),
                "search produced a non-polymorphism"
            );
            PolySearch::Found { table, nodes }
        }
        Step::Exhausted => PolySearch::NotFound { nodes },
        Step::OutOfBudget => PolySearch::Undecided { nodes },
    })
}

enum Step {
    Solved,
    Exhausted,
    OutOfBudget,
}

fn satisfied(
    c: &Constraint,
    cells: &[Option<usize>],
    relations: &[&crate::structures::TupleSet],
) -> bool {
    let image: Tuple = c
        .cells
        .iter()
        .map(|&cell| cells[cell].expect("assigned"))
        .collect();
    relations[c.relation].contains(&image)
}

#[allow(clippy::too_many_arguments)]
fn backtrack(
    p: usize,
    free: &[usize],
    attached: &[Vec<Constraint>],
    relations: &[&crate::structures::TupleSet],
    cells: &mut [Option<usize>],
    n: usize,
    nodes: &mut u64,
    budget: u64,
) -> Step {
    if p == free.len() {
        return Step::Solved;
    }
    for v in 0..n {
        if *nodes >= budget {
            return Step::OutOfBudget;
        }
        *nodes += 1;
        cells[free[p]] = Some(v);
        if attached[p].iter().all(|c| satisfied(c, cells, relations)) {
            match backtrack(p + 1, free, attached, relations, cells, n, nodes, budget) {
                Step::Exhausted => {}
                other => return other,
            }
        }
    }
    cells[free[p]] = None;
    Step::Exhausted
}

/// Direct check: applying the ternary table coordinatewise to any three
/// related tuples yields a related tuple, for every relation.
pub fn preserves_relations(table: &OperationTable, x: &Structure) -> bool {
    x.relations().values().all(|rel| {
        rel.tuples().iter().all(|t1| {
            rel.tuples().iter().all(|t2| {
                rel.tuples().iter().all(|t3| {
                    let image: Tuple = (0..rel.arity())
                        .map(|j| table.apply3(t1[j], t2[j], t3[j]))
                        .collect();
                    rel.contains(&image)
                })
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::boolean_majority;
    use crate::structures::FiniteSet;

    fn chain_order() -> Structure {
        Structure::single(
            FiniteSet::new(2),
            "le",
            2,
            vec![vec![0, 0], vec![0, 1], vec![1, 1]],
        )
        .unwrap()
    }

    #[test]
    fn two_chain_has_majority_polymorphism() {
        match polymorphism_search(&chain_order(), PolyKind::Majority).unwrap() {
            PolySearch::Found { table, .. } => assert_eq!(table, boolean_majority()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counterexample_has_none() {
        let s = Structure::single(
            FiniteSet::new(2),
            "R",
            3,
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 0]],
        )
        .unwrap();
        assert_eq!(
            polymorphism_search(&s, PolyKind::Majority).unwrap(),
            PolySearch::NotFound { nodes: 0 }
        );
        assert!(!preserves_relations(&boolean_majority(), &s));
    }

    #[test]
    fn no_relations_means_identities_only() {
        let s = Structure::new(FiniteSet::new(4));
        for kind in [PolyKind::Majority, PolyKind::Maltsev] {
            match polymorphism_search(&s, kind).unwrap() {
                PolySearch::Found { nodes, .. } => {
                    let free = if kind == PolyKind::Majority { 24 } else { 36 };
                    assert_eq!(nodes, free);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn maltsev_for_order_fails_but_for_equivalence_succeeds() {
        // a Mal'tsev polymorphism forces difunctionality; ≤ on a 2-chain is not
        assert!(matches!(
            polymorphism_search(&chain_order(), PolyKind::Maltsev).unwrap(),
            PolySearch::NotFound { .. }
        ));
        let eq = Structure::single(
            FiniteSet::new(3),
            "E",
            2,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 2]],
        )
        .unwrap();
        assert!(matches!(
            polymorphism_search(&eq, PolyKind::Maltsev).unwrap(),
            PolySearch::Found { .. }
        ));
    }

    #[test]
    fn budget_gives_undecided() {
        let s = Structure::new(FiniteSet::new(4));
        assert_eq!(
            polymorphism_search_with_budget(&s, PolyKind::Majority, 3).unwrap(),
            PolySearch::Undecided { nodes: 3 }
        );
    }
}
