//! Majority terms from lattice and ring operations, and term search in the
//! ternary clone of an algebra.

use majority::algebra::{
    has_majority_term, has_maltsev_term, lattice_majority_term, ring_majority_term,
    verify_majority, FiniteAlgebra, OperationTable, RingTables, TermSearch,
};
use majority::structures::FiniteSet;

fn main() -> majority::Result<()> {
    let chain = FiniteAlgebra::chain(4);
    let t = lattice_majority_term(
        chain.operation("meet").unwrap(),
        chain.operation("join").unwrap(),
    )?;
    println!(
        "lattice term on a 4-chain is majority: {}",
        verify_majority(&t.table)?.holds
    );

    for (m, n) in [(2, 2), (6, 3), (4, 2)] {
        match ring_majority_term(&RingTables::modular(m), n) {
            Ok(p) => println!(
                "ring term on Z{m}, n={n}: majority {}",
                verify_majority(&p)?.holds
            ),
            Err(e) => println!("ring term on Z{m}, n={n}: {e}"),
        }
    }

    let semilattice = FiniteAlgebra::new(FiniteSet::new(2))
        .with_operation("meet", OperationTable::from_fn(2, 2, |a| a[0].min(a[1])))?;
    let z2 = FiniteAlgebra::cyclic_group(2);
    for (name, a) in [
        ("2-chain", FiniteAlgebra::chain(2)),
        ("semilattice", semilattice),
        ("Z2", z2),
    ] {
        let maj = has_majority_term(&a, 1000)?;
        let mal = has_maltsev_term(&a, 1000)?;
        println!(
            "{name}: majority {}, Mal'tsev {}",
            summary(&maj),
            summary(&mal)
        );
    }
    Ok(())
}

fn summary(t: &TermSearch) -> String {
    match t {
        TermSearch::Yes(_) => "yes".into(),
        TermSearch::No { clone_size } => format!("no ({clone_size} ternary terms)"),
        TermSearch::Undecided { explored } => format!("undecided ({explored} explored)"),
    }
}
