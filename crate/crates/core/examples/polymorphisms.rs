//! Backtracking search for majority and Mal'tsev polymorphisms.

use majority::algebra::{
    polymorphism_search, polymorphism_search_with_budget, PolyKind, PolySearch,
};
use majority::structures::{FiniteSet, Structure};

fn show(label: &str, r: &PolySearch) {
    match r {
        PolySearch::Found { table, nodes } => {
            println!("{label}: found after {nodes} nodes");
            print!("{}", table.to_text("p"));
        }
        PolySearch::NotFound { nodes } => println!("{label}: none ({nodes} nodes)"),
        PolySearch::Undecided { nodes } => println!("{label}: undecided ({nodes} nodes)"),
    }
}

fn main() -> majority::Result<()> {
    let order = Structure::single(
        FiniteSet::new(3),
        "le",
        2,
        vec![
            vec![0, 0],
            vec![0, 1],
            vec![0, 2],
            vec![1, 1],
            vec![1, 2],
            vec![2, 2],
        ],
    )?;
    show(
        "3-chain order, majority",
        &polymorphism_search(&order, PolyKind::Majority)?,
    );
    show(
        "3-chain order, Mal'tsev",
        &polymorphism_search(&order, PolyKind::Maltsev)?,
    );

    let s = Structure::single(
        FiniteSet::new(2),
        "R",
        3,
        vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 0]],
    )?;
    show(
        "counterexample, majority",
        &polymorphism_search(&s, PolyKind::Majority)?,
    );

    let bare = Structure::new(FiniteSet::new(5));
    show(
        "5 points, budget 10",
        &polymorphism_search_with_budget(&bare, PolyKind::Majority, 10)?,
    );
    Ok(())
}
