//! Exhaustive search for commutative majority operations, and the equation
//! chain that forces such an algebra to be trivial.

use majority::algebra::{
    boolean_majority, commutative_majority_search, is_commutative_majority, lemma_trace,
};

fn main() -> majority::Result<()> {
    for n in 1..=3 {
        let s = commutative_majority_search(n)?;
        let found = if s.table.is_some() { "found" } else { "none" };
        println!("n={n}: {found} ({} candidates)", s.candidates);
    }

    let p = boolean_majority();
    if let Some(w) = is_commutative_majority(&p)?.witness {
        println!("Boolean majority: {w}");
    }
    let trace = lemma_trace(&p, 0, 1)?;
    for step in &trace.steps {
        let mark = if step.holds { "=" } else { "≠" };
        println!(
            "  {mark} {:<32} {}  [{}]",
            step.expression, step.value, step.by
        );
    }
    Ok(())
}
