//! The three-element ternary relation on {0,1} that is a Mal'tsev object
//! but not a majority object, with the pattern domains behind each verdict.

use majority::relobjects::{classify, majority_domain, maltsev_domain};
use majority::structures::{FiniteSet, Structure};

fn main() -> majority::Result<()> {
    let s = Structure::single(
        FiniteSet::new(2),
        "R",
        3,
        vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 0]],
    )?;

    let m = maltsev_domain(&s)?;
    let n = majority_domain(&s)?;
    println!(
        "U_M has {} points, U_N has {}",
        m.structure.size(),
        n.structure.size()
    );

    let v = classify(&s)?;
    println!("Mal'tsev object: {}", v.is_maltsev_object);
    println!("majority object: {}", v.is_majority_object);
    if let Some(w) = &v.witnesses.majority {
        println!("  {w}");
    }
    Ok(())
}
