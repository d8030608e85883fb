//! Strict closedness under the builtin extended matrices, least closures,
//! and difunctionality.

use majority::matrix::{
    builtin_matrix, is_difunctional, is_strictly_closed, strict_closure, BUILTIN_MATRICES,
};
use majority::structures::{FiniteSet, Relation};

fn main() -> majority::Result<()> {
    for name in BUILTIN_MATRICES {
        print!("{}", builtin_matrix(name)?.to_text());
    }

    let two = FiniteSet::new(2);
    let r = Relation::new(
        vec![two.clone(), two.clone(), two.clone()],
        vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 0]],
    )?;
    let majority = builtin_matrix("majority")?;
    let v = is_strictly_closed(&r, &majority)?;
    println!("closed under majority: {}", v.holds);
    if let Some(w) = v.witness {
        println!("  {w}");
    }
    let closed = strict_closure(&r, &majority)?;
    println!("least closed superset: {:?}", closed.tuples());

    let pairs = Relation::new(
        vec![two.clone(), two],
        vec![vec![0, 0], vec![0, 1], vec![1, 0]],
    )?;
    let d = is_difunctional(&pairs)?;
    println!("{{(0,0),(0,1),(1,0)}} difunctional: {}", d.holds);
    println!(
        "closure under maltsev: {:?}",
        strict_closure(&pairs, &builtin_matrix("maltsev")?)?.tuples()
    );
    Ok(())
}
