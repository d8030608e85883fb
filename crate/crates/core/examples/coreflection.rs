//! Smallest enlargement of a relation that makes the structure a Mal'tsev
//! object, computed both in bulk and one tuple at a time.

use majority::relobjects::{
    is_maltsev_object, maltsev_coreflection, maltsev_coreflection_stepwise,
};
use majority::structures::{FiniteSet, Structure};

fn main() -> majority::Result<()> {
    let s = Structure::single(
        FiniteSet::new(2),
        "le",
        2,
        vec![vec![0, 0], vec![0, 1], vec![1, 1]],
    )?;
    println!("Mal'tsev object before: {}", is_maltsev_object(&s)?.holds);
    let core = maltsev_coreflection(&s)?;
    assert_eq!(core, maltsev_coreflection_stepwise(&s)?);
    print!("{}", core.to_text());
    println!("Mal'tsev object after: {}", is_maltsev_object(&core)?.holds);
    Ok(())
}
