//! Text and JSON forms of structures, matrices and algebras.

use majority::algebra::{parse_algebra, FiniteAlgebra};
use majority::matrix::{builtin_matrix, parse_matrix};
use majority::structures::{parse_structure, parse_structure_json};

fn main() -> majority::Result<()> {
    let s = parse_structure("universe 3\nlabels a b c\nrel E 2\n0 1\n1 2\nend\n")?;
    print!("{}", s.to_text());
    let json = serde_json::to_string(&s.to_json()).expect("serializes");
    println!("{json}");
    assert_eq!(parse_structure_json(&json)?, s);

    let m = parse_matrix("matrix 2 3\nx x | 0\nx 0 | x\n")?;
    assert_eq!(m, builtin_matrix("subtractive")?);
    print!("{}", m.to_text());

    let z3 = FiniteAlgebra::cyclic_group(3);
    let text = z3.to_text();
    print!("{text}");
    assert_eq!(parse_algebra(&text)?, z3);

    if let Err(e) = parse_structure("universe 2\nrel R 2\n0 2\nend\n") {
        println!("{e}");
    }
    Ok(())
}
