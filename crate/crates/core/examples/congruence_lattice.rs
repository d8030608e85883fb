//! Congruences of small algebras, their joins and compositions, and the
//! distributivity and permutability checks.

use majority::algebra::{cong_compose, cong_join, congruences, lattice_checks, FiniteAlgebra};
use majority::structures::{FiniteSet, DEFAULT_UNIVERSE_CAP};

fn main() -> majority::Result<()> {
    let algebras = [
        ("Z6", FiniteAlgebra::cyclic_group(6)),
        ("3-chain lattice", FiniteAlgebra::chain(3)),
        ("bare 3-set", FiniteAlgebra::new(FiniteSet::new(3))),
    ];
    for (name, a) in algebras {
        let cs = congruences(&a, DEFAULT_UNIVERSE_CAP)?;
        let listed: Vec<String> = cs.iter().map(|c| c.describe()).collect();
        println!("{name}: {}", listed.join("  "));
        let report = lattice_checks(&cs)?;
        println!(
            "  distributive {}, permutable {}",
            report.distributive, report.permutable
        );
        let joins_are_compositions = cs.iter().all(|x| {
            cs.iter()
                .all(|y| cong_compose(x, y).unwrap() == cong_join(x, y).unwrap().to_relation())
        });
        println!("  every join is a composition: {joins_are_compositions}");
    }
    Ok(())
}
