//! Mal'tsev and majority objects among `k`-ary relational structures.
//!
//! Both conditions are checked the same way: carve a pattern subset out of
//! the cube `S³`, equip it with the restricted power relation, and ask
//! whether the canonical map back to `S` preserves the relation. The
//! Mal'tsev pattern keeps `(x,x,y)` and `(y,x,x)` and sends them to the
//! non-repeated value; the majority pattern keeps every triple with a
//! repeat and sends it to the repeated value.

use crate::error::Result;
use crate::structures::{
    decode_power_element, is_homomorphism, product_power, restrict, FiniteMap, Structure, Tuple,
};
use crate::witness::{Verdict, Witness};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A pattern subset of the cube with its canonical map back to the base.
#[derive(Debug, Clone)]
pub struct PatternDomain {
    pub structure: Structure,
    pub map: FiniteMap,
    /// Coordinates in `S³` of each domain element, ascending by cube index.
    pub points: Vec<Tuple>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pattern {
    Maltsev,
    Majority,
}

impl Pattern {
    /// Value of the canonical map, or `None` outside the pattern set. Every
    /// matching clause is evaluated and required to agree.
    fn value(self, t: &[usize]) -> Option<usize> {
        let (x, y, z) = (t[0], t[1], t[2]);
        let clauses: Vec<usize> = match self {
            // f(x,x,y) = y, f(y,x,x) = y
            Pattern::Maltsev => [(x == y).then_some(z), (y == z).then_some(x)]
                .into_iter()
                .flatten()
                .collect(),
            // f(x,x,y) = f(x,y,x) = f(y,x,x) = x
            Pattern::Majority => [
                (x == y).then_some(x),
                (x == z).then_some(x),
                (y == z).then_some(y),
            ]
            .into_iter()
            .flatten()
            .collect(),
        };
        let first = *clauses.first()?;
        assert!(
            clauses.iter().all(|&v| v == first),
            "pattern clauses disagree on {t:?}"
        );
        Some(first)
    }
}

fn pattern_domain(s: &Structure, pattern: Pattern) -> Result<PatternDomain> {
    s.sole_relation()?;
    let n = s.size();
    let cube = product_power(s, 3)?;
    let mut subset = Vec::new();
    let mut points = Vec::new();
    let mut values = Vec::new();
    for code in 0..cube.size() {
        let t = decode_power_element(code, n, 3);
        if let Some(v) = pattern.value(&t) {
            subset.push(code);
            values.push(v);
            points.push(t);
        }
    }
    let structure = restrict(&cube, &subset)?;
    let map = FiniteMap::new(structure.universe().clone(), s.universe().clone(), values)?;
    Ok(PatternDomain {
        structure,
        map,
        points,
    })
}

/// `U_M = {(x,x,y)} ∪ {(y,x,x)}` with `f(x,x,y) = y = f(y,x,x)`.
pub fn maltsev_domain(s: &Structure) -> Result<PatternDomain> {
    pattern_domain(s, Pattern::Maltsev)
}

/// `U_N = {(x,x,y)} ∪ {(x,y,x)} ∪ {(y,x,x)}` with `f` the repeated value.
pub fn majority_domain(s: &Structure) -> Result<PatternDomain> {
    pattern_domain(s, Pattern::Majority)
}

/// Translates a homomorphism witness on the domain into cube coordinates.
fn in_coordinates(domain: &PatternDomain, mut w: Witness) -> Witness {
    w.premises = w.premises[0]
        .iter()
        .map(|&e| domain.points[e].clone())
        .collect();
    w
}

fn pattern_check(s: &Structure, pattern: Pattern) -> Result<Verdict> {
    let domain = pattern_domain(s, pattern)?;
    let verdict = is_homomorphism(&domain.map, &domain.structure, s)?;
    Ok(match verdict.witness {
        None => verdict,
        Some(w) => Verdict::fail(in_coordinates(&domain, w)),
    })
}

/// The witness, when present, lists the related domain points (as cube
/// coordinates) and their image missing from the relation.
pub fn is_maltsev_object(s: &Structure) -> Result<Verdict> {
    pattern_check(s, Pattern::Maltsev)
}

pub fn is_majority_object(s: &Structure) -> Result<Verdict> {
    pattern_check(s, Pattern::Majority)
}

/// Boolean-only variant of [`is_maltsev_object`] that never materializes the
/// cube. Intended for sweeps over many structures.
pub fn is_maltsev_object_direct(s: &Structure) -> Result<bool> {
    direct_check(s, Pattern::Maltsev)
}

/// Boolean-only variant of [`is_majority_object`].
pub fn is_majority_object_direct(s: &Structure) -> Result<bool> {
    direct_check(s, Pattern::Majority)
}

fn fast_value(pattern: Pattern, x: usize, y: usize, z: usize) -> Option<usize> {
    match pattern {
        Pattern::Maltsev if x == y => Some(z),
        Pattern::Maltsev if y == z => Some(x),
        Pattern::Majority if x == y || x == z => Some(x),
        Pattern::Majority if y == z => Some(y),
        _ => None,
    }
}

/// A related tuple of the restricted cube is a choice of one relation tuple
/// per cube coordinate whose columns all land in the pattern set.
fn direct_check(s: &Structure, pattern: Pattern) -> Result<bool> {
    let (_, rel) = s.sole_relation()?;
    let n = s.size();
    let k = rel.arity();
    let members: Vec<&Tuple> = rel.tuples().iter().collect();
    let dense = n.checked_pow(k as u32).filter(|&c| c <= 1 << 24);
    let bits: Option<Vec<bool>> = dense.map(|cells| {
        let mut b = vec![false; cells];
        for t in &members {
            b[t.iter().fold(0, |acc, &v| acc * n + v)] = true;
        }
        b
    });
    let mut image = vec![0usize; k];
    for r0 in &members {
        for r1 in &members {
            'next: for r2 in &members {
                for i in 0..k {
                    match fast_value(pattern, r0[i], r1[i], r2[i]) {
                        Some(v) => image[i] = v,
                        None => continue 'next,
                    }
                }
                let present = match &bits {
                    Some(b) => b[image.iter().fold(0, |acc, &v| acc * n + v)],
                    None => rel.contains(&image),
                };
                if !present {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Re-derives a Mal'tsev-object witness from scratch: the premises are
/// pattern points whose columns are relation tuples, and their image is the
/// recorded conclusion, absent from the relation.
pub fn replay_maltsev_witness(s: &Structure, w: &Witness) -> Result<bool> {
    replay(s, Pattern::Maltsev, w)
}

pub fn replay_majority_witness(s: &Structure, w: &Witness) -> Result<bool> {
    replay(s, Pattern::Majority, w)
}

fn replay(s: &Structure, pattern: Pattern, w: &Witness) -> Result<bool> {
    let (_, rel) = s.sole_relation()?;
    let n = s.size();
    if w.premises.len() != rel.arity()
        || w.premises
            .iter()
            .any(|p| p.len() != 3 || p.iter().any(|&v| v >= n))
    {
        return Ok(false);
    }
    let columns_related = (0..3).all(|c| {
        let column: Tuple = w.premises.iter().map(|p| p[c]).collect();
        rel.contains(&column)
    });
    let image: Option<Tuple> = w.premises.iter().map(|p| pattern.value(p)).collect();
    Ok(columns_related && image.as_ref() == Some(&w.conclusion) && !rel.contains(&w.conclusion))
}

/// Images of all related domain tuples that fall outside the relation.
fn missing_images(s: &Structure, domain: &PatternDomain) -> Result<BTreeSet<Tuple>> {
    let (name, target) = s.sole_relation()?;
    let rel = domain
        .structure
        .relation_set(name)
        .expect("domain carries the same relation");
    Ok(rel
        .tuples()
        .iter()
        .map(|t| domain.map.apply_tuple(t))
        .filter(|img| !target.contains(img))
        .collect())
}

/// Least enlargement of the relation making `s` a Mal'tsev object. Each
/// round adds every currently missing image.
pub fn maltsev_coreflection(s: &Structure) -> Result<Structure> {
    let (name, _) = s.sole_relation()?;
    let name = name.to_string();
    let mut current = s.clone();
    loop {
        let domain = maltsev_domain(&current)?;
        let missing = missing_images(&current, &domain)?;
        if missing.is_empty() {
            return Ok(current);
        }
        let rel = current.relation_set(&name).expect("relation");
        let tuples: Vec<Tuple> = rel.tuples().iter().cloned().chain(missing).collect();
        current = current.with_tuples(&name, tuples)?;
    }
}

/// Same fixpoint, adding only the least missing image per round.
pub fn maltsev_coreflection_stepwise(s: &Structure) -> Result<Structure> {
    let (name, _) = s.sole_relation()?;
    let name = name.to_string();
    let mut current = s.clone();
    loop {
        let verdict = is_maltsev_object(&current)?;
        let Some(w) = verdict.witness else {
            return Ok(current);
        };
        let rel = current.relation_set(&name).expect("relation");
        let tuples: Vec<Tuple> = rel
            .tuples()
            .iter()
            .cloned()
            .chain(std::iter::once(w.conclusion))
            .collect();
        current = current.with_tuples(&name, tuples)?;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectWitnesses {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub maltsev: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub majority: Option<Witness>,
}

/// Both object checks for one structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectVerdict {
    #[serde(rename = "maltsev")]
    pub is_maltsev_object: bool,
    #[serde(rename = "majority")]
    pub is_majority_object: bool,
    pub witnesses: ObjectWitnesses,
}

pub fn classify(s: &Structure) -> Result<ObjectVerdict> {
    let maltsev = is_maltsev_object(s)?;
    let majority = is_majority_object(s)?;
    Ok(ObjectVerdict {
        is_maltsev_object: maltsev.holds,
        is_majority_object: majority.holds,
        witnesses: ObjectWitnesses {
            maltsev: maltsev.witness,
            majority: majority.witness,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::FiniteSet;

    fn counterexample() -> Structure {
        Structure::single(
            FiniteSet::new(2),
            "R",
            3,
            vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 0]],
        )
        .unwrap()
    }

    fn value_at(d: &PatternDomain, point: [usize; 3]) -> usize {
        let idx = d.points.iter().position(|p| p[..] == point).unwrap();
        d.map.apply(idx)
    }

    #[test]
    fn maltsev_domain_sizes_and_values() {
        let s = counterexample();
        let d = maltsev_domain(&s).unwrap();
        assert_eq!(d.structure.size(), 6);
        assert_eq!(value_at(&d, [1, 0, 0]), 1);
        assert_eq!(value_at(&d, [0, 0, 1]), 1);
        assert_eq!(value_at(&d, [1, 1, 1]), 1);
        assert!(!d.points.contains(&vec![0, 1, 0]));
        assert_eq!(d.structure.universe().label(0), "(0,0,0)");

        let one = Structure::single(FiniteSet::new(1), "R", 3, vec![]).unwrap();
        let d1 = maltsev_domain(&one).unwrap();
        assert_eq!(d1.structure.size(), 1);
        assert_eq!(d1.map.values(), &[0]);
    }

    #[test]
    fn majority_domain_sizes_and_values() {
        let d2 = majority_domain(&counterexample()).unwrap();
        assert_eq!(d2.structure.size(), 8);
        assert_eq!(value_at(&d2, [1, 1, 0]), 1);
        assert_eq!(value_at(&d2, [0, 1, 0]), 0);
        assert_eq!(value_at(&d2, [1, 0, 0]), 0);
        let s3 = Structure::discrete(3, 3);
        assert_eq!(majority_domain(&s3).unwrap().structure.size(), 21);
    }

    #[test]
    fn counterexample_verdicts() {
        let s = counterexample();
        assert!(is_maltsev_object(&s).unwrap().holds);
        let v = is_majority_object(&s).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(
            w.premises,
            vec![vec![1, 0, 0], vec![1, 1, 0], vec![0, 1, 0]]
        );
        assert_eq!(w.conclusion, vec![0, 1, 0]);
    }

    #[test]
    fn discrete_and_empty_are_maltsev() {
        let d = Structure::discrete(3, 3);
        let c = classify(&d).unwrap();
        assert!(c.is_maltsev_object && c.is_majority_object);
        let e = Structure::single(FiniteSet::new(3), "R", 3, vec![]).unwrap();
        assert!(is_maltsev_object(&e).unwrap().holds);
    }

    #[test]
    fn coreflection_fixes_maltsev_objects() {
        let s = counterexample();
        assert_eq!(maltsev_coreflection(&s).unwrap(), s);
        let d = Structure::discrete(2, 3);
        assert_eq!(maltsev_coreflection(&d).unwrap(), d);
    }

    #[test]
    fn coreflection_of_single_triple() {
        let s = Structure::single(FiniteSet::new(2), "R", 3, vec![vec![0, 1, 0]]).unwrap();
        let r = maltsev_coreflection(&s).unwrap();
        assert!(is_maltsev_object(&r).unwrap().holds);
        assert_eq!(r, maltsev_coreflection_stepwise(&s).unwrap());
        // brute-force least-ness over all 2^8 relations on {0,1}
        let all: Vec<Tuple> = (0..8).map(|c| decode_power_element(c, 2, 3)).collect();
        let base = s.relation_set("R").unwrap().tuples().clone();
        let target = r.relation_set("R").unwrap().tuples().clone();
        for mask in 0u32..256 {
            let tuples: BTreeSet<Tuple> = (0..8)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| all[i].clone())
                .collect();
            if !base.is_subset(&tuples) {
                continue;
            }
            let cand = s.with_tuples("R", tuples.iter().cloned()).unwrap();
            if is_maltsev_object(&cand).unwrap().holds {
                assert!(target.is_subset(&tuples));
            }
        }
    }

    #[test]
    fn binary_relations_are_majority_objects() {
        for mask in 0u32..16 {
            let tuples = (0..4)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| vec![i / 2, i % 2]);
            let s = Structure::single(FiniteSet::new(2), "E", 2, tuples).unwrap();
            assert!(is_majority_object(&s).unwrap().holds, "mask {mask}");
        }
    }

    #[test]
    fn requires_single_relation() {
        let mut s = counterexample();
        s.add_relation("T", 2, vec![]).unwrap();
        assert!(classify(&s).is_err());
    }

    #[test]
    fn verdict_json_shape() {
        let v = classify(&counterexample()).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["maltsev"], true);
        assert_eq!(json["majority"], false);
        assert_eq!(
            json["witnesses"]["majority"]["conclusion"],
            serde_json::json!([0, 1, 0])
        );
        assert!(json["witnesses"].get("maltsev").is_none());
    }

    #[test]
    fn direct_checks_agree_with_witness_checks() {
        // every ternary relation on 2 elements, and every binary one on 3
        for (n, k) in [(2usize, 3usize), (3, 2)] {
            let cells = n.pow(k as u32);
            for mask in 0u32..(1 << cells) {
                let tuples = (0..cells as u32)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| crate::structures::decode_power_element(i as usize, n, k));
                let s = Structure::single(FiniteSet::new(n), "R", k, tuples).unwrap();
                assert_eq!(
                    is_maltsev_object(&s).unwrap().holds,
                    is_maltsev_object_direct(&s).unwrap()
                );
                assert_eq!(
                    is_majority_object(&s).unwrap().holds,
                    is_majority_object_direct(&s).unwrap()
                );
            }
        }
    }

    #[test]
    fn witnesses_replay() {
        let s = counterexample();
        let w = is_majority_object(&s).unwrap().witness.unwrap();
        assert!(replay_majority_witness(&s, &w).unwrap());
        assert!(!replay_maltsev_witness(&s, &w).unwrap());
        let mut forged = w.clone();
        forged.premises[0] = vec![0, 0, 0];
        assert!(!replay_majority_witness(&s, &forged).unwrap());
        // ≤ on a 2-chain is not difunctional
        let t = Structure::single(
            FiniteSet::new(2),
            "R",
            2,
            vec![vec![0, 0], vec![0, 1], vec![1, 1]],
        )
        .unwrap();
        let w = is_maltsev_object(&t).unwrap().witness.unwrap();
        assert!(replay_maltsev_witness(&t, &w).unwrap());
    }
}
