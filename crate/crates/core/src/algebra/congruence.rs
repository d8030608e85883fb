//! Congruences of finite algebras, their lattice operations and the
//! relational identities checked on them.

use super::FiniteAlgebra;
use crate::error::{Error, Result};
use crate::structures::{FiniteSet, Relation, Tuple};
use crate::witness::{Verdict, Witness, WitnessKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet, VecDeque};

/// Universes up to this size enumerate congruences by filtering all set
/// partitions; larger ones join principal congruences.
pub const EXHAUSTIVE_PARTITION_LIMIT: usize = 6;

/// An equivalence relation given by block ids, normalized so ids appear in
/// first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Congruence {
    blocks: Vec<usize>,
}

impl Congruence {
    /// Normalizes an arbitrary block labelling.
    pub fn from_blocks(labels: &[usize]) -> Self {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let blocks = labels
            .iter()
            .map(|&l| match map.iter().find(|(old, _)| *old == l) {
                Some(&(_, new)) => new,
                None => {
                    let new = map.len();
                    map.push((l, new));
                    new
                }
            })
            .collect();
        Congruence { blocks }
    }

    pub fn diagonal(n: usize) -> Self {
        Congruence {
            blocks: (0..n).collect(),
        }
    }

    pub fn full(n: usize) -> Self {
        Congruence { blocks: vec![0; n] }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn size(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().max().map_or(0, |m| m + 1)
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.blocks[a] == self.blocks[b]
    }

    /// The pairs of the equivalence, as a binary relation.
    pub fn to_relation(&self) -> Relation {
        let n = self.size();
        let set = FiniteSet::new(n);
        let mut r = Relation::empty(vec![set.clone(), set]);
        for a in 0..n {
            for b in 0..n {
                if self.related(a, b) {
                    r.insert_unchecked(vec![a, b]);
                }
            }
        }
        r
    }

    /// The blocks as sorted element lists, e.g. `{0,2}{1,3}`.
    pub fn describe(&self) -> String {
        (0..self.block_count())
            .map(|b| {
                let members: Vec<String> = (0..self.size())
                    .filter(|&e| self.blocks[e] == b)
                    .map(|e| e.to_string())
                    .collect();
                format!("{{{}}}", members.join(","))
            })
            .collect()
    }

    fn from_union_find(uf: &mut UnionFind) -> Self {
        let roots: Vec<usize> = (0..uf.parent.len()).map(|i| uf.find(i)).collect();
        Congruence::from_blocks(&roots)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two classes were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}

fn same_size(a: &Congruence, b: &Congruence) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::Signature(format!(
            "congruences on {} and {} elements",
            a.size(),
            b.size()
        )));
    }
    Ok(())
}

/// `{(x, z) : ∃y. x α y ∧ y β z}`; not necessarily an equivalence.
pub fn cong_compose(alpha: &Congruence, beta: &Congruence) -> Result<Relation> {
    same_size(alpha, beta)?;
    let n = alpha.size();
    let set = FiniteSet::new(n);
    let mut r = Relation::empty(vec![set.clone(), set]);
    for x in 0..n {
        for z in 0..n {
            if (0..n).any(|y| alpha.related(x, y) && beta.related(y, z)) {
                r.insert_unchecked(vec![x, z]);
            }
        }
    }
    Ok(r)
}

pub fn cong_meet(alpha: &Congruence, beta: &Congruence) -> Result<Congruence> {
    same_size(alpha, beta)?;
    let pairs: Vec<(usize, usize)> = alpha
        .blocks
        .iter()
        .copied()
        .zip(beta.blocks.iter().copied())
        .collect();
    let labels: Vec<usize> = pairs
        .iter()
        .map(|p| pairs.iter().position(|q| q == p).expect("present"))
        .collect();
    Ok(Congruence::from_blocks(&labels))
}

/// Transitive closure of the union.
pub fn cong_join(alpha: &Congruence, beta: &Congruence) -> Result<Congruence> {
    same_size(alpha, beta)?;
    let n = alpha.size();
    let mut uf = UnionFind::new(n);
    for c in [alpha, beta] {
        for x in 0..n {
            let rep = c
                .blocks
                .iter()
                .position(|&b| b == c.blocks[x])
                .expect("present");
            uf.union(rep, x);
        }
    }
    Ok(Congruence::from_union_find(&mut uf))
}

/// Whether an equivalence is compatible with every operation. Checked one
/// argument position at a time, which suffices for equivalences.
pub fn is_compatible(a: &FiniteAlgebra, c: &Congruence) -> bool {
    let n = a.size();
    for op in a.operations().values() {
        let r = op.arity();
        if r == 0 {
            continue;
        }
        let others = vec![n; r - 1];
        for pos in 0..r {
            for rest in crate::structures::product_tuples(&others) {
                let mut args: Tuple = Vec::with_capacity(r);
                args.extend_from_slice(&rest[..pos]);
                args.push(0);
                args.extend_from_slice(&rest[pos..]);
                for x in 0..n {
                    for y in (x + 1)..n {
                        if !c.related(x, y) {
                            continue;
                        }
                        args[pos] = x;
                        let fx = op.apply(&args);
                        args[pos] = y;
                        let fy = op.apply(&args);
                        if !c.related(fx, fy) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Canonical order: finer first (more blocks), then by block vector.
fn sort_canonical(mut list: Vec<Congruence>) -> Vec<Congruence> {
    list.sort_by(|a, b| {
        b.block_count()
            .cmp(&a.block_count())
            .then_with(|| a.blocks.cmp(&b.blocks))
    });
    list.dedup();
    list
}

/// Filters every set partition (restricted growth strings) through the
/// compatibility check.
pub fn congruences_by_filter(a: &FiniteAlgebra) -> Vec<Congruence> {
    let n = a.size();
    let mut out = Vec::new();
    if n == 0 {
        return vec![Congruence::diagonal(0)];
    }
    let mut rgs = vec![0usize; n];
    loop {
        let c = Congruence {
            blocks: rgs.clone(),
        };
        if is_compatible(a, &c) {
            out.push(c);
        }
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return sort_canonical(out);
            }
            let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
            if rgs[i] <= max_prefix {
                rgs[i] += 1;
                for v in rgs.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Least congruence identifying `x` and `y`.
pub fn principal_congruence(a: &FiniteAlgebra, x: usize, y: usize) -> Congruence {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut queue = VecDeque::new();
    if uf.union(x, y) {
        queue.push_back((x, y));
    }
    while let Some((u, v)) = queue.pop_front() {
        for op in a.operations().values() {
            let r = op.arity();
            if r == 0 {
                continue;
            }
            let others = vec![n; r - 1];
            for pos in 0..r {
                for rest in crate::structures::product_tuples(&others) {
                    let mut args: Tuple = Vec::with_capacity(r);
                    args.extend_from_slice(&rest[..pos]);
                    args.push(u);
                    args.extend_from_slice(&rest[pos..]);
                    let fu = op.apply(&args);
                    args[pos] = v;
                    let fv = op.apply(&args);
                    if uf.union(fu, fv) {
                        queue.push_back((fu, fv));
                    }
                }
            }
        }
    }
    Congruence::from_union_find(&mut uf)
}

/// Closes the principal congruences under joins.
pub fn congruences_by_generation(a: &FiniteAlgebra) -> Vec<Congruence> {
    let n = a.size();
    let mut seen: HashSet<Congruence> = HashSet::new();
    let mut list = vec![Congruence::diagonal(n)];
    seen.insert(list[0].clone());
    for x in 0..n {
        for y in (x + 1)..n {
            let c = principal_congruence(a, x, y);
            if seen.insert(c.clone()) {
                list.push(c);
            }
        }
    }
    let mut i = 0;
    while i < list.len() {
        for j in 0..i {
            let joined = cong_join(&list[i], &list[j]).expect("same size");
            if seen.insert(joined.clone()) {
                list.push(joined);
            }
        }
        i += 1;
    }
    sort_canonical(list)
}

/// All congruences in canonical order (diagonal first, full last).
pub fn congruences(a: &FiniteAlgebra, max_universe: usize) -> Result<Vec<Congruence>> {
    if a.size() > max_universe {
        return Err(Error::UniverseCap {
            size: a.size(),
            cap: max_universe,
        });
    }
    Ok(if a.size() <= EXHAUSTIVE_PARTITION_LIMIT {
        congruences_by_filter(a)
    } else {
        congruences_by_generation(a)
    })
}

/// Distributivity and permutability of a congruence list. Witnesses index
/// into the list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeReport {
    pub distributive: bool,
    pub permutable: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distributivity_witness: Option<[usize; 3]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub permutability_witness: Option<[usize; 2]>,
}

pub fn lattice_checks(congs: &[Congruence]) -> Result<LatticeReport> {
    if let Some(first) = congs.first() {
        for c in congs {
            same_size(first, c)?;
        }
    }
    let mut distributivity_witness = None;
    'outer: for (i, a) in congs.iter().enumerate() {
        for (j, b) in congs.iter().enumerate() {
            for (k, c) in congs.iter().enumerate() {
                let lhs = cong_meet(a, &cong_join(b, c)?)?;
                let rhs = cong_join(&cong_meet(a, b)?, &cong_meet(a, c)?)?;
                if lhs != rhs {
                    distributivity_witness = Some([i, j, k]);
                    break 'outer;
                }
            }
        }
    }
    let mut permutability_witness = None;
    'perm: for (i, a) in congs.iter().enumerate() {
        for (j, b) in congs.iter().enumerate().skip(i + 1) {
            if cong_compose(a, b)? != cong_compose(b, a)? {
                permutability_witness = Some([i, j]);
                break 'perm;
            }
        }
    }
    Ok(LatticeReport {
        distributive: distributivity_witness.is_none(),
        permutable: permutability_witness.is_none(),
        distributivity_witness,
        permutability_witness,
    })
}

/// `K_B ∧ (K_A ∘ K_C) = (K_B ∧ K_A) ∘ (K_B ∧ K_C)` as relations. The
/// witness is the least pair in exactly one side; `in_lhs` says which.
pub fn distributivity_identity_check(
    ka: &Congruence,
    kb: &Congruence,
    kc: &Congruence,
) -> Result<Verdict> {
    same_size(ka, kb)?;
    same_size(kb, kc)?;
    let ac = cong_compose(ka, kc)?;
    let lhs: BTreeSet<Tuple> = ac
        .tuples()
        .iter()
        .filter(|t| kb.related(t[0], t[1]))
        .cloned()
        .collect();
    let rhs = cong_compose(&cong_meet(kb, ka)?, &cong_meet(kb, kc)?)?;
    let rhs: &BTreeSet<Tuple> = rhs.tuples();
    let diff = lhs.symmetric_difference(rhs).next();
    Ok(match diff {
        None => Verdict::pass(),
        Some(pair) => Verdict::fail(
            Witness::new(WitnessKind::IdentityViolation)
                .assign("in_lhs", usize::from(lhs.contains(pair)))
                .with_conclusion(pair.clone()),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::OperationTable;

    fn boolean4() -> FiniteAlgebra {
        // subsets of {0,1} as bit masks
        FiniteAlgebra::new(FiniteSet::new(4))
            .with_operation("and", OperationTable::from_fn(2, 4, |a| a[0] & a[1]))
            .unwrap()
            .with_operation("or", OperationTable::from_fn(2, 4, |a| a[0] | a[1]))
            .unwrap()
            .with_operation("not", OperationTable::from_fn(1, 4, |a| 3 - a[0]))
            .unwrap()
    }

    #[test]
    fn z4_has_three_congruences() {
        let z4 = FiniteAlgebra::cyclic_group(4);
        let cs = congruences(&z4, 4096).unwrap();
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], Congruence::diagonal(4));
        assert_eq!(cs[1].describe(), "{0,2}{1,3}");
        assert_eq!(cs[2], Congruence::full(4));
    }

    #[test]
    fn small_counts() {
        assert_eq!(congruences(&FiniteAlgebra::chain(2), 10).unwrap().len(), 2);
        assert_eq!(congruences(&boolean4(), 10).unwrap().len(), 4);
        assert_eq!(
            congruences(&FiniteAlgebra::cyclic_group(6), 10)
                .unwrap()
                .len(),
            4
        );
        assert!(congruences(&boolean4(), 3).is_err());
    }

    #[test]
    fn filter_and_generation_agree() {
        for a in [
            FiniteAlgebra::cyclic_group(4),
            FiniteAlgebra::cyclic_group(6),
            FiniteAlgebra::chain(4),
            boolean4(),
            FiniteAlgebra::new(FiniteSet::new(4)),
        ] {
            assert_eq!(congruences_by_filter(&a), congruences_by_generation(&a));
        }
        // no operations: every partition, Bell(4) = 15
        assert_eq!(
            congruences_by_filter(&FiniteAlgebra::new(FiniteSet::new(4))).len(),
            15
        );
    }

    #[test]
    fn lattice_ops() {
        let z4 = FiniteAlgebra::cyclic_group(4);
        let cs = congruences(&z4, 10).unwrap();
        let d = &cs[0];
        let m2 = &cs[1];
        assert_eq!(cong_compose(m2, d).unwrap(), m2.to_relation());
        assert_eq!(cong_compose(m2, m2).unwrap(), m2.to_relation());
        assert_eq!(cong_meet(m2, &cs[2]).unwrap(), *m2);
        assert_eq!(cong_join(m2, d).unwrap(), *m2);
        assert!(cong_join(m2, &Congruence::diagonal(3)).is_err());
    }

    #[test]
    fn chain_lattice_congruences_do_not_permute() {
        // 3-chain: {0,1}{2} and {0}{1,2} compose to different relations
        let cs = congruences(&FiniteAlgebra::chain(3), 10).unwrap();
        let report = lattice_checks(&cs).unwrap();
        assert!(report.distributive);
        assert!(!report.permutable);
    }

    #[test]
    fn m3_partition_lattice_is_not_distributive() {
        // no operations on 3 elements: all partitions form M3
        let cs = congruences(&FiniteAlgebra::new(FiniteSet::new(3)), 10).unwrap();
        assert_eq!(cs.len(), 5);
        let report = lattice_checks(&cs).unwrap();
        assert!(!report.distributive);
        let [i, j, k] = report.distributivity_witness.unwrap();
        let (a, b, c) = (&cs[i], &cs[j], &cs[k]);
        assert_ne!(
            cong_meet(a, &cong_join(b, c).unwrap()).unwrap(),
            cong_join(&cong_meet(a, b).unwrap(), &cong_meet(a, c).unwrap()).unwrap()
        );
    }

    #[test]
    fn identity_check_trivial_and_failing() {
        let d = Congruence::diagonal(3);
        let f = Congruence::full(3);
        assert!(distributivity_identity_check(&d, &d, &f).unwrap().holds);
        // in the partition lattice of a 3-set the identity fails
        let a = Congruence::from_blocks(&[0, 0, 1]);
        let b = Congruence::from_blocks(&[0, 1, 0]);
        let c = Congruence::from_blocks(&[0, 1, 1]);
        let v = distributivity_identity_check(&a, &b, &c).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.conclusion, vec![0, 2]);
        assert_eq!(w.assignment["in_lhs"], 1);
    }

    #[test]
    fn normalization() {
        assert_eq!(
            Congruence::from_blocks(&[5, 3, 5, 7]).blocks(),
            &[0, 1, 0, 2]
        );
    }
}
