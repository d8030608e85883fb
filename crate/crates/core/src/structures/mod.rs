//! Finite sets, relations, relational structures and the maps between them.
//!
//! Elements are always indices `0..size`. Tuple sets are kept in a
//! `BTreeSet`, so iteration order is lexicographic and every "least" witness
//! falls out of a plain forward scan.

pub(crate) mod format;

pub use format::{parse_structure, parse_structure_json, RelationJson, StructureJson};

use crate::error::{Error, Result};
use crate::witness::{Verdict, Witness, WitnessKind};
use std::collections::{BTreeMap, BTreeSet};

pub type Tuple = Vec<usize>;

/// Default cap on the universe size of constructed products.
pub const DEFAULT_UNIVERSE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteSet {
    size: usize,
    labels: Option<Vec<String>>,
    basepoint: Option<usize>,
}

impl FiniteSet {
    pub fn new(size: usize) -> Self {
        FiniteSet {
            size,
            labels: None,
            basepoint: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::Invalid(format!(
                "{} labels given for a set of size {}",
                labels.len(),
                self.size
            )));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::Invalid("labels must be distinct".into()));
        }
        if let Some(bad) = labels
            .iter()
            .find(|l| l.is_empty() || l.contains(char::is_whitespace))
        {
            return Err(Error::Invalid(format!(
                "label {bad:?} is empty or contains whitespace"
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_basepoint(mut self, basepoint: usize) -> Result<Self> {
        if basepoint >= self.size {
            return Err(Error::Invalid(format!(
                "basepoint {basepoint} out of range for size {}",
                self.size
            )));
        }
        self.basepoint = Some(basepoint);
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    /// Display name of an element: its label, or its index.
    pub fn label(&self, element: usize) -> String {
        match &self.labels {
            Some(l) => l[element].clone(),
            None => element.to_string(),
        }
    }
}

/// A finite relation between (possibly different) finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    signature: Vec<FiniteSet>,
    tuples: BTreeSet<Tuple>,
}

impl Relation {
    pub fn new<I>(signature: Vec<FiniteSet>, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tuple>,
    {
        let mut rel = Relation {
            signature,
            tuples: BTreeSet::new(),
        };
        for t in tuples {
            rel.insert(t)?;
        }
        Ok(rel)
    }

    pub fn empty(signature: Vec<FiniteSet>) -> Self {
        Relation {
            signature,
            tuples: BTreeSet::new(),
        }
    }

    /// Every tuple of the full product of the signature.
    pub fn full(signature: Vec<FiniteSet>) -> Self {
        let sizes: Vec<usize> = signature.iter().map(FiniteSet::size).collect();
        let tuples = product_tuples(&sizes).collect();
        Relation { signature, tuples }
    }

    /// The diagonal `{(a, a, ..., a)}` on a single set, with the given arity.
    pub fn diagonal(set: &FiniteSet, arity: usize) -> Self {
        let tuples = (0..set.size()).map(|a| vec![a; arity]).collect();
        Relation {
            signature: vec![set.clone(); arity],
            tuples,
        }
    }

    pub fn arity(&self) -> usize {
        self.signature.len()
    }

    pub fn signature(&self) -> &[FiniteSet] {
        &self.signature
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    /// Inserts a tuple after bounds checking; returns whether it was new.
    pub fn insert(&mut self, t: Tuple) -> Result<bool> {
        check_tuple(&t, self.signature.iter().map(FiniteSet::size))?;
        Ok(self.tuples.insert(t))
    }

    pub(crate) fn insert_unchecked(&mut self, t: Tuple) -> bool {
        self.tuples.insert(t)
    }

    /// Relational composition of binary relations: `{(x, z) : x self y, y other z}`.
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        if self.arity() != 2 || other.arity() != 2 {
            return Err(Error::Arity {
                expected: 2,
                found: if self.arity() != 2 {
                    self.arity()
                } else {
                    other.arity()
                },
            });
        }
        if self.signature[1].size() != other.signature[0].size() {
            return Err(Error::Signature("middle sets differ in size".into()));
        }
        let mut tuples = BTreeSet::new();
        for a in &self.tuples {
            let lo = vec![a[1], 0];
            for b in other.tuples.range(lo..).take_while(|b| b[0] == a[1]) {
                tuples.insert(vec![a[0], b[1]]);
            }
        }
        Ok(Relation {
            signature: vec![self.signature[0].clone(), other.signature[1].clone()],
            tuples,
        })
    }

    /// Converse of a binary relation.
    pub fn converse(&self) -> Result<Relation> {
        if self.arity() != 2 {
            return Err(Error::Arity {
                expected: 2,
                found: self.arity(),
            });
        }
        Ok(Relation {
            signature: vec![self.signature[1].clone(), self.signature[0].clone()],
            tuples: self.tuples.iter().map(|t| vec![t[1], t[0]]).collect(),
        })
    }
}

fn check_tuple(t: &[usize], sizes: impl ExactSizeIterator<Item = usize>) -> Result<()> {
    if t.len() != sizes.len() {
        return Err(Error::Arity {
            expected: sizes.len(),
            found: t.len(),
        });
    }
    for (i, (&v, size)) in t.iter().zip(sizes).enumerate() {
        if v >= size {
            return Err(Error::Invalid(format!(
                "element {v} at position {i} out of range for size {size}"
            )));
        }
    }
    Ok(())
}

/// All tuples of a product in lexicographic order.
pub(crate) fn product_tuples(sizes: &[usize]) -> impl Iterator<Item = Tuple> + '_ {
    let total: usize = sizes.iter().product();
    let len = sizes.len();
    (0..total).map(move |mut code| {
        let mut t = vec![0; len];
        for i in (0..len).rev() {
            t[i] = code % sizes[i];
            code /= sizes[i];
        }
        t
    })
}

/// A homogeneous relation of a structure: arity plus tuples over the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSet {
    arity: usize,
    tuples: BTreeSet<Tuple>,
}

impl TupleSet {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn contains(&self, t: &[usize]) -> bool {
        self.tuples.contains(t)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

/// A finite universe with named homogeneous relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    universe: FiniteSet,
    relations: BTreeMap<String, TupleSet>,
}

impl Structure {
    pub fn new(universe: FiniteSet) -> Self {
        Structure {
            universe,
            relations: BTreeMap::new(),
        }
    }

    /// A structure with a single relation, the `Rel_k` case.
    pub fn single<I>(universe: FiniteSet, name: &str, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tuple>,
    {
        let mut s = Structure::new(universe);
        s.add_relation(name, arity, tuples)?;
        Ok(s)
    }

    /// Universe of `size` with one `arity`-ary relation holding every tuple.
    pub fn discrete(size: usize, arity: usize) -> Self {
        let sizes = vec![size; arity];
        let tuples = product_tuples(&sizes).collect();
        let mut s = Structure::new(FiniteSet::new(size));
        s.relations.insert("R".into(), TupleSet { arity, tuples });
        s
    }

    pub fn add_relation<I>(&mut self, name: &str, arity: usize, tuples: I) -> Result<()>
    where
        I: IntoIterator<Item = Tuple>,
    {
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::Invalid(format!("bad relation name {name:?}")));
        }
        if arity == 0 {
            return Err(Error::Invalid("relation arity must be at least 1".into()));
        }
        if self.relations.contains_key(name) {
            return Err(Error::Invalid(format!("duplicate relation `{name}`")));
        }
        let size = self.universe.size();
        let mut set = BTreeSet::new();
        for t in tuples {
            check_tuple(&t, std::iter::repeat_n(size, arity))?;
            set.insert(t);
        }
        self.relations
            .insert(name.to_string(), TupleSet { arity, tuples: set });
        Ok(())
    }

    pub fn universe(&self) -> &FiniteSet {
        &self.universe
    }

    pub fn size(&self) -> usize {
        self.universe.size()
    }

    pub fn relations(&self) -> &BTreeMap<String, TupleSet> {
        &self.relations
    }

    pub fn relation_set(&self, name: &str) -> Option<&TupleSet> {
        self.relations.get(name)
    }

    /// A relation of the structure as a stand-alone [`Relation`] over the universe.
    pub fn relation(&self, name: &str) -> Option<Relation> {
        self.relations.get(name).map(|r| Relation {
            signature: vec![self.universe.clone(); r.arity],
            tuples: r.tuples.clone(),
        })
    }

    /// The single relation of a `Rel_k` structure.
    pub fn sole_relation(&self) -> Result<(&str, &TupleSet)> {
        if self.relations.len() != 1 {
            return Err(Error::Invalid(format!(
                "expected exactly one relation, found {}",
                self.relations.len()
            )));
        }
        let (name, rel) = self.relations.iter().next().expect("one relation");
        Ok((name.as_str(), rel))
    }

    /// Replaces the tuples of an existing relation.
    pub fn with_tuples<I>(&self, name: &str, tuples: I) -> Result<Structure>
    where
        I: IntoIterator<Item = Tuple>,
    {
        let arity = self
            .relations
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("no relation `{name}`")))?
            .arity;
        let mut out = self.clone();
        out.relations.remove(name);
        out.add_relation(name, arity, tuples)?;
        Ok(out)
    }

    /// Same names and arities.
    pub fn same_signature(&self, other: &Structure) -> bool {
        self.relations.len() == other.relations.len()
            && self
                .relations
                .iter()
                .zip(&other.relations)
                .all(|((n1, r1), (n2, r2))| n1 == n2 && r1.arity == r2.arity)
    }

    /// Transports the structure along a permutation `perm[old] = new` of the universe.
    pub fn permute(&self, perm: &[usize]) -> Result<Structure> {
        let n = self.size();
        let distinct: BTreeSet<usize> = perm.iter().copied().collect();
        if perm.len() != n || distinct.len() != n || perm.iter().any(|&p| p >= n) {
            return Err(Error::Invalid("not a permutation of the universe".into()));
        }
        let mut universe = FiniteSet::new(n);
        if let Some(labels) = self.universe.labels() {
            let mut relabeled = vec![String::new(); n];
            for (old, &new) in perm.iter().enumerate() {
                relabeled[new] = labels[old].clone();
            }
            universe = universe.with_labels(relabeled)?;
        }
        if let Some(b) = self.universe.basepoint() {
            universe = universe.with_basepoint(perm[b])?;
        }
        let relations = self
            .relations
            .iter()
            .map(|(name, r)| {
                let tuples = r
                    .tuples
                    .iter()
                    .map(|t| t.iter().map(|&x| perm[x]).collect())
                    .collect();
                (
                    name.clone(),
                    TupleSet {
                        arity: r.arity,
                        tuples,
                    },
                )
            })
            .collect();
        Ok(Structure {
            universe,
            relations,
        })
    }
}

/// A total function between finite sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMap {
    domain: FiniteSet,
    codomain: FiniteSet,
    values: Vec<usize>,
}

impl FiniteMap {
    pub fn new(domain: FiniteSet, codomain: FiniteSet, values: Vec<usize>) -> Result<Self> {
        if values.len() != domain.size() {
            return Err(Error::Invalid(format!(
                "map has {} values for a domain of size {}",
                values.len(),
                domain.size()
            )));
        }
        if let Some(v) = values.iter().find(|&&v| v >= codomain.size()) {
            return Err(Error::Invalid(format!(
                "value {v} outside codomain of size {}",
                codomain.size()
            )));
        }
        Ok(FiniteMap {
            domain,
            codomain,
            values,
        })
    }

    pub fn identity(set: &FiniteSet) -> Self {
        FiniteMap {
            domain: set.clone(),
            codomain: set.clone(),
            values: (0..set.size()).collect(),
        }
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn apply_tuple(&self, t: &[usize]) -> Tuple {
        t.iter().map(|&x| self.values[x]).collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FiniteMap) -> Result<FiniteMap> {
        if self.codomain.size() != other.domain.size() {
            return Err(Error::Signature("maps do not compose".into()));
        }
        Ok(FiniteMap {
            domain: self.domain.clone(),
            codomain: other.codomain.clone(),
            values: self.values.iter().map(|&v| other.values[v]).collect(),
        })
    }
}

/// Checks that `f` sends every related tuple of `x` to a related tuple of `y`.
///
/// On failure the witness is the least violating `(relation name, tuple)`.
pub fn is_homomorphism(f: &FiniteMap, x: &Structure, y: &Structure) -> Result<Verdict> {
    if !x.same_signature(y) {
        return Err(Error::Signature(
            "structures differ in relation names or arities".into(),
        ));
    }
    if f.domain.size() != x.size() || f.codomain.size() != y.size() {
        return Err(Error::Signature(
            "map domain/codomain do not match the structures".into(),
        ));
    }
    for (name, rel) in &x.relations {
        let target = &y.relations[name];
        for t in &rel.tuples {
            let image = f.apply_tuple(t);
            if !target.contains(&image) {
                let w = Witness::new(WitnessKind::HomomorphismViolation)
                    .with_relation(name.clone())
                    .with_premises(vec![t.clone()])
                    .with_conclusion(image);
                return Ok(Verdict::fail(w));
            }
        }
    }
    Ok(Verdict::pass())
}

/// Encodes a tuple of base elements as an element of the power.
/// Coordinate 0 is the least significant digit.
pub fn encode_power_element(coords: &[usize], base: usize) -> usize {
    coords.iter().rev().fold(0, |acc, &c| acc * base + c)
}

/// Inverse of [`encode_power_element`].
pub fn decode_power_element(mut code: usize, base: usize, n: usize) -> Tuple {
    let mut coords = Vec::with_capacity(n);
    for _ in 0..n {
        coords.push(code % base);
        code /= base;
    }
    coords
}

/// `n`-fold power of `x` with the componentwise (largest) relations.
pub fn product_power(x: &Structure, n: usize) -> Result<Structure> {
    product_power_capped(x, n, DEFAULT_UNIVERSE_CAP)
}

pub fn product_power_capped(x: &Structure, n: usize, cap: usize) -> Result<Structure> {
    if n == 0 {
        return Err(Error::Invalid("power exponent must be at least 1".into()));
    }
    let base = x.size();
    let size = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(base))
        .filter(|&s| s <= cap)
        .ok_or(Error::UniverseCap {
            size: base.saturating_pow(n as u32),
            cap,
        })?;

    let labels: Vec<String> = (0..size)
        .map(|code| {
            let parts: Vec<String> = decode_power_element(code, base, n)
                .into_iter()
                .map(|c| x.universe.label(c))
                .collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let mut universe = FiniteSet::new(size).with_labels(labels)?;
    if let Some(b) = x.universe.basepoint() {
        universe = universe.with_basepoint(encode_power_element(&vec![b; n], base))?;
    }

    let mut relations = BTreeMap::new();
    for (name, rel) in &x.relations {
        let members: Vec<&Tuple> = rel.tuples.iter().collect();
        let mut tuples = BTreeSet::new();
        if !members.is_empty() {
            // choice[c] indexes the relation tuple used at coordinate c
            let mut choice = vec![0usize; n];
            loop {
                let t: Tuple = (0..rel.arity)
                    .map(|j| {
                        choice
                            .iter()
                            .rev()
                            .fold(0, |acc, &ci| acc * base + members[ci][j])
                    })
                    .collect();
                tuples.insert(t);
                let mut c = 0;
                while c < n {
                    choice[c] += 1;
                    if choice[c] < members.len() {
                        break;
                    }
                    choice[c] = 0;
                    c += 1;
                }
                if c == n {
                    break;
                }
            }
        }
        relations.insert(
            name.clone(),
            TupleSet {
                arity: rel.arity,
                tuples,
            },
        );
    }
    Ok(Structure {
        universe,
        relations,
    })
}

/// Induced substructure on `subset`, re-indexed in the given order.
pub fn restrict(x: &Structure, subset: &[usize]) -> Result<Structure> {
    let mut index = vec![usize::MAX; x.size()];
    for (new, &old) in subset.iter().enumerate() {
        if old >= x.size() {
            return Err(Error::Invalid(format!("element {old} not in universe")));
        }
        if index[old] != usize::MAX {
            return Err(Error::Invalid(format!("duplicate element {old} in subset")));
        }
        index[old] = new;
    }
    let mut universe = FiniteSet::new(subset.len());
    if let Some(labels) = x.universe.labels() {
        universe = universe.with_labels(subset.iter().map(|&e| labels[e].clone()).collect())?;
    }
    if let Some(b) = x.universe.basepoint() {
        if index[b] != usize::MAX {
            universe = universe.with_basepoint(index[b])?;
        }
    }
    let relations = x
        .relations
        .iter()
        .map(|(name, rel)| {
            let tuples = rel
                .tuples
                .iter()
                .filter(|t| t.iter().all(|&e| index[e] != usize::MAX))
                .map(|t| t.iter().map(|&e| index[e]).collect())
                .collect();
            (
                name.clone(),
                TupleSet {
                    arity: rel.arity,
                    tuples,
                },
            )
        })
        .collect();
    Ok(Structure {
        universe,
        relations,
    })
}

/// Inclusion of a restriction back into its parent.
pub fn inclusion_map(sub: &Structure, parent: &Structure, subset: &[usize]) -> Result<FiniteMap> {
    FiniteMap::new(
        sub.universe.clone(),
        parent.universe.clone(),
        subset.to_vec(),
    )
}

/// Whether a map reflects relations: a tuple is related in the domain
/// exactly when its image is related in the codomain.
pub fn is_relation_reflecting(f: &FiniteMap, x: &Structure, y: &Structure) -> Result<bool> {
    if !is_homomorphism(f, x, y)?.holds {
        return Ok(false);
    }
    for (name, rel) in &x.relations {
        let target = &y.relations[name];
        let sizes = vec![x.size(); rel.arity];
        for t in product_tuples(&sizes) {
            if !rel.contains(&t) && target.contains(&f.apply_tuple(&t)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
