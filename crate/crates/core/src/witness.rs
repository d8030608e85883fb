//! Auditable evidence attached to every boolean verdict.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    ClosureViolation,
    HomomorphismViolation,
    IdentityViolation,
    SearchCertificate,
}

/// A concrete assignment demonstrating a failure (or a success, for search
/// certificates).
///
/// `premises` holds the tuples that were present, `conclusion` the tuple that
/// was required but absent (or produced). For homomorphism violations on
/// pattern domains the premises are the domain points, each a coordinate
/// tuple of the cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub relation: Option<String>,
    pub assignment: BTreeMap<String, usize>,
    pub premises: Vec<Vec<usize>>,
    pub conclusion: Vec<usize>,
}

impl Witness {
    pub fn new(kind: WitnessKind) -> Self {
        Witness {
            kind,
            relation: None,
            assignment: BTreeMap::new(),
            premises: Vec::new(),
            conclusion: Vec::new(),
        }
    }

    pub fn with_relation(mut self, name: impl Into<String>) -> Self {
        self.relation = Some(name.into());
        self
    }

    pub fn with_premises(mut self, premises: Vec<Vec<usize>>) -> Self {
        self.premises = premises;
        self
    }

    pub fn with_conclusion(mut self, conclusion: Vec<usize>) -> Self {
        self.conclusion = conclusion;
        self
    }

    pub fn assign(mut self, slot: impl Into<String>, value: usize) -> Self {
        self.assignment.insert(slot.into(), value);
        self
    }
}

pub(crate) fn fmt_tuple(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            WitnessKind::ClosureViolation => "closure-violation",
            WitnessKind::HomomorphismViolation => "homomorphism-violation",
            WitnessKind::IdentityViolation => "identity-violation",
            WitnessKind::SearchCertificate => "search-certificate",
        };
        write!(f, "{kind}")?;
        if let Some(rel) = &self.relation {
            write!(f, " [{rel}]")?;
        }
        if !self.assignment.is_empty() {
            let parts: Vec<String> = self
                .assignment
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            write!(f, " {{{}}}", parts.join(", "))?;
        }
        if !self.premises.is_empty() {
            let parts: Vec<String> = self.premises.iter().map(|t| fmt_tuple(t)).collect();
            write!(f, " premises ({})", parts.join(", "))?;
        }
        write!(f, " conclusion {}", fmt_tuple(&self.conclusion))
    }
}

/// A boolean verdict with a witness present exactly when the property fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
        }
    }

    pub fn from_violation(violation: Option<Witness>) -> Self {
        match violation {
            None => Verdict::pass(),
            Some(w) => Verdict::fail(w),
        }
    }
}
