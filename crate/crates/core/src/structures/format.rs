//! Canonical text format for structures, plus its JSON mirror.
//!
//! ```text
//! universe 2
//! labels a b
//! basepoint 0
//! rel R 3
//! 0 0 0
//! 1 1 0
//! end
//! ```

use super::{FiniteSet, Structure, Tuple};
use crate::error::{Error, Result};
use crate::text::Lines;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub fn parse_structure(input: &str) -> Result<Structure> {
    let mut lines = Lines::new(input);
    let universe = parse_universe_header(&mut lines)?;
    let mut s = Structure::new(universe);
    while let Some(line) = lines.next_line() {
        line.expect_keyword("rel")?;
        line.expect_len(3)?;
        let name = line.tokens[1].1;
        let arity = line.number(2)?;
        if arity == 0 {
            return Err(line.error_at(2, "relation arity must be at least 1"));
        }
        if s.relations().contains_key(name) {
            return Err(line.error_at(1, format!("duplicate relation `{name}`")));
        }
        let mut tuples: Vec<Tuple> = Vec::new();
        loop {
            let row = lines.next_line().ok_or_else(|| {
                Error::parse(
                    lines.last_line() + 1,
                    1,
                    format!("relation `{name}` missing `end`"),
                )
            })?;
            if row.tokens[0].1 == "end" {
                row.expect_len(1)?;
                break;
            }
            row.expect_len(arity)?;
            let mut t = Vec::with_capacity(arity);
            for i in 0..arity {
                let v = row.number(i)?;
                if v >= s.size() {
                    return Err(row.error_at(
                        i,
                        format!("element {v} out of range for universe {}", s.size()),
                    ));
                }
                t.push(v);
            }
            tuples.push(t);
        }
        s.add_relation(name, arity, tuples)
            .map_err(|e| line.error_at(0, e.to_string()))?;
    }
    Ok(s)
}

/// Parses `universe`, and the optional `labels` and `basepoint` lines.
pub(crate) fn parse_universe_header(lines: &mut Lines<'_>) -> Result<FiniteSet> {
    let first = lines
        .next_line()
        .ok_or_else(|| Error::parse(1, 1, "empty input, expected `universe <n>`"))?;
    first.expect_keyword("universe")?;
    first.expect_len(2)?;
    let mut set = FiniteSet::new(first.number(1)?);
    while let Some(line) = lines.peek_line() {
        match line.tokens[0].1 {
            "labels" => {
                lines.next_line();
                line.expect_len(set.size() + 1)?;
                let labels = line.tokens[1..]
                    .iter()
                    .map(|(_, t)| t.to_string())
                    .collect();
                set = set
                    .with_labels(labels)
                    .map_err(|e| line.error_at(1, e.to_string()))?;
            }
            "basepoint" => {
                lines.next_line();
                line.expect_len(2)?;
                let b = line.number(1)?;
                set = set
                    .with_basepoint(b)
                    .map_err(|e| line.error_at(1, e.to_string()))?;
            }
            _ => break,
        }
    }
    Ok(set)
}

pub(crate) fn write_universe_header(out: &mut String, set: &FiniteSet) {
    let _ = writeln!(out, "universe {}", set.size());
    if let Some(labels) = set.labels() {
        let _ = writeln!(out, "labels {}", labels.join(" "));
    }
    if let Some(b) = set.basepoint() {
        let _ = writeln!(out, "basepoint {b}");
    }
}

impl Structure {
    /// Canonical text form; tuples in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_universe_header(&mut out, self.universe());
        for (name, rel) in self.relations() {
            let _ = writeln!(out, "rel {name} {}", rel.arity());
            for t in rel.tuples() {
                let parts: Vec<String> = t.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", parts.join(" "));
            }
            out.push_str("end\n");
        }
        out
    }

    pub fn to_json(&self) -> StructureJson {
        StructureJson {
            universe: self.size(),
            labels: self.universe().labels().map(|l| l.to_vec()),
            basepoint: self.universe().basepoint(),
            relations: self
                .relations()
                .iter()
                .map(|(name, r)| {
                    (
                        name.clone(),
                        RelationJson {
                            arity: r.arity(),
                            tuples: r.tuples().iter().cloned().collect(),
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationJson {
    pub arity: usize,
    pub tuples: Vec<Tuple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub universe: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basepoint: Option<usize>,
    pub relations: BTreeMap<String, RelationJson>,
}

impl StructureJson {
    pub fn into_structure(self) -> Result<Structure> {
        let mut set = FiniteSet::new(self.universe);
        if let Some(labels) = self.labels {
            set = set.with_labels(labels)?;
        }
        if let Some(b) = self.basepoint {
            set = set.with_basepoint(b)?;
        }
        let mut s = Structure::new(set);
        for (name, rel) in self.relations {
            s.add_relation(&name, rel.arity, rel.tuples)?;
        }
        Ok(s)
    }
}

pub fn parse_structure_json(input: &str) -> Result<Structure> {
    let json: StructureJson = serde_json::from_str(input).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    json.into_structure()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# the counterexample\nuniverse 2\nrel R 3\n1 1 0\n0 1 1\n0 0 0\nend\n";

    #[test]
    fn parses_and_canonicalizes() {
        let s = parse_structure(SAMPLE).unwrap();
        assert_eq!(
            s.to_text(),
            "universe 2\nrel R 3\n0 0 0\n0 1 1\n1 1 0\nend\n"
        );
    }

    #[test]
    fn labels_and_basepoint() {
        let s =
            parse_structure("universe 2\nlabels a b\nbasepoint 1\nrel E 2\n0 1\nend\n").unwrap();
        assert_eq!(s.universe().label(1), "b");
        assert_eq!(s.universe().basepoint(), Some(1));
        assert_eq!(parse_structure(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn json_mirror_matches_text() {
        let s = parse_structure(SAMPLE).unwrap();
        let json = serde_json::to_string(&s.to_json()).unwrap();
        assert_eq!(parse_structure_json(&json).unwrap(), s);
        let hand =
            r#"{"universe":2,"relations":{"R":{"arity":3,"tuples":[[1,1,0],[0,1,1],[0,0,0]]}}}"#;
        assert_eq!(parse_structure_json(hand).unwrap(), s);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_structure("universe 2\nrel R 2\n0 5\nend\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 3,
                message: "element 5 out of range for universe 2".into()
            }
        );
        assert!(matches!(
            parse_structure("universe 2\nrel R 2\n0 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_structure("rel R 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_structure("universe 2\nrel R 2\n0 1 1\nend\n"),
            Err(Error::Parse { line: 3, .. })
        ));
    }
}
