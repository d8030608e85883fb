//! Text and JSON formats for finite algebras.
//!
//! ```text
//! universe 2
//! op meet 2
//! 0 0
//! 0 1
//! ```
//!
//! Values follow the argument tuples in lexicographic order and may be
//! spread over any number of lines.

use super::{FiniteAlgebra, OperationTable};
use crate::error::{Error, Result};
use crate::structures::format::{parse_universe_header, write_universe_header};
use crate::structures::FiniteSet;
use crate::text::Lines;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub fn parse_algebra(input: &str) -> Result<FiniteAlgebra> {
    let mut lines = Lines::new(input);
    let universe = parse_universe_header(&mut lines)?;
    let n = universe.size();
    let mut a = FiniteAlgebra::new(universe);
    while let Some(line) = lines.next_line() {
        line.expect_keyword("op")?;
        line.expect_len(3)?;
        let name = line.tokens[1].1;
        let arity = line.number(2)?;
        let expected = n
            .checked_pow(arity as u32)
            .filter(|&e| e <= 1 << 24)
            .ok_or_else(|| line.error_at(2, "operation table too large"))?;
        let mut values = Vec::with_capacity(expected);
        while values.len() < expected {
            let next = lines.peek_line();
            let row = next
                .clone()
                .filter(|l| l.tokens[0].1 != "op")
                .ok_or_else(|| {
                    let at = next.map_or(lines.last_line() + 1, |l| l.number);
                    Error::parse(
                        at,
                        1,
                        format!(
                            "operation `{name}` needs {expected} values, found {}",
                            values.len()
                        ),
                    )
                })?;
            lines.next_line();
            for i in 0..row.tokens.len() {
                if values.len() == expected {
                    return Err(row.error_at(
                        i,
                        format!("operation `{name}` has more than {expected} values"),
                    ));
                }
                let v = row.number(i)?;
                if v >= n {
                    return Err(row.error_at(i, format!("value {v} out of range for universe {n}")));
                }
                values.push(v);
            }
        }
        let table = OperationTable::new(arity, n, values)?;
        a.add_operation(name, table)
            .map_err(|e| line.error_at(1, e.to_string()))?;
    }
    Ok(a)
}

fn write_table(out: &mut String, name: &str, t: &OperationTable) {
    let _ = writeln!(out, "op {name} {}", t.arity());
    let width = if t.arity() == 0 { 1 } else { t.size().max(1) };
    for chunk in t.values().chunks(width) {
        let parts: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", parts.join(" "));
    }
}

impl FiniteAlgebra {
    /// Canonical text form: one line per fixing of all but the last argument.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_universe_header(&mut out, self.universe());
        for (name, t) in self.operations() {
            write_table(&mut out, name, t);
        }
        out
    }

    pub fn to_json(&self) -> AlgebraJson {
        AlgebraJson {
            universe: self.size(),
            labels: self.universe().labels().map(|l| l.to_vec()),
            basepoint: self.universe().basepoint(),
            operations: self
                .operations()
                .iter()
                .map(|(name, t)| (name.clone(), OperationJson::from(t)))
                .collect(),
        }
    }
}

impl OperationTable {
    /// A one-operation algebra file holding this table under `name`.
    pub fn to_text(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "universe {}", self.size());
        write_table(&mut out, name, self);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationJson {
    pub arity: usize,
    pub values: Vec<usize>,
}

impl From<&OperationTable> for OperationJson {
    fn from(t: &OperationTable) -> Self {
        OperationJson {
            arity: t.arity(),
            values: t.values().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub universe: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub basepoint: Option<usize>,
    pub operations: BTreeMap<String, OperationJson>,
}

impl AlgebraJson {
    pub fn into_algebra(self) -> Result<FiniteAlgebra> {
        let mut set = FiniteSet::new(self.universe);
        if let Some(labels) = self.labels {
            set = set.with_labels(labels)?;
        }
        if let Some(b) = self.basepoint {
            set = set.with_basepoint(b)?;
        }
        let mut a = FiniteAlgebra::new(set);
        for (name, op) in self.operations {
            a.add_operation(
                &name,
                OperationTable::new(op.arity, self.universe, op.values)?,
            )?;
        }
        Ok(a)
    }
}

pub fn parse_algebra_json(input: &str) -> Result<FiniteAlgebra> {
    let json: AlgebraJson = serde_json::from_str(input).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    json.into_algebra()
}
