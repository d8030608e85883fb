//! `matrix <m> <w+1>` followed by `m` rows of the form `a1 a2 ... | c`.

use super::ExtendedMatrix;
use crate::error::{Error, Result};
use crate::text::Lines;
use std::fmt::Write as _;

pub fn parse_matrix(input: &str) -> Result<ExtendedMatrix> {
    let mut lines = Lines::new(input);
    let header = lines
        .next_line()
        .ok_or_else(|| Error::parse(1, 1, "empty input, expected `matrix <m> <w+1>`"))?;
    header.expect_keyword("matrix")?;
    header.expect_len(3)?;
    let m = header.number(1)?;
    let width = header.number(2)?;
    if m == 0 {
        return Err(header.error_at(1, "matrix needs at least one row"));
    }
    if width < 2 {
        return Err(header.error_at(2, "matrix width must be at least 2"));
    }
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next_line().ok_or_else(|| {
            Error::parse(
                lines.last_line() + 1,
                1,
                format!("expected {m} matrix rows"),
            )
        })?;
        // w symbols, the bar, the conclusion
        line.expect_len(width + 1)?;
        if line.tokens[width - 1].1 != "|" {
            return Err(line.error_at(width - 1, "expected `|` before the conclusion"));
        }
        let row: Vec<&str> = line
            .tokens
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != width - 1)
            .map(|(_, (_, t))| *t)
            .collect();
        if let Some(i) = row.iter().position(|&t| t == "|") {
            let at = if i < width - 1 { i } else { i + 1 };
            return Err(line.error_at(at, "unexpected `|`"));
        }
        rows.push(row);
    }
    if let Some(extra) = lines.next_line() {
        return Err(extra.error_at(0, "trailing input after matrix rows"));
    }
    ExtendedMatrix::from_symbols(&rows).map_err(|e| Error::parse(header.number, 1, e.to_string()))
}

impl ExtendedMatrix {
    pub fn to_text(&self) -> String {
        let width = self.premise_width() + 1;
        let mut out = format!("matrix {} {}\n", self.row_count(), width);
        for (i, row) in self.rows().iter().enumerate() {
            let syms: Vec<&str> = row.iter().map(|&e| self.symbol(i, e)).collect();
            let _ = writeln!(out, "{} | {}", syms[..width - 1].join(" "), syms[width - 1]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{builtin_matrix, BUILTIN_MATRICES};

    #[test]
    fn builtins_round_trip_through_text() {
        for name in BUILTIN_MATRICES {
            let m = builtin_matrix(name).unwrap();
            assert_eq!(parse_matrix(&m.to_text()).unwrap(), m, "{name}");
        }
    }

    #[test]
    fn parses_maltsev_text() {
        let m = parse_matrix("matrix 2 4\nx1 x1 x2 | x2\ny2 y1 y1 | y2\n").unwrap();
        assert_eq!(m, builtin_matrix("maltsev").unwrap());
    }

    #[test]
    fn reports_positions() {
        assert!(matches!(
            parse_matrix("matrix 2 4\nx1 x1 x2 x2\ny2 y1 y1 | y2\n"),
            Err(Error::Parse {
                line: 2,
                column: 10,
                ..
            })
        ));
        assert!(matches!(
            parse_matrix("matrix 2 4\nx1 x1 x2 | x2\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_matrix("matrx 1 2\n"),
            Err(Error::Parse {
                line: 1,
                column: 1,
                ..
            })
        ));
    }
}
