//! Line/token reader shared by the text formats. `#` starts a comment;
//! blank lines are skipped. Positions are 1-based.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Line<'a> {
    pub number: usize,
    /// (column, token)
    pub tokens: Vec<(usize, &'a str)>,
}

impl<'a> Line<'a> {
    pub fn error_at(&self, token: usize, message: impl Into<String>) -> Error {
        let column = self.tokens.get(token).map_or(1, |t| t.0);
        Error::parse(self.number, column, message)
    }

    pub fn expect_keyword(&self, keyword: &str) -> Result<()> {
        if self.tokens[0].1 != keyword {
            return Err(self.error_at(
                0,
                format!("expected `{keyword}`, found `{}`", self.tokens[0].1),
            ));
        }
        Ok(())
    }

    pub fn expect_len(&self, n: usize) -> Result<()> {
        if self.tokens.len() != n {
            let at = n.min(self.tokens.len().saturating_sub(1));
            return Err(self.error_at(
                at,
                format!("expected {n} tokens, found {}", self.tokens.len()),
            ));
        }
        Ok(())
    }

    pub fn number(&self, token: usize) -> Result<usize> {
        let (_, text) = self.tokens[token];
        text.parse().map_err(|_| {
            self.error_at(
                token,
                format!("expected a non-negative integer, found `{text}`"),
            )
        })
    }
}

pub(crate) struct Lines<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

impl<'a> Lines<'a> {
    pub fn new(input: &'a str) -> Self {
        let lines = input
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let content = raw.split('#').next().unwrap_or("");
                let tokens: Vec<(usize, &str)> = tokenize(content);
                (!tokens.is_empty()).then_some(Line {
                    number: i + 1,
                    tokens,
                })
            })
            .collect();
        Lines { lines, pos: 0 }
    }

    pub fn next_line(&mut self) -> Option<Line<'a>> {
        let line = self.lines.get(self.pos).cloned();
        if line.is_some() {
            self.pos += 1;
        }
        line
    }

    pub fn peek_line(&self) -> Option<Line<'a>> {
        self.lines.get(self.pos).cloned()
    }

    pub fn last_line(&self) -> usize {
        self.lines.last().map_or(0, |l| l.number)
    }
}

fn tokenize(content: &str) -> Vec<(usize, &str)> {
    let mut tokens = Vec::new();
    let mut start = None;
    let mut col = 0;
    for (byte, ch) in content.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                tokens.push((c, &content[b..byte]));
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        tokens.push((c, &content[b..]));
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_with_columns() {
        assert_eq!(tokenize("  ab c\td"), vec![(3, "ab"), (6, "c"), (8, "d")]);
    }

    #[test]
    fn skips_comments_and_blanks() {
        let mut l = Lines::new("# x\n\nfoo 1 # bar\n");
        let line = l.next_line().unwrap();
        assert_eq!(line.number, 3);
        assert_eq!(line.tokens.len(), 2);
        assert!(l.next_line().is_none());
    }
}
