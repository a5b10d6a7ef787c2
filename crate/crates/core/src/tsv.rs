//! Minimal tab-separated line reader shared by the input parsers.

use std::io::BufRead;

use crate::error::{Error, Result};

pub(crate) struct Line<'a> {
    pub number: usize,
    pub fields: Vec<&'a str>,
}

/// Reads every line of `reader`, calling `f` with the 1-based line number and
/// the raw text (trailing `\r` removed). Comment and blank lines are passed
/// through so callers can interpret directives.
pub(crate) fn for_each_line<R, F>(reader: R, source_name: &str, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(usize, &str) -> Result<()>,
{
    for (idx, line) in reader.lines().enumerate() {
        let number = idx + 1;
        let line = line.map_err(|e| Error::parse(source_name, number, e.to_string()))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        f(number, line)?;
    }
    Ok(())
}

pub(crate) fn is_skippable(text: &str) -> bool {
    let trimmed = text.trim();
    trimmed.is_empty() || trimmed.starts_with('#')
}

pub(crate) fn split<'a>(number: usize, text: &'a str) -> Line<'a> {
    Line {
        number,
        fields: text.split('\t').map(str::trim).collect(),
    }
}

impl Line<'_> {
    pub fn expect_columns(&self, source_name: &str, n: usize) -> Result<()> {
        if self.fields.len() != n {
            return Err(Error::parse(
                source_name,
                self.number,
                format!("expected {n} tab-separated columns, found {}", self.fields.len()),
            ));
        }
        if let Some(pos) = self.fields.iter().position(|f| f.is_empty()) {
            return Err(Error::parse(
                source_name,
                self.number,
                format!("column {} is empty", pos + 1),
            ));
        }
        Ok(())
    }

    pub fn integer(&self, source_name: &str, col: usize, what: &str) -> Result<u64> {
        self.fields[col].parse::<u64>().map_err(|_| {
            Error::parse(
                source_name,
                self.number,
                format!("{what} {:?} is not a non-negative integer", self.fields[col]),
            )
        })
    }
}
