//! `minlab-field v1 <n>` text format: a header followed by one value per
//! line in mesh vertex order. Absent values are written as `NaN`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::ScalarField;
use crate::error::{Error, Result};

pub const FIELD_MAGIC: &str = "minlab-field";

pub fn write_field<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    let mut buf = String::with_capacity(24 * field.len() + 32);
    writeln!(buf, "{FIELD_MAGIC} v1 {}", field.len()).unwrap();
    for x in field.values() {
        writeln!(buf, "{x}").unwrap();
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

/// Reads a field, checking the declared length against `expected` when given.
pub fn read_field<R: BufRead>(input: R, expected: Option<usize>) -> Result<ScalarField> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(Error::Parse { line: 1, message: "empty file".into() })??;
    let mut tok = header.split_whitespace();
    if tok.next() != Some(FIELD_MAGIC) || tok.next() != Some("v1") {
        return Err(Error::Parse { line: 1, message: format!("not a {FIELD_MAGIC} v1 header") });
    }
    let n: usize = tok
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(Error::Parse { line: 1, message: "bad value count".into() })?;
    if let Some(m) = expected {
        if m != n {
            return Err(Error::Argument(format!("field has {n} values but the mesh has {m} vertices")));
        }
    }
    let mut values = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let x: f64 = t.parse().map_err(|_| Error::Parse { line: i + 2, message: format!("bad value `{t}`") })?;
        values.push(x);
    }
    if values.len() != n {
        return Err(Error::Parse {
            line: values.len() + 2,
            message: format!("expected {n} values, found {}", values.len()),
        });
    }
    Ok(ScalarField::new(values))
}
