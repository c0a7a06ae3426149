//! The `.pts` text format.
//!
//! ```text
//! # optional comments
//! 2 3
//! 0 0 0
//! 1 4 0
//! 2 1/2 7/3
//! ```
//!
//! The header is `d n`, followed by `n` lines `label c_1 ... c_d`. Each
//! coordinate is an integer or `p/q`. Lines starting with `#` are comments.
//! A file may hold several records separated by blank lines.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::Zero;

use super::{Point, PointSet, Rational};
use crate::error::{Error, Result};

/// A record that failed to parse, with the line its chunk starts on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub first_line: usize,
    pub error: Error,
}

fn parse_rational(tok: &str, line: usize) -> Result<Rational> {
    let bad = |msg: &str| Error::Parse {
        line,
        msg: format!("bad coordinate {tok:?}: {msg}"),
    };
    let ok_chars = tok
        .chars()
        .enumerate()
        .all(|(i, c)| c.is_ascii_digit() || c == '/' || (c == '-' && (i == 0 || tok[..i].ends_with('/'))));
    if !ok_chars || tok.is_empty() {
        return Err(bad("expected an integer or p/q"));
    }
    if let Some((_, den)) = tok.split_once('/') {
        if den.trim_start_matches('-').chars().all(|c| c == '0') {
            return Err(bad("zero denominator"));
        }
    }
    Rational::from_str(tok).map_err(|e| bad(&e.to_string()))
}

fn parse_usize(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} {tok:?}"),
    })
}

/// Parses one record from `(line_number, text)` pairs with comments and
/// blanks already removed.
fn parse_chunk(lines: &[(usize, &str)]) -> Result<PointSet> {
    let (hline, header) = lines[0];
    let mut toks = header.split_whitespace();
    let d = parse_usize(toks.next(), hline, "dimension")?;
    let n = parse_usize(toks.next(), hline, "point count")?;
    if toks.next().is_some() {
        return Err(Error::Parse {
            line: hline,
            msg: "header must be `d n`".into(),
        });
    }
    if d == 0 {
        return Err(Error::Parse {
            line: hline,
            msg: "dimension must be positive".into(),
        });
    }
    let body = &lines[1..];
    if body.len() != n {
        let line = body.last().map_or(hline, |l| l.0);
        return Err(Error::Parse {
            line,
            msg: format!("header announces {n} points, found {}", body.len()),
        });
    }
    let mut entries = Vec::with_capacity(n);
    for &(line, text) in body {
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != d + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected label and {d} coordinates, found {} fields", toks.len()),
            });
        }
        let label: u32 = toks[0].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad label {:?}", toks[0]),
        })?;
        let coords = toks[1..]
            .iter()
            .map(|t| parse_rational(t, line))
            .collect::<Result<Vec<_>>>()?;
        entries.push((label, Point::new(coords), line));
    }
    let mut seen = std::collections::HashMap::new();
    for (label, _, line) in &entries {
        if seen.insert(*label, *line).is_some() {
            return Err(Error::Parse {
                line: *line,
                msg: format!("repeated label {label}"),
            });
        }
    }
    let lines_by_label = seen;
    PointSet::new(d, entries.into_iter().map(|(l, p, _)| (l, p)).collect()).map_err(|e| match e {
        Error::DuplicatePoint(_, b) => Error::Parse {
            line: lines_by_label[&b],
            msg: e.to_string(),
        },
        other => other,
    })
}

fn chunks(text: &str) -> Vec<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            continue;
        }
        cur.push((i + 1, line));
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Parses every record, keeping failures alongside successes.
pub fn parse_records(text: &str) -> Vec<std::result::Result<PointSet, RecordError>> {
    parse_records_located(text)
        .into_iter()
        .map(|(first_line, r)| r.map_err(|error| RecordError { first_line, error }))
        .collect()
}

/// Like [`parse_records`], pairing every record with its first line.
pub fn parse_records_located(text: &str) -> Vec<(usize, Result<PointSet>)> {
    chunks(text)
        .into_iter()
        .map(|c| (c[0].0, parse_chunk(&c)))
        .collect()
}

/// Parses a single-record file. Blank lines inside the record are tolerated.
pub fn parse(text: &str) -> Result<PointSet> {
    let lines: Vec<(usize, &str)> = chunks(text).into_iter().flatten().collect();
    if lines.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "empty input".into(),
        });
    }
    parse_chunk(&lines)
}

pub fn write(s: &PointSet) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", s.dim(), s.len()).unwrap();
    for (label, p) in s.iter() {
        write!(out, "{label}").unwrap();
        for c in p.coords() {
            debug_assert!(!c.denom().is_zero());
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_records(sets: &[PointSet]) -> String {
    sets.iter().map(write).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{int, rat};

    #[test]
    fn parses_rationals_and_comments() {
        let s = parse("# tri\n2 3\n0 0 0\n1 4 0\n# mid\n2 1/2 -7/3\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.point(2).unwrap().coords(), &[rat(1, 2), rat(-7, 3)]);
    }

    #[test]
    fn writer_emits_reduced_rationals() {
        let s = parse("2 1\n5 6/4 -10/5\n").unwrap();
        assert_eq!(write(&s), "2 1\n5 3/2 -2\n");
        assert_eq!(parse(&write(&s)).unwrap(), s);
        assert_eq!(s.point(5).unwrap().coord(1), &int(-2));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("2 2\n0 0 0\n1 x 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = parse("2 3\n0 0 0\n1 1 0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = parse("2 2\n0 0 0\n0 1 0\n").unwrap_err();
        match e {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("repeated label 0"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("2 1\n0 1/0 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn multi_record() {
        let text = "2 1\n0 0 0\n\n# second\n2 2\n0 0 0\n1 1\n\n2 1\n7 3 3\n";
        let recs = parse_records(text);
        assert_eq!(recs.len(), 3);
        assert!(recs[0].is_ok());
        assert_eq!(recs[1].as_ref().unwrap_err().first_line, 5);
        assert_eq!(recs[2].as_ref().unwrap().labels(), &[7]);
    }
}
