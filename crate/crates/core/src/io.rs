//! Series ingestion.
//!
//! Accepted layouts:
//! * whitespace-separated numbers (one per line, or several per line); with
//!   no column selector every number is read in order,
//! * comma, semicolon or tab delimited tables with an optional header row.
//!
//! Blank lines and lines starting with `#` are skipped.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnSelector {
    Name(String),
    /// Zero-based column position.
    Index(usize),
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    /// All-digit strings select by position, anything else by header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

pub fn load_series(path: &Path, column: Option<&ColumnSelector>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_series(&text, column).map_err(|(line, message)| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

type ParseResult<T> = std::result::Result<T, (usize, String)>;

/// Parses series text; errors carry a 1-based line number.
pub fn parse_series(text: &str, column: Option<&ColumnSelector>) -> ParseResult<Vec<f64>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let Some(&(_, first)) = lines.first() else {
        return Err((0, "no values in input".into()));
    };
    let delimiter = [',', ';', '\t'].into_iter().find(|d| first.contains(*d));
    let split = |line: &str| -> Vec<String> {
        match delimiter {
            Some(d) => line.split(d).map(|f| f.trim().trim_matches('"').to_string()).collect(),
            None => line.split_whitespace().map(str::to_string).collect(),
        }
    };

    let header_fields = split(first);
    let has_header = header_fields.iter().any(|f| f.parse::<f64>().is_err());
    let body = if has_header { &lines[1..] } else { &lines[..] };

    let index = match column {
        None => None,
        Some(ColumnSelector::Index(i)) => Some(*i),
        Some(ColumnSelector::Name(name)) => {
            if !has_header {
                return Err((lines[0].0, format!("column '{name}' requested but the input has no header")));
            }
            Some(
                header_fields
                    .iter()
                    .position(|f| f == name)
                    .ok_or_else(|| (lines[0].0, format!("no column named '{name}'")))?,
            )
        }
    };
    if index.is_none() && delimiter.is_some() && header_fields.len() > 1 {
        return Err((lines[0].0, format!("{} columns found; select one", header_fields.len())));
    }

    let mut values = Vec::new();
    for &(lineno, line) in body {
        let fields = split(line);
        let picked: Vec<&String> = match index {
            Some(i) => vec![fields
                .get(i)
                .ok_or_else(|| (lineno, format!("line has {} fields, column {i} missing", fields.len())))?],
            None => fields.iter().collect(),
        };
        for field in picked {
            let v: f64 = field
                .parse()
                .map_err(|_| (lineno, format!("cannot parse '{field}' as a number")))?;
            if !v.is_finite() {
                return Err((lineno, format!("non-finite value '{field}'")));
            }
            values.push(v);
        }
    }
    if values.is_empty() {
        return Err((lines[0].0, "no values in input".into()));
    }
    Ok(values)
}

/// Writes one value per line with round-trip precision.
pub fn write_series(path: &Path, values: &[f64]) -> Result<()> {
    let mut text = String::with_capacity(values.len() * 20);
    for v in values {
        text.push_str(&format!("{v:?}\n"));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column() {
        assert_eq!(parse_series("1\n2\n3\n", None).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn whitespace_stream_and_comments() {
        let text = "# sensor a\n1 2.5\n\n  -3e1 4\n";
        assert_eq!(parse_series(text, None).unwrap(), vec![1.0, 2.5, -30.0, 4.0]);
        assert_eq!(parse_series(text, Some(&ColumnSelector::Index(1))).unwrap(), vec![2.5, 4.0]);
    }

    #[test]
    fn delimited_with_header() {
        let text = "time,ecg,resp\n0,0.1,5\n1,0.2,6\n2,0.3,7\n";
        let by_name = parse_series(text, Some(&"ecg".parse().unwrap())).unwrap();
        assert_eq!(by_name, vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_series(text, Some(&"2".parse().unwrap())).unwrap(), vec![5.0, 6.0, 7.0]);
        assert!(parse_series(text, None).is_err());
        assert!(parse_series(text, Some(&"missing".parse().unwrap())).is_err());
    }

    #[test]
    fn nan_names_its_line() {
        let err = parse_series("1\n2\nNaN\n4\n", None).unwrap_err();
        assert_eq!(err.0, 3);
        let err = parse_series("1\ninf\n", None).unwrap_err();
        assert_eq!(err.0, 2);
    }

    #[test]
    fn unparseable_and_empty() {
        assert_eq!(parse_series("1\n2\nabc\n", None).unwrap_err().0, 3);
        assert!(parse_series("", None).is_err());
        assert!(parse_series("# only a comment\n", None).is_err());
        assert!(parse_series("value\n", None).is_err());
    }

    #[test]
    fn short_row_in_table() {
        let err = parse_series("a;b\n1;2\n3\n", Some(&ColumnSelector::Index(1))).unwrap_err();
        assert_eq!(err.0, 3);
    }
}
