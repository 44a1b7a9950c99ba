//! CSV emission and the matching reader.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

/// Significant digits written for every number.
pub const SIG_DIGITS: usize = 15;

/// Formats `x` rounded to 15 significant digits, with no trailing zeros.
/// Plain decimal notation is used for moderate magnitudes and exponent
/// notation otherwise.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap();
    let mag = rounded.abs();
    if (1e-4..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// Inverse of [`format_number`]; an empty field reads as `None`.
pub fn parse_number(field: &str) -> Result<Option<f64>, std::num::ParseFloatError> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some)
}

/// A parsed CSV table with string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Numeric cell; `None` when empty.
    pub fn number(&self, row: usize, name: &str) -> Option<f64> {
        let c = self.column(name)?;
        parse_number(&self.rows[row][c]).ok().flatten()
    }

    pub fn text(&self, row: usize, name: &str) -> Option<&str> {
        let c = self.column(name)?;
        Some(self.rows[row][c].as_str())
    }
}

pub fn read_table<R: io::Read>(reader: R) -> csv::Result<Table> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<csv::Result<_>>()?;
    Ok(Table { headers, rows })
}

pub fn read_table_from_path(path: &Path) -> csv::Result<Table> {
    read_table(File::open(path)?)
}

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Writes `headers` and `rows` as CSV to `out`, or to stdout when `out` is `None`.
pub fn write_table(out: Option<&Path>, headers: &[&str], rows: &[Vec<Cell>]) -> io::Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(headers)?;
    for row in rows {
        w.write_record(row.iter().map(Cell::render))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(439.0), "439");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(-2.5e-9), "-2.5e-9");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(parse_number("inf").unwrap(), Some(f64::INFINITY));
        assert_eq!(parse_number("").unwrap(), None);
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless_at_15_digits(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let s = format_number(x);
            let back = parse_number(&s).unwrap().unwrap();
            prop_assert_eq!(format_number(back), s.clone());
            let digits: String = s.split(['e', 'E']).next().unwrap().chars().filter(char::is_ascii_digit).collect();
            prop_assert!(digits.trim_start_matches('0').len() <= SIG_DIGITS, "{}", s);
            if x != 0.0 && x.is_normal() {
                prop_assert!(((back - x) / x).abs() <= 5.1e-15);
            }
        }

        #[test]
        fn table_round_trip(values in proptest::collection::vec(-1e12f64..1e12, 1..20)) {
            let path = std::env::temp_dir().join(format!("leocov-rt-{}.csv", std::process::id()));
            let rows: Vec<Vec<Cell>> = values.iter().map(|&v| vec![Cell::Num(v), Cell::Text("x, y".into()), Cell::Empty]).collect();
            write_table(Some(&path), &["v", "label", "gap"], &rows).unwrap();
            let t = read_table_from_path(&path).unwrap();
            std::fs::remove_file(&path).ok();
            prop_assert_eq!(t.rows.len(), values.len());
            for (i, &v) in values.iter().enumerate() {
                prop_assert_eq!(format_number(t.number(i, "v").unwrap()), format_number(v));
                prop_assert_eq!(t.text(i, "label").unwrap(), "x, y");
                prop_assert_eq!(t.number(i, "gap"), None);
            }
        }
    }
}
