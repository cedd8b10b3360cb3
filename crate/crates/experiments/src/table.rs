//! Result tables and their CSV form.
//!
//! Reals are written with 8 significant digits, NaN as `NA`. Parsing an
//! emitted file and writing it again reproduces it byte for byte.

use std::fmt;

/// Significant digits used for real-valued cells.
pub const SIGNIFICANT_DIGITS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Real(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Self::Int(n)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Self::Int(u64::from(n))
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Self::Int(n as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Self::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Text(if b { "pass" } else { "fail" }.to_string())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Real(x) => f.write_str(&format_real(*x)),
            Self::Int(n) => write!(f, "{n}"),
            Self::Text(s) => f.write_str(s),
        }
    }
}

/// Formats with [`SIGNIFICANT_DIGITS`] significant digits, dropping trailing
/// zeros; plain notation for exponents in `[-5, 15)`, scientific otherwise.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        return "NA".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf" } else { "-Inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Rounding happens here, once; the layout below only moves the point.
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let sign = if negative { "-" } else { "" };

    if !(-5..15).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

/// Reads a cell back: integers, then reals (`NA`, `Inf` included), else text.
pub fn parse_cell(s: &str) -> Cell {
    if let Ok(n) = s.parse::<u64>() {
        return Cell::Int(n);
    }
    match s {
        "NA" => return Cell::Real(f64::NAN),
        "Inf" => return Cell::Real(f64::INFINITY),
        "-Inf" => return Cell::Real(f64::NEG_INFINITY),
        _ => {}
    }
    let looks_numeric = s
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        && s.chars().any(|c| c.is_ascii_digit());
    match s.parse::<f64>() {
        Ok(x) if looks_numeric && x.is_finite() => Cell::Real(x),
        _ => Cell::Text(s.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Real value of `name` in `row`, if the cell is numeric.
    pub fn real(&self, row: usize, name: &str) -> Option<f64> {
        match self.rows.get(row)?.get(self.column(name)?)? {
            Cell::Real(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            Cell::Text(_) => None,
        }
    }

    /// RFC-4180 text with CRLF-free `\n` line ends.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(ToString::to_string))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    /// Parses text written by [`Table::to_csv`] (or any RFC-4180 file with a
    /// header row and rows of equal width).
    pub fn from_csv(text: &str) -> Result<Self, csv::Error> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in r.records() {
            rows.push(record?.iter().map(parse_cell).collect());
        }
        Ok(Self { header, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eight_significant_digits() {
        assert_eq!(format_real(0.1037), "0.1037");
        assert_eq!(format_real(1.0 / 3.0), "0.33333333");
        assert_eq!(format_real(-2.0 / 3.0), "-0.66666667");
        assert_eq!(format_real(11.11962345), "11.119623");
        assert_eq!(format_real(9.999999999), "10");
        assert_eq!(format_real(123456789.0), "123456790");
        assert_eq!(format_real(1e20), "1e20");
        assert_eq!(format_real(1.5e-7), "1.5e-7");
        assert_eq!(format_real(0.00012345678912), "0.00012345679");
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(-0.0), "0");
        assert_eq!(format_real(f64::NAN), "NA");
        assert_eq!(format_real(f64::NEG_INFINITY), "-Inf");
    }

    #[test]
    fn quoting_follows_rfc4180() {
        let mut t = Table::new(["label", "x"]);
        t.push(vec![Cell::from("a,\"b\""), Cell::from(1.5)]);
        assert_eq!(t.to_csv(), "label,x\n\"a,\"\"b\"\"\",1.5\n");
        let back = Table::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back.rows[0][0], Cell::from("a,\"b\""));
    }

    #[test]
    fn na_round_trips() {
        let mut t = Table::new(["x", "y"]);
        t.push(vec![Cell::from(f64::NAN), Cell::from(3u64)]);
        let text = t.to_csv();
        assert_eq!(text, "x,y\nNA,3\n");
        assert_eq!(Table::from_csv(&text).unwrap().to_csv(), text);
    }

    #[test]
    fn text_that_resembles_numbers_stays_text() {
        assert_eq!(parse_cell("inf"), Cell::Text("inf".into()));
        assert_eq!(parse_cell("NaN"), Cell::Text("NaN".into()));
        assert_eq!(parse_cell("drift-theorem"), Cell::Text("drift-theorem".into()));
        assert_eq!(parse_cell("e"), Cell::Text("e".into()));
    }

    proptest! {
        #[test]
        fn emit_parse_emit_is_idempotent(
            xs in proptest::collection::vec(proptest::num::f64::ANY, 1..8),
            n in any::<u64>(),
        ) {
            let mut t = Table::new((0..xs.len() + 1).map(|i| format!("c{i}")));
            let mut row: Vec<Cell> = xs.iter().copied().map(Cell::from).collect();
            row.push(Cell::from(n));
            t.push(row);
            let once = t.to_csv();
            let twice = Table::from_csv(&once).unwrap().to_csv();
            prop_assert_eq!(&once, &twice);
        }

        #[test]
        fn formatted_value_is_within_rounding(x in -1e300f64..1e300) {
            let back: f64 = format_real(x).parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-8 * x.abs());
        }
    }
}
