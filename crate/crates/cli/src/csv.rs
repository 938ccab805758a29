//! Plain CSV output with `#` comment headers and 12-significant-digit numbers.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats like C's `%.12g`: fixed notation for decimal exponents in
/// `[-5, 12)`, scientific otherwise, trailing zeros removed.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Rounds to the value that survives a write/parse cycle.
pub fn round_sig(x: f64) -> f64 {
    fmt_num(x).parse().expect("formatted number parses")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) -> &mut Self {
        self.comments.push(line.into());
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.render())
    }

    /// Parses text produced by [`Table::render`].
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut table = Table::default();
        let mut lines = text.lines();
        for line in lines.by_ref() {
            if let Some(c) = line.strip_prefix('#') {
                table.comments.push(c.strip_prefix(' ').unwrap_or(c).to_string());
            } else {
                table.columns = line.split(',').map(str::to_string).collect();
                break;
            }
        }
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|cell| cell.parse::<f64>().map_err(|e| format!("row {n}: `{cell}`: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != table.columns.len() {
                return Err(format!("row {n}: expected {} cells", table.columns.len()));
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}
