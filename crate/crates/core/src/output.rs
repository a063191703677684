//! Plain CSV rendering with fixed column order and 15 significant digits.

use crate::closures::ClosureSet;
use crate::error::Result;
use crate::state::{prim_to_cons, PrimState};
use std::fmt::Write;

pub const SIG_DIGITS: usize = 15;
pub const STATE_HEADER: [&str; 6] = ["x", "rho", "v", "h", "z", "w"];

/// Shortest rendering of `x` rounded to 15 significant digits, in the style
/// of C's `%.15g`. Non-finite values become `nan`, `inf`, `-inf`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mant.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Opt(Option<f64>),
    Int(i64),
    Bool(Option<bool>),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_sig(*x),
            Cell::Opt(x) => x.map_or_else(|| "nan".into(), fmt_sig),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.map_or_else(|| "nan".into(), |b| b.to_string()),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Opt(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<Option<bool>> for Cell {
    fn from(b: Option<bool>) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// In-memory CSV document.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv {
    columns: usize,
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self {
            columns: header.len(),
            buf,
        }
    }

    /// Panics on a column-count mismatch.
    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns, "csv row width");
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            let _ = write!(self.buf, "{}", c.render());
        }
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

/// `x,rho,v,h,z,w` rows for primitive states at positions `xs`. States whose
/// conservative form cannot be evaluated get `nan` for `z` and `w`.
pub fn state_csv(xs: &[f64], states: &[PrimState], cs: &ClosureSet) -> Csv {
    let mut csv = Csv::new(&STATE_HEADER);
    for (x, u) in xs.iter().zip(states) {
        let (z, w) = match prim_to_cons(u, cs) {
            Ok(c) => (c.z, c.w),
            Err(_) => (f64::NAN, f64::NAN),
        };
        csv.row(vec![(*x).into(), u.rho.into(), u.v.into(), u.h.into(), z.into(), w.into()]);
    }
    csv
}

/// Parses a numeric CSV back into a header and rows. Text cells become `NaN`.
pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .map(|h| h.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect())
        .collect();
    Ok((header, rows))
}
