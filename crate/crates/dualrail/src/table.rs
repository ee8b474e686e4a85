//! CSV emission with a JSON config header.

use std::fmt::Write as _;

use crate::config::RunConfig;
use crate::{AppError, AppResult};

/// Prefix of the header comment carrying the resolved config.
pub const CONFIG_PREFIX: &str = "# config: ";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// 17 significant digits; Rust float formatting ignores locale.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        // +0.0 folds a negative zero
        format!("{:.16e}", x + 0.0)
    } else {
        format!("{x}")
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Num(x) => out.push_str(&format_number(*x)),
            Cell::Int(n) => {
                let _ = write!(out, "{n}");
            }
            Cell::Text(s) => out.push_str(s),
            Cell::Empty => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn render(&self, config: &RunConfig) -> AppResult<String> {
        let json = serde_json::to_string(config)
            .map_err(|e| AppError::invalid(format!("cannot serialize config: {e}")))?;
        let mut out = String::new();
        out.push_str(CONFIG_PREFIX);
        out.push_str(&json);
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Recovers the config embedded in a previous output.
pub fn config_from_csv(text: &str, origin: &str) -> AppResult<RunConfig> {
    let first = text.lines().next().unwrap_or("");
    let json = first
        .strip_prefix(CONFIG_PREFIX)
        .ok_or_else(|| AppError::Parse {
            origin: origin.to_owned(),
            line: 1,
            column: 1,
            message: format!("expected a `{}` header line", CONFIG_PREFIX.trim_end()),
        })?;
    serde_json::from_str(json).map_err(|e| AppError::Parse {
        origin: origin.to_owned(),
        line: 1,
        column: CONFIG_PREFIX.len() + e.column(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.0), "-2.0000000000000000e0");
        let x = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }
}
