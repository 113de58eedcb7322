//! Row-oriented result tables with per-column number formatting.
//!
//! Values are kept at full precision and rounded only when rendered: dB to
//! four decimals, bits/s/Hz and 3-dB units to six.

use serde_json::{Map, Number, Value};

/// How a column is rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    /// Spectral efficiency in bits/s/Hz.
    Bits,
    /// Power or SNR in dB.
    Db,
    /// Power offset in 3-dB units.
    Units,
    /// Integer count (blocklength, pilots, samples).
    Count,
    /// Any other real quantity, six decimals.
    Real,
    /// Standard error or z-score, in scientific notation.
    Stat,
    /// Free text or a flag.
    Label,
}

impl ColumnKind {
    fn decimals(self) -> Option<usize> {
        match self {
            ColumnKind::Bits | ColumnKind::Units | ColumnKind::Real => Some(6),
            ColumnKind::Db => Some(4),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: ColumnKind,
}

impl Column {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Column {
            name: name.into(),
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Flag(bool),
    /// Not applicable: blank in CSV, null in JSON.
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl Cell {
    /// Locale-independent text form under the column's rounding rule.
    pub fn render(&self, kind: ColumnKind) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Flag(v) => v.to_string(),
            Cell::Empty => String::new(),
            Cell::Text(s) => s.clone(),
            Cell::Num(v) if !v.is_finite() => v.to_string(),
            Cell::Num(v) => match kind.decimals() {
                Some(d) => {
                    let s = format!("{v:.d$}");
                    // Avoid "-0.0000" for values that round to zero.
                    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
                        s.trim_start_matches('-').to_owned()
                    } else {
                        s
                    }
                }
                None if kind == ColumnKind::Count && v.fract() == 0.0 => format!("{v:.0}"),
                None if *v == 0.0 => "0".to_owned(),
                None => format!("{v:.6e}"),
            },
        }
    }

    fn to_json(&self, kind: ColumnKind) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Flag(v) => Value::Bool(*v),
            Cell::Empty => Value::Null,
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Num(_) => {
                let text = self.render(kind);
                text.parse::<f64>()
                    .ok()
                    .and_then(Number::from_f64)
                    .map(Value::Number)
                    .unwrap_or(Value::String(text))
            }
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

/// A rectangular table; every row has one cell per column.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of the named column, in row order.
    pub fn column_values(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    /// Rendered header and rows, ready for CSV.
    pub fn rendered(&self) -> (Vec<&str>, Vec<Vec<String>>) {
        let header = self.columns.iter().map(|c| c.name.as_str()).collect();
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().zip(&self.columns).map(|(c, col)| c.render(col.kind)).collect())
            .collect();
        (header, rows)
    }

    /// One JSON object per row, keyed by column name.
    pub fn json_rows(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                for (cell, col) in r.iter().zip(&self.columns) {
                    obj.insert(col.name.clone(), cell.to_json(col.kind));
                }
                Value::Object(obj)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_per_kind() {
        assert_eq!(Cell::Num(1.899_188_8).render(ColumnKind::Db), "1.8992");
        assert_eq!(Cell::Num(0.533_674_7).render(ColumnKind::Bits), "0.533675");
        assert_eq!(Cell::Num(-0.000_01).render(ColumnKind::Db), "0.0000");
        assert_eq!(Cell::Num(0.001_234_567).render(ColumnKind::Stat), "1.234567e-3");
        assert_eq!(Cell::Int(10).render(ColumnKind::Count), "10");
        assert_eq!(Cell::Flag(true).render(ColumnKind::Label), "true");
        assert_eq!(Cell::Empty.render(ColumnKind::Bits), "");
        assert_eq!(Cell::Num(0.0).render(ColumnKind::Stat), "0");
    }

    #[test]
    fn json_uses_rendered_precision() {
        let mut t = Table::new(vec![Column::new("T", ColumnKind::Count), Column::new("C", ColumnKind::Bits)]);
        t.push(vec![Cell::Int(10), Cell::Num(2.906_514_808_4)]);
        let rows = t.json_rows();
        assert_eq!(rows[0]["T"], Value::from(10));
        assert_eq!(rows[0]["C"].as_f64(), Some(2.906515));
        assert_eq!(t.column_values("C"), Some(vec![2.906_514_808_4]));
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_are_rejected() {
        let mut t = Table::new(vec![Column::new("a", ColumnKind::Bits)]);
        t.push(vec![]);
    }
}
