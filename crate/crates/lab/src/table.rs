//! CSV tables with byte-stable number formatting.

use std::io::Write;

/// Shortest decimal that parses back to the same `f64`. Very large and very
/// small magnitudes use exponent notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Float(x) => Some(x),
            Cell::Int(i) => Some(i as f64),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match *self {
            Cell::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
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

/// Builds a row of cells from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::table::Cell::from($x)),*]
    };
}

/// A report table. The primary table of a run has no suffix and is written
/// to `<kind>.csv`; the others go to `<kind>_<suffix>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub suffix: Option<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(suffix: Option<&str>, header: &[&str]) -> Self {
        Self::with_header(suffix, header.iter().map(|s| s.to_string()).collect())
    }

    pub fn with_header(suffix: Option<&str>, header: Vec<String>) -> Self {
        Self {
            suffix: suffix.map(str::to_string),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width does not match header {:?}",
            self.header
        );
        self.rows.push(row);
    }

    pub fn file_name(&self, kind: &str) -> String {
        match &self.suffix {
            None => format!("{kind}.csv"),
            Some(s) => format!("{kind}_{s}.csv"),
        }
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// All cells of the named column, in row order.
    pub fn values(&self, name: &str) -> Option<Vec<&Cell>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| &r[c]).collect())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn write_to(&self, out: &mut impl Write) -> Result<(), csv::Error> {
        out.write_all(&self.to_csv_bytes()?)?;
        Ok(())
    }
}

/// Fixed column names followed by generated ones.
pub fn header(fixed: &[&str], extra: impl IntoIterator<Item = String>) -> Vec<String> {
    fixed.iter().map(|s| s.to_string()).chain(extra).collect()
}

/// Column names `prefix_<value>` for a grid, e.g. `min_mass_0.1`.
pub fn grid_columns(prefix: &str, grid: &[f64]) -> Vec<String> {
    grid.iter()
        .map(|x| format!("{prefix}_{}", fmt_f64(*x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_formatting() {
        for x in [
            0.1,
            1.0 / 3.0,
            2f64.sqrt(),
            1e-300,
            -7.5e20,
            123456.0,
            5e-6,
            0.0,
            -0.0,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(1e-7), "1e-7");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(None, &["a", "b", "c"]);
        t.push(row![1.5, true, None::<f64>]);
        t.push(row!["x,y", 3usize, 0.25]);
        let s = String::from_utf8(t.to_csv_bytes().unwrap()).unwrap();
        assert_eq!(s, "a,b,c\n1.5,true,\n\"x,y\",3,0.25\n");
        assert_eq!(t.file_name("braess"), "braess.csv");
    }
}
