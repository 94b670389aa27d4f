//! Column-oriented result tables and their CSV + schema serialization.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::HarnessError;

/// One cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    /// Not applicable or not computed (written as an empty cell).
    Missing,
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Value::Int(v) => Some(v as f64),
            Value::Float(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            // shortest representation that round-trips
            Value::Float(v) => write!(f, "{v:e}"),
            Value::Text(s) => f.write_str(s),
            Value::Missing => Ok(()),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Missing, Into::into)
    }
}

/// Column name, cell type and meaning (for the schema sidecar).
#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: &'static str,
    pub description: String,
}

pub fn col(name: &str, kind: &'static str, description: &str) -> Column {
    Column { name: name.into(), kind, description: description.into() }
}

/// Rows of named columns plus run metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// File stem, e.g. `bessel-helmholtz` or `bessel-helmholtz_orders`.
    pub stem: String,
    pub title: String,
    pub columns: Vec<Column>,
    rows: Vec<Vec<Value>>,
    /// `(key, value)` lines written as `# key: value`.
    pub metadata: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(stem: &str, title: &str, columns: Vec<Column>) -> Self {
        Self { stem: stem.into(), title: title.into(), columns, rows: Vec::new(), metadata: Vec::new() }
    }

    /// Appends a row; it must have one cell per column.
    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from the column count of {}", self.stem);
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// All cells of a column.
    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    /// Rows whose text/integer cells match every `(column, value)` filter.
    pub fn select(&self, filters: &[(&str, Value)]) -> Vec<&[Value]> {
        let idx: Vec<(usize, &Value)> =
            filters.iter().map(|(c, v)| (self.column_index(c).unwrap_or_else(|| panic!("no column {c}")), v)).collect();
        self.rows.iter().filter(|r| idx.iter().all(|(k, v)| &r[*k] == *v)).map(|r| r.as_slice()).collect()
    }

    /// Numeric cell of `row` in column `name`.
    pub fn get(&self, row: &[Value], name: &str) -> Option<f64> {
        row[self.column_index(name)?].as_f64()
    }

    /// CSV body (header and rows) without metadata.
    pub fn body_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|c| c.name.as_str())).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r.iter().map(|v| v.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    pub fn schema_text(&self) -> String {
        let mut s = format!("# {}\n# column\ttype\tdescription\n", self.title);
        for c in &self.columns {
            s.push_str(&format!("{}\t{}\t{}\n", c.name, c.kind, c.description));
        }
        s
    }

    /// Writes `<stem>.csv` and `<stem>.schema.txt` into `dir`; returns the CSV path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, HarnessError> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{}.csv", self.stem));
        let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", path.display()));
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(io)?);
        for (k, v) in &self.metadata {
            writeln!(f, "# {k}: {v}").map_err(io)?;
        }
        f.write_all(self.body_csv().as_bytes()).map_err(io)?;
        f.flush().map_err(io)?;
        let schema = dir.join(format!("{}.schema.txt", self.stem));
        std::fs::write(&schema, self.schema_text()).map_err(|e| HarnessError::Io(format!("{}: {e}", schema.display())))?;
        Ok(path)
    }
}

/// Reads a CSV written by [`ResultTable::write`] back into metadata and
/// string cells.
pub fn read_csv(path: &Path) -> Result<(Vec<(String, String)>, Vec<String>, Vec<Vec<String>>), HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    let mut meta = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix("# ") {
            Some(m) if body.is_empty() => {
                let (k, v) = m.split_once(": ").unwrap_or((m, ""));
                meta.push((k.to_string(), v.to_string()));
            }
            _ => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().map_err(|e| HarnessError::Parse(e.to_string()))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()
        .map_err(|e| HarnessError::Parse(e.to_string()))?;
    Ok((meta, header, rows))
}
