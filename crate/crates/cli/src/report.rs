//! CSV tables with a JSON sidecar describing the columns.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// Written as an empty field when absent.
    Maybe(Option<f64>),
    Int(u64),
    Flag(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) | Cell::Maybe(Some(x)) => format!("{x}"),
            Cell::Maybe(None) => String::new(),
            Cell::Int(n) => n.to_string(),
            Cell::Flag(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) | Cell::Maybe(Some(x)) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
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
        Cell::Maybe(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Flag(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sidecar {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    pub quick: bool,
    pub rng: String,
    pub notes: Vec<String>,
    pub columns: Vec<Column>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub experiment: String,
    pub seed: u64,
    pub quick: bool,
    pub notes: Vec<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(experiment: &str, seed: u64, quick: bool, columns: &[(&str, &str)]) -> Self {
        Self {
            experiment: experiment.to_owned(),
            seed,
            quick,
            notes: Vec::new(),
            columns: columns
                .iter()
                .map(|(n, d)| Column { name: (*n).to_owned(), description: (*d).to_owned() })
                .collect(),
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

    /// Numeric values of one column, `None` for empty or non-numeric cells.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k].as_f64()).collect())
    }

    pub fn sidecar(&self) -> Sidecar {
        Sidecar {
            experiment: self.experiment.clone(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: self.seed,
            quick: self.quick,
            rng: nfg_core::samplers::RNG_NAME.to_owned(),
            notes: self.notes.clone(),
            columns: self.columns.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush().map_err(|e| CliError::io("writing csv", e))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Writes `path` and `<path>.columns.json`.
    pub fn write_files(&self, path: &Path) -> CliResult<PathBuf> {
        let file = std::fs::File::create(path).map_err(|e| CliError::io(format!("creating {}", path.display()), e))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let side = sidecar_path(path);
        let text = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(&side, text + "\n").map_err(|e| CliError::io(format!("writing {}", side.display()), e))?;
        Ok(side)
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".columns.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_empty_missing_cells() {
        let mut t = Table::new("t", 1, true, &[("x", "a"), ("y", "b"), ("ok", "c")]);
        t.push(vec![0.5.into(), None.into(), true.into()]);
        t.push(vec![1e-3.into(), Some(2.0).into(), false.into()]);
        assert_eq!(t.to_csv_string().unwrap(), "x,y,ok\n0.5,,true\n0.001,2,false\n");
        assert_eq!(t.column("y").unwrap(), vec![None, Some(2.0)]);
    }

    #[test]
    fn sidecar_sits_next_to_the_csv() {
        assert_eq!(sidecar_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.columns.json"));
    }
}
