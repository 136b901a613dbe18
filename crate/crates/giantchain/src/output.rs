//! CSV tables with a leading `#` metadata block.
//!
//! Reals are written with 17 significant digits, enough to round-trip any
//! `f64`. Files appear only once every table of a run is complete: each is
//! written to a temporary file in the target directory and renamed into
//! place at the end.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use giantchain_core::ObservableTable;
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(x) => format_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<i64> for Cell {
    fn from(i: i64) -> Self {
        Cell::Int(i)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// `1.2345678901234567e0` style, 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// One output file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub file_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Run details beyond the configuration (solver diagnostics and such).
    pub meta: Vec<(String, String)>,
}

impl CsvTable {
    pub fn new(file_name: &str, columns: &[&str]) -> Self {
        Self {
            file_name: file_name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    /// Takes the named columns of `table`, in the given order, and its metadata.
    pub fn from_observables(file_name: &str, table: &ObservableTable, columns: &[&str]) -> Result<Self> {
        let idx: Vec<usize> = columns
            .iter()
            .map(|c| {
                table
                    .columns()
                    .iter()
                    .position(|t| t == c)
                    .ok_or_else(|| CliError::Internal(format!("table has no column `{c}`")))
            })
            .collect::<Result<_>>()?;
        let mut out = Self::new(file_name, columns);
        for row in table.rows() {
            out.rows.push(idx.iter().map(|&i| Cell::Real(row[i])).collect());
        }
        out.meta = table.metadata().to_vec();
        Ok(out)
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(CliError::Internal(format!(
                "{}: row of {} cells for {} columns",
                self.file_name,
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| match &r[i] {
                Cell::Real(x) => Some(*x),
                Cell::Int(v) => Some(*v as f64),
                Cell::Text(_) => None,
            })
            .collect()
    }

    /// Header comment, column line and rows.
    pub fn write_to<W: Write>(&self, out: W, header: &str) -> Result<()> {
        let mut out = BufWriter::new(out);
        for line in header.lines() {
            writeln!(out, "# {line}")?;
        }
        for (k, v) in &self.meta {
            writeln!(out, "# run.{k} = {v}")?;
        }
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        drop(w);
        out.flush()?;
        Ok(())
    }
}

/// Writes all tables into `dir`, each through a temporary file that is only
/// renamed into place after every table has been written.
pub fn write_tables(dir: &Path, tables: &[CsvTable], header: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(tables.len());
    for t in tables {
        let mut tmp = NamedTempFile::new_in(dir)?;
        t.write_to(tmp.as_file_mut(), header)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(&t.file_name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, path) in staged {
        tmp.persist(&path).map_err(|e| CliError::Io(e.error))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.0e-300, 6.283185307179586, f64::MAX] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn rows_must_match_the_header() {
        let mut t = CsvTable::new("a.csv", &["x", "y"]);
        assert!(t.push(vec![1.0.into()]).is_err());
        t.push(vec![1.0.into(), 2i64.into()]).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf, "tool 0\nseed = 1").unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# tool 0\n# seed = 1\nx,y\n1.0000000000000000e0,2\n");
    }
}
