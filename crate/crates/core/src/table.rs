//! Column-named tables of real values, the common currency of every
//! time series and parameter scan.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major table with named columns and a free-form metadata block.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    metadata: Vec<(String, String)>,
}

impl ObservableTable {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "row has {} values, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Copy of one column, or `None` if no column has this name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    /// Appends a metadata entry; later entries with the same key win on lookup.
    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_ragged_rows() {
        let mut t = ObservableTable::new(&["t", "p_e"]);
        assert!(t.push_row(vec![0.0, 1.0]).is_ok());
        assert!(t.push_row(vec![0.0]).is_err());
        assert_eq!(t.column("p_e"), Some(vec![1.0]));
        assert_eq!(t.column("x"), None);
    }

    #[test]
    fn metadata_lookup_prefers_latest() {
        let mut t = ObservableTable::new(&["a"]);
        t.set_meta("seed", "1");
        t.set_meta("seed", "2");
        assert_eq!(t.meta("seed"), Some("2"));
    }
}
