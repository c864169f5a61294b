//! CSV output with shortest round-trip number formatting, and CSV input for
//! the plot command.

use std::path::Path;

use anyhow::{bail, Context, Result};

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w =
            csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

/// A numeric CSV file with named columns.
pub struct NumericCsv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl NumericCsv {
    /// Reads every cell as a number. Text cells are kept as NaN and rejected
    /// when their column is requested.
    pub fn read(path: &Path) -> Result<Self> {
        let mut r =
            csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let header: Vec<String> = r
            .headers()
            .with_context(|| format!("reading header of {}", path.display()))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let record = record.with_context(|| format!("{}: malformed row", path.display()))?;
            let row = record
                .iter()
                .map(|cell| cell.trim().parse::<f64>().unwrap_or(f64::NAN))
                .collect();
            rows.push(row);
        }
        if rows.is_empty() {
            bail!("{}: no data rows", path.display());
        }
        Ok(NumericCsv { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("missing column {name:?}"))
    }

    pub fn values(&self, name: &str) -> Result<Vec<f64>> {
        let c = self.column(name)?;
        let values: Vec<f64> = self.rows.iter().map(|r| r[c]).collect();
        if let Some(row) = values.iter().position(|v| v.is_nan()) {
            bail!("column {name:?}: row {} is not a number", row + 1);
        }
        Ok(values)
    }

    pub fn starts_with(&self, prefix: &[&str]) -> bool {
        self.header.len() >= prefix.len() && self.header.iter().zip(prefix).all(|(a, b)| a == b)
    }
}
