//! Named numeric columns — the bridge between ingested records, generated
//! datasets and design-matrix construction.

use super::features::RiskFeatures;
use super::record::BusinessRecord;
use crate::{Error, Result};
use std::collections::HashMap;
use std::path::Path;

/// Ordered collection of equal-length named columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Frame {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Frame {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of rows (0 for an empty frame).
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    /// Appends a column; lengths must agree and names must be unique.
    pub fn push(&mut self, name: impl Into<String>, column: Vec<f64>) -> Result<()> {
        let name = name.into();
        if self.has_column(&name) {
            return Err(Error::InvalidParameter(format!(
                "duplicate column `{name}`"
            )));
        }
        if !self.columns.is_empty() && column.len() != self.len() {
            return Err(Error::DimensionMismatch {
                what: "frame column",
                expected: self.len(),
                got: column.len(),
            });
        }
        self.names.push(name);
        self.columns.push(column);
        Ok(())
    }

    /// Builds the analysis frame from records and their risk features.
    ///
    /// Columns use the modeling vocabulary: isClosed, isGroupon, rate
    /// (average rating), nreview (review count), price, and the four risk
    /// rates fzrisk/fprisk/gzrisk/gprisk.
    pub fn from_records(
        records: &[BusinessRecord],
        features: &HashMap<String, RiskFeatures>,
    ) -> Result<Self> {
        let n = records.len();
        let mut is_closed = Vec::with_capacity(n);
        let mut is_groupon = Vec::with_capacity(n);
        let mut rate = Vec::with_capacity(n);
        let mut nreview = Vec::with_capacity(n);
        let mut price = Vec::with_capacity(n);
        let mut fz = Vec::with_capacity(n);
        let mut fp = Vec::with_capacity(n);
        let mut gz = Vec::with_capacity(n);
        let mut gp = Vec::with_capacity(n);
        for r in records {
            let f = features
                .get(&r.id)
                .ok_or_else(|| Error::UnknownVariable(format!("features for record {}", r.id)))?;
            is_closed.push(f64::from(r.is_closed));
            is_groupon.push(f64::from(r.is_groupon));
            rate.push(r.rating);
            nreview.push(f64::from(r.n_reviews));
            price.push(f64::from(r.price));
            fz.push(f.fzrisk);
            fp.push(f.fprisk);
            gz.push(f.gzrisk);
            gp.push(f.gprisk);
        }
        let mut frame = Frame::new();
        frame.push("isClosed", is_closed)?;
        frame.push("isGroupon", is_groupon)?;
        frame.push("rate", rate)?;
        frame.push("nreview", nreview)?;
        frame.push("price", price)?;
        frame.push("fzrisk", fz)?;
        frame.push("fprisk", fp)?;
        frame.push("gzrisk", gz)?;
        frame.push("gprisk", gp)?;
        Ok(frame)
    }

    /// Writes the frame as headered CSV. Values use the shortest
    /// round-trip float representation, so a reload is bit-exact.
    pub fn write_csv<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut w = csv::Writer::from_path(path.as_ref()).map_err(|e| Error::Csv {
            line: 0,
            message: e.to_string(),
        })?;
        w.write_record(&self.names).map_err(|e| Error::Csv {
            line: 0,
            message: e.to_string(),
        })?;
        for row in 0..self.len() {
            let fields: Vec<String> = self.columns.iter().map(|c| c[row].to_string()).collect();
            w.write_record(&fields).map_err(|e| Error::Csv {
                line: row as u64 + 2,
                message: e.to_string(),
            })?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a headered all-numeric CSV. A non-numeric cell is a hard
    /// error naming the offending column and line.
    pub fn read_csv<P: AsRef<Path>>(path: P) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path.as_ref()).map_err(|e| Error::Csv {
            line: 0,
            message: e.to_string(),
        })?;
        let names: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Csv {
                line: 1,
                message: e.to_string(),
            })?
            .iter()
            .map(str::to_string)
            .collect();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for row in reader.records() {
            let row = row.map_err(|e| Error::Csv {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = row.position().map_or(0, |p| p.line());
            if row.len() != names.len() {
                return Err(Error::Csv {
                    line,
                    message: format!("expected {} fields, got {}", names.len(), row.len()),
                });
            }
            for (i, cell) in row.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::Csv {
                    line,
                    message: format!("non-numeric value `{cell}` in column `{}`", names[i]),
                })?;
                columns[i].push(v);
            }
        }
        Ok(Self { names, columns })
    }
}
