use std::io::Write;

use serde::{Deserialize, Serialize};

use super::pearson::{pair_stats, MIN_PAIRS};
use crate::error::{Error, Result};
use crate::metrics::ZipFeatureVector;

/// Symmetric matrix of pairwise Pearson coefficients with the number of
/// complete pairs behind each cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub columns: Vec<String>,
    pub r: Vec<Vec<Option<f64>>>,
    pub n: Vec<Vec<usize>>,
}

impl CorrelationMatrix {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.columns.iter().position(|c| c == a)?;
        let j = self.columns.iter().position(|c| c == b)?;
        self.r[i][j]
    }

    /// Square CSV: header row and first column carry the feature names;
    /// null cells are empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(std::iter::once("feature").chain(self.columns.iter().map(String::as_str)))?;
        for (name, row) in self.columns.iter().zip(&self.r) {
            let cells: Vec<String> = row
                .iter()
                .map(|v| v.map(|x| x.to_string()).unwrap_or_default())
                .collect();
            w.write_record(std::iter::once(name.clone()).chain(cells))?;
        }
        w.flush().map_err(|e| Error::io("<correlation csv>", e))?;
        Ok(())
    }
}

/// Correlation matrix over named columns of data.
pub fn correlation_matrix_from_columns(
    names: &[String],
    data: &[Vec<Option<f64>>],
) -> Result<CorrelationMatrix> {
    if names.is_empty() {
        return Err(Error::Precondition(
            "correlation needs at least one column".into(),
        ));
    }
    if names.len() != data.len() {
        return Err(Error::LengthMismatch {
            left: names.len(),
            right: data.len(),
        });
    }
    let k = names.len();
    let mut r = vec![vec![None; k]; k];
    let mut n = vec![vec![0; k]; k];
    for i in 0..k {
        for j in i..k {
            let s = pair_stats(&data[i], &data[j])?;
            let value = if i == j {
                // unit diagonal wherever the column has variance
                (s.n >= MIN_PAIRS && s.r.is_some()).then_some(1.0)
            } else {
                s.r
            };
            r[i][j] = value;
            r[j][i] = value;
            n[i][j] = s.n;
            n[j][i] = s.n;
        }
    }
    Ok(CorrelationMatrix {
        columns: names.to_vec(),
        r,
        n,
    })
}

/// Correlations between feature columns of the zip matrix, in the order given.
pub fn correlation_matrix(
    rows: &[ZipFeatureVector],
    columns: &[String],
) -> Result<CorrelationMatrix> {
    if columns.is_empty() {
        return Err(Error::Precondition(
            "correlation needs at least one column".into(),
        ));
    }
    if rows.len() < MIN_PAIRS {
        return Err(Error::Precondition(format!(
            "correlation needs at least {MIN_PAIRS} rows, got {}",
            rows.len()
        )));
    }
    let data = columns
        .iter()
        .map(|c| {
            rows.iter()
                .map(|r| {
                    r.column(c)
                        .ok_or_else(|| Error::Config(format!("unknown feature column `{c}`")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    correlation_matrix_from_columns(columns, &data)
}
