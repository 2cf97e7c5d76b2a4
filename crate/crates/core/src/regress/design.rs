use std::collections::HashSet;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Name of the implicit leading column of ones.
pub const INTERCEPT: &str = "(Intercept)";

/// Observations × named predictors, plus the response. The intercept column
/// is implicit and always first.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    predictors: Vec<String>,
    rows: Vec<Vec<f64>>,
    response_name: String,
    response: Vec<f64>,
    labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new(
        predictors: Vec<String>,
        rows: Vec<Vec<f64>>,
        response_name: impl Into<String>,
        response: Vec<f64>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for name in &predictors {
            if name == INTERCEPT || !seen.insert(name.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate column name `{name}`"
                )));
            }
        }
        if rows.len() != response.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: response.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != predictors.len() {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} values for {} predictors",
                    row.len(),
                    predictors.len()
                )));
            }
            if row.iter().chain([&response[i]]).any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "row {i} has a missing or non-finite value"
                )));
            }
        }
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Ok(DesignMatrix {
            predictors,
            rows,
            response_name: response_name.into(),
            response,
            labels,
        })
    }

    /// Attaches row labels (e.g. topic names).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: self.rows.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Number of predictors, intercept excluded.
    pub fn p(&self) -> usize {
        self.predictors.len()
    }

    pub fn predictors(&self) -> &[String] {
        &self.predictors
    }

    /// All column names, intercept first.
    pub fn column_names(&self) -> Vec<String> {
        std::iter::once(INTERCEPT.to_string())
            .chain(self.predictors.iter().cloned())
            .collect()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn predictor(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Design columns including the leading ones.
    pub(crate) fn columns(&self) -> Vec<Vec<f64>> {
        std::iter::once(vec![1.0; self.n()])
            .chain((0..self.p()).map(|j| self.predictor(j)))
            .collect()
    }

    /// Keeps the named predictors, in the given order.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<DesignMatrix> {
        let idx = names
            .iter()
            .map(|n| {
                self.predictors
                    .iter()
                    .position(|p| p == n.as_ref())
                    .ok_or_else(|| Error::MissingColumn(n.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| idx.iter().map(|&j| r[j]).collect())
            .collect();
        DesignMatrix::new(
            names.iter().map(|n| n.as_ref().to_string()).collect(),
            rows,
            self.response_name.clone(),
            self.response.clone(),
        )?
        .with_labels(self.labels.clone())
    }

    /// CSV with header `id,<predictors...>,<response>`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["id".to_string()];
        header.extend(self.predictors.iter().cloned());
        header.push(self.response_name.clone());
        w.write_record(&header)?;
        for ((label, row), y) in self.labels.iter().zip(&self.rows).zip(&self.response) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(f64::to_string));
            rec.push(y.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a CSV whose column `response` is the response and every other
    /// column, except an optional leading `id`, is a predictor.
    pub fn read_csv<R: Read>(input: R, response: &str) -> Result<DesignMatrix> {
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r
            .headers()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let y_col = header
            .iter()
            .position(|h| h == response)
            .ok_or_else(|| Error::MissingColumn(response.to_string()))?;
        let id_col = header.iter().position(|h| h == "id");
        let x_cols: Vec<usize> = (0..header.len())
            .filter(|&j| j != y_col && Some(j) != id_col)
            .collect();

        let mut rows = Vec::new();
        let mut ys = Vec::new();
        let mut labels = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| Error::InvalidInput(e.to_string()))?;
            let num = |j: usize| -> Result<f64> {
                let field = rec.get(j).unwrap_or("");
                field.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!(
                        "row {}: column `{}` value `{field}` is not a number",
                        i + 1,
                        header[j]
                    ))
                })
            };
            rows.push(x_cols.iter().map(|&j| num(j)).collect::<Result<Vec<_>>>()?);
            ys.push(num(y_col)?);
            labels.push(match id_col {
                Some(j) => rec.get(j).unwrap_or("").to_string(),
                None => i.to_string(),
            });
        }
        let names = x_cols.iter().map(|&j| header[j].clone()).collect();
        DesignMatrix::new(names, rows, response, ys)?.with_labels(labels)
    }
}
