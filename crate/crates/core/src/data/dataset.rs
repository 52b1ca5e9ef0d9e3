use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result, SrlError};

/// Response distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Binomial,
}

impl FromStr for Family {
    type Err = SrlError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Family::Gaussian),
            "binomial" => Ok(Family::Binomial),
            other => invalid(format!("unknown family '{other}'")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gaussian => "gaussian",
            Family::Binomial => "binomial",
        })
    }
}

/// A response vector with its raw feature matrix.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub y: Array1<f64>,
    pub x: Array2<f64>,
    pub feature_names: Vec<String>,
    pub family: Family,
}

impl Dataset {
    pub fn new(
        y: Array1<f64>,
        x: Array2<f64>,
        feature_names: Vec<String>,
        family: Family,
    ) -> Result<Self> {
        let (n, p) = x.dim();
        if n < 2 {
            return invalid(format!("need at least 2 observations, found {n}"));
        }
        if p < 1 {
            return invalid("need at least one feature column");
        }
        if y.len() != n {
            return Err(SrlError::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        if feature_names.len() != p {
            return Err(SrlError::DimensionMismatch {
                expected: p,
                found: feature_names.len(),
            });
        }
        if let Some(row) = y.iter().position(|v| !v.is_finite()) {
            return Err(SrlError::MissingValue {
                column: "<response>".into(),
                row,
            });
        }
        for (j, col) in x.axis_iter(Axis(1)).enumerate() {
            if let Some(row) = col.iter().position(|v| !v.is_finite()) {
                return Err(SrlError::MissingValue {
                    column: feature_names[j].clone(),
                    row,
                });
            }
        }
        if family == Family::Binomial {
            if let Some((row, &value)) = y.iter().enumerate().find(|(_, &v)| v != 0.0 && v != 1.0) {
                return Err(SrlError::NonBinaryResponse { value, row });
            }
        }
        Ok(Self {
            y,
            x,
            feature_names,
            family,
        })
    }

    /// Features named `x1..xp`.
    pub fn with_default_names(y: Array1<f64>, x: Array2<f64>, family: Family) -> Result<Self> {
        let names = (1..=x.ncols()).map(|j| format!("x{j}")).collect();
        Self::new(y, x, names, family)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Rows `rows` of this dataset, in the given order.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            y: self.y.select(Axis(0), rows),
            x: self.x.select(Axis(0), rows),
            feature_names: self.feature_names.clone(),
            family: self.family,
        }
    }
}

fn is_missing(field: &str) -> bool {
    matches!(
        field.to_ascii_lowercase().as_str(),
        "" | "na" | "nan" | "null" | "?"
    )
}

/// Read a comma-delimited table with a header row. Every column must be numeric.
pub fn load_dataset(
    path: impl AsRef<Path>,
    response_column: &str,
    family: Family,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| SrlError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let response_idx = headers
        .iter()
        .position(|h| h == response_column)
        .ok_or_else(|| SrlError::ColumnNotFound(response_column.to_owned()))?;

    let p = headers.len() - 1;
    let mut y = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (col, field) in record.iter().enumerate() {
            if is_missing(field) {
                return Err(SrlError::MissingValue {
                    column: headers[col].clone(),
                    row,
                });
            }
            let value: f64 = field.parse().map_err(|_| SrlError::NonNumeric {
                column: headers[col].clone(),
                row,
                value: field.to_owned(),
            })?;
            if col == response_idx {
                y.push(value);
            } else {
                values.push(value);
            }
        }
    }
    let n = y.len();
    let x = Array2::from_shape_vec((n, p), values)
        .map_err(|e| SrlError::InvalidInput(format!("ragged table: {e}")))?;
    let names = headers
        .into_iter()
        .enumerate()
        .filter(|(i, _)| *i != response_idx)
        .map(|(_, h)| h)
        .collect();
    Dataset::new(Array1::from(y), x, names, family)
}
