use ndarray::{Array2, ArrayView2, ShapeBuilder};
use serde::{Deserialize, Serialize};

use super::standardize::StandardizationParams;
use crate::error::{Result, SrlError};
use crate::expand::ExpansionSpec;

/// Where a design column came from, in terms of the original feature indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnMeta {
    Main { feature: usize },
    Interaction { first: usize, second: usize },
    Polynomial { feature: usize, degree: u32 },
}

impl ColumnMeta {
    pub fn is_main(&self) -> bool {
        matches!(
            self,
            ColumnMeta::Main { .. } | ColumnMeta::Polynomial { degree: 1, .. }
        )
    }

    pub fn name(&self, feature_names: &[String]) -> String {
        match *self {
            ColumnMeta::Main { feature } => feature_names[feature].clone(),
            ColumnMeta::Interaction { first, second } => {
                format!("{}:{}", feature_names[first], feature_names[second])
            }
            ColumnMeta::Polynomial { feature, degree: 1 } => feature_names[feature].clone(),
            ColumnMeta::Polynomial { feature, degree } => {
                format!("{}^{}", feature_names[feature], degree)
            }
        }
    }

    /// Unstandardized column values for the rows of `x`.
    pub(crate) fn evaluate(&self, x: ArrayView2<f64>, base: Option<&BaseScaling>) -> Vec<f64> {
        let feature = |j: usize| -> Vec<f64> {
            let col = x.column(j);
            match base {
                Some(b) => col
                    .iter()
                    .map(|v| (v - b.centers[j]) / b.scales[j])
                    .collect(),
                None => col.to_vec(),
            }
        };
        match *self {
            ColumnMeta::Main { feature: j } => feature(j),
            ColumnMeta::Interaction { first, second } => feature(first)
                .into_iter()
                .zip(feature(second))
                .map(|(a, b)| a * b)
                .collect(),
            ColumnMeta::Polynomial { feature: j, degree } => feature(j)
                .into_iter()
                .map(|v| v.powi(degree as i32))
                .collect(),
        }
    }
}

/// Per-feature centering applied before forming products, when products are
/// built from standardized rather than raw features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseScaling {
    pub centers: Vec<f64>,
    pub scales: Vec<f64>,
}

/// A penalty group: a contiguous block of design columns sharing one weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    /// 1-based group index k.
    pub id: usize,
    pub label: String,
    pub columns: Vec<usize>,
}

impl Group {
    pub fn size(&self) -> usize {
        self.columns.len()
    }
}

/// Expanded, standardized design matrix with group labels and column provenance.
#[derive(Debug, Clone)]
pub struct GroupedDesign {
    /// n × q, column-major.
    pub z: Array2<f64>,
    pub groups: Vec<Group>,
    pub column_meta: Vec<ColumnMeta>,
    pub column_names: Vec<String>,
    /// Position in `groups` of each column's group.
    pub column_group: Vec<usize>,
    /// Standardization of the candidate expanded columns.
    pub standardization: StandardizationParams,
    pub base: Option<BaseScaling>,
    pub expansion: ExpansionSpec,
    pub feature_names: Vec<String>,
}

impl GroupedDesign {
    pub fn n_obs(&self) -> usize {
        self.z.nrows()
    }

    pub fn n_columns(&self) -> usize {
        self.z.ncols()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Group::size).collect()
    }

    /// Indices of columns that are main effects (degree-1 terms).
    pub fn main_columns(&self) -> Vec<usize> {
        (0..self.n_columns())
            .filter(|&j| self.column_meta[j].is_main())
            .collect()
    }

    /// Replay expansion and standardization on new raw rows.
    pub fn transform(&self, x_new: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x_new.ncols() != self.n_features() {
            return Err(SrlError::DimensionMismatch {
                expected: self.n_features(),
                found: x_new.ncols(),
            });
        }
        let n = x_new.nrows();
        let q = self.n_columns();
        let mut data = Vec::with_capacity(n * q);
        for (i, meta) in self.column_meta.iter().enumerate() {
            let c = self.standardization.centers[i];
            let s = self.standardization.scales[i];
            data.extend(
                meta.evaluate(x_new, self.base.as_ref())
                    .into_iter()
                    .map(|v| (v - c) / s),
            );
        }
        Ok(Array2::from_shape_vec((n, q).f(), data).expect("shape matches data length"))
    }
}
