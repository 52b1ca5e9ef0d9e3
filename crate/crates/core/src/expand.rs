//! Derived features (pairwise interactions, polynomial powers) and the
//! hierarchy bookkeeping for interaction effects.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2, Axis, ShapeBuilder};
use serde::{Deserialize, Serialize};

use crate::data::design::{BaseScaling, ColumnMeta, Group, GroupedDesign};
use crate::data::standardize::{is_constant, mean_sd, standardize};
use crate::data::Dataset;
use crate::error::{invalid, Result, SrlError};

/// Highest polynomial degree accepted; beyond this the powers of a bounded
/// feature are numerically indistinguishable after standardization.
pub const MAX_POLY_DEGREE: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExpansionKind {
    /// Original features only, one group.
    None,
    /// Main effects followed by all pairwise products.
    Interactions,
    /// Degree-k powers of every feature in group k, k = 1..=max_degree.
    Polynomials { max_degree: u32 },
}

/// Whether products and powers are formed from raw or standardized features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductOrigin {
    #[default]
    Raw,
    Standardized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    pub kind: ExpansionKind,
    #[serde(default)]
    pub origin: ProductOrigin,
}

impl ExpansionSpec {
    pub fn none() -> Self {
        Self {
            kind: ExpansionKind::None,
            origin: ProductOrigin::Raw,
        }
    }

    pub fn interactions() -> Self {
        Self {
            kind: ExpansionKind::Interactions,
            origin: ProductOrigin::Raw,
        }
    }

    pub fn polynomials(max_degree: u32) -> Result<Self> {
        if max_degree < 1 {
            return invalid("polynomial degree must be at least 1");
        }
        if max_degree > MAX_POLY_DEGREE {
            return invalid(format!(
                "polynomial degree {max_degree} exceeds the maximum of {MAX_POLY_DEGREE}"
            ));
        }
        Ok(Self {
            kind: ExpansionKind::Polynomials { max_degree },
            origin: ProductOrigin::Raw,
        })
    }

    pub fn with_origin(mut self, origin: ProductOrigin) -> Self {
        self.origin = origin;
        self
    }
}

impl FromStr for ExpansionSpec {
    type Err = SrlError;

    /// `none`, `interactions`, or `poly:m`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::none()),
            "interactions" => Ok(Self::interactions()),
            _ => match s.strip_prefix("poly:") {
                Some(m) => {
                    let m: u32 = m.parse().map_err(|_| {
                        SrlError::InvalidInput(format!("bad polynomial degree '{m}'"))
                    })?;
                    Self::polynomials(m)
                }
                None => invalid(format!(
                    "unknown expansion '{s}' (expected none, interactions or poly:m)"
                )),
            },
        }
    }
}

impl fmt::Display for ExpansionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ExpansionKind::None => f.write_str("none"),
            ExpansionKind::Interactions => f.write_str("interactions"),
            ExpansionKind::Polynomials { max_degree } => write!(f, "poly:{max_degree}"),
        }
    }
}

fn candidate_groups(p: usize, kind: ExpansionKind) -> Vec<(String, Vec<ColumnMeta>)> {
    let mains = || (0..p).map(|feature| ColumnMeta::Main { feature }).collect();
    match kind {
        ExpansionKind::None => vec![("main".into(), mains())],
        ExpansionKind::Interactions => {
            let pairs = (0..p)
                .flat_map(|first| {
                    (first + 1..p).map(move |second| ColumnMeta::Interaction { first, second })
                })
                .collect();
            vec![("main".into(), mains()), ("interaction".into(), pairs)]
        }
        ExpansionKind::Polynomials { max_degree } => (1..=max_degree)
            .map(|degree| {
                let cols = (0..p)
                    .map(|feature| ColumnMeta::Polynomial { feature, degree })
                    .collect();
                (format!("degree_{degree}"), cols)
            })
            .collect(),
    }
}

/// Expand raw features according to `spec`, then standardize every derived column.
pub fn expand(
    x: ArrayView2<f64>,
    feature_names: &[String],
    spec: ExpansionSpec,
) -> Result<GroupedDesign> {
    let (n, p) = x.dim();
    if p < 1 {
        return invalid("need at least one feature");
    }
    if feature_names.len() != p {
        return Err(SrlError::DimensionMismatch {
            expected: p,
            found: feature_names.len(),
        });
    }
    if let ExpansionKind::Polynomials { max_degree } = spec.kind {
        ExpansionSpec::polynomials(max_degree)?;
    }
    let base = match spec.origin {
        ProductOrigin::Raw => None,
        ProductOrigin::Standardized => {
            let (centers, scales) = x
                .axis_iter(Axis(1))
                .map(|col| {
                    let (m, s) = mean_sd(col);
                    (m, if is_constant(m, s) { 1.0 } else { s })
                })
                .unzip();
            Some(BaseScaling { centers, scales })
        }
    };

    let groups = candidate_groups(p, spec.kind);
    let candidates: Vec<(usize, ColumnMeta)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, (_, metas))| metas.iter().map(move |m| (g, *m)))
        .collect();
    let qc = candidates.len();
    let mut raw = Vec::with_capacity(n * qc);
    for (_, meta) in &candidates {
        raw.extend(meta.evaluate(x, base.as_ref()));
    }
    let raw = Array2::from_shape_vec((n, qc).f(), raw).expect("shape matches data length");
    let (z, standardization) = standardize(raw.view())?;

    let mut out_groups: Vec<Group> = groups
        .iter()
        .enumerate()
        .map(|(g, (label, _))| Group {
            id: g + 1,
            label: label.clone(),
            columns: Vec::new(),
        })
        .collect();
    let mut column_meta = Vec::with_capacity(z.ncols());
    let mut column_group = Vec::with_capacity(z.ncols());
    for (i, &c) in standardization.retained.iter().enumerate() {
        let (g, meta) = candidates[c];
        out_groups[g].columns.push(i);
        column_meta.push(meta);
        column_group.push(g);
    }
    let column_names = column_meta.iter().map(|m| m.name(feature_names)).collect();
    Ok(GroupedDesign {
        z,
        groups: out_groups,
        column_meta,
        column_names,
        column_group,
        standardization,
        base,
        expansion: spec,
        feature_names: feature_names.to_vec(),
    })
}

/// Main effects (group 1) followed by all C(p,2) pairwise products (group 2).
pub fn expand_interactions(dataset: &Dataset) -> Result<GroupedDesign> {
    expand(
        dataset.x.view(),
        &dataset.feature_names,
        ExpansionSpec::interactions(),
    )
}

/// Group k holds the degree-k power of every feature, k = 1..=m.
pub fn expand_polynomials(dataset: &Dataset, m: u32) -> Result<GroupedDesign> {
    expand(
        dataset.x.view(),
        &dataset.feature_names,
        ExpansionSpec::polynomials(m)?,
    )
}

/// Relationship of an interaction to the active main effects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HierarchyClass {
    /// Both parents active.
    Strong,
    /// Exactly one parent active.
    Weak,
    /// Neither parent active.
    Non,
}

impl HierarchyClass {
    pub const ALL: [HierarchyClass; 3] = [Self::Strong, Self::Weak, Self::Non];
}

pub fn classify_interaction(pair: (usize, usize), active_mains: &[usize]) -> HierarchyClass {
    debug_assert_ne!(pair.0, pair.1);
    let a = active_mains.contains(&pair.0);
    let b = active_mains.contains(&pair.1);
    match (a, b) {
        (true, true) => HierarchyClass::Strong,
        (true, false) | (false, true) => HierarchyClass::Weak,
        (false, false) => HierarchyClass::Non,
    }
}

pub(crate) fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Number of pairs admissible under each hierarchy rule, given `s` active
/// mains out of `p`. The weak count includes strong pairs.
pub fn count_admissible_interactions(p: u64, s: u64, class: HierarchyClass) -> Result<u64> {
    if s > p {
        return invalid(format!("active count {s} exceeds feature count {p}"));
    }
    Ok(match class {
        HierarchyClass::Strong => choose2(s),
        HierarchyClass::Weak => choose2(s) + s * (p - s),
        HierarchyClass::Non => choose2(p - s),
    })
}

/// Sizes of the mutually exclusive strong / weak-only / non bins.
pub fn exclusive_bin_sizes(p: u64, s: u64) -> Result<[u64; 3]> {
    if s > p {
        return invalid(format!("active count {s} exceeds feature count {p}"));
    }
    Ok([choose2(s), s * (p - s), choose2(p - s)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Family;
    use ndarray::Array1;
    use rand::{Rng, SeedableRng};

    fn uniform_dataset(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = Array2::from_shape_fn((n, p), |_| rng.random::<f64>());
        let y = Array1::from_shape_fn(n, |_| rng.random::<f64>());
        Dataset::with_default_names(y, x, Family::Gaussian).unwrap()
    }

    #[test]
    fn interaction_group_sizes() {
        assert_eq!(
            expand_interactions(&uniform_dataset(50, 20, 1))
                .unwrap()
                .group_sizes(),
            vec![20, 190]
        );
        assert_eq!(
            expand_interactions(&uniform_dataset(10, 2, 1))
                .unwrap()
                .group_sizes(),
            vec![2, 1]
        );
        assert_eq!(
            expand_interactions(&uniform_dataset(10, 1, 1))
                .unwrap()
                .group_sizes(),
            vec![1, 0]
        );
    }

    #[test]
    fn interaction_meta_pairs_ordered_and_unique() {
        let d = expand_interactions(&uniform_dataset(30, 7, 2)).unwrap();
        assert_eq!(d.n_columns(), 7 + 21);
        let mut seen = std::collections::HashSet::new();
        for m in &d.column_meta[7..] {
            match *m {
                ColumnMeta::Interaction { first, second } => {
                    assert!(first < second);
                    assert!(seen.insert((first, second)));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
        assert_eq!(d.column_names[7], "x1:x2");
    }

    #[test]
    fn products_are_formed_from_raw_columns() {
        let ds = uniform_dataset(30, 3, 4);
        let d = expand_interactions(&ds).unwrap();
        let col = 3; // x1*x2
        let c = d.standardization.centers[col];
        let s = d.standardization.scales[col];
        for i in 0..30 {
            let raw = ds.x[[i, 0]] * ds.x[[i, 1]];
            assert!((d.z[[i, col]] - (raw - c) / s).abs() < 1e-12);
        }
        let d_std = expand(
            ds.x.view(),
            &ds.feature_names,
            ExpansionSpec::interactions().with_origin(ProductOrigin::Standardized),
        )
        .unwrap();
        assert!((0..30).any(|i| (d_std.z[[i, col]] - d.z[[i, col]]).abs() > 1e-6));
    }

    #[test]
    fn polynomial_groups() {
        let d = expand_polynomials(&uniform_dataset(40, 1, 3), 6).unwrap();
        assert_eq!(d.group_sizes(), vec![1; 6]);
        assert_eq!(
            d.groups.iter().map(|g| g.id).collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5, 6]
        );
        assert_eq!(
            d.column_names,
            vec!["x1", "x1^2", "x1^3", "x1^4", "x1^5", "x1^6"]
        );
        assert_eq!(
            expand_polynomials(&uniform_dataset(40, 1, 3), 1)
                .unwrap()
                .group_sizes(),
            vec![1]
        );
        assert_eq!(
            expand_polynomials(&uniform_dataset(40, 3, 3), 2)
                .unwrap()
                .group_sizes(),
            vec![3, 3]
        );
        assert!(expand_polynomials(&uniform_dataset(40, 1, 3), 0).is_err());
        assert!(expand_polynomials(&uniform_dataset(40, 1, 3), 13).is_err());
    }

    #[test]
    fn polynomial_scale_invariance() {
        let ds = uniform_dataset(40, 1, 5);
        let doubled = Dataset::new(
            ds.y.clone(),
            &ds.x * 2.0,
            ds.feature_names.clone(),
            ds.family,
        )
        .unwrap();
        let a = expand_polynomials(&ds, 6).unwrap();
        let b = expand_polynomials(&doubled, 6).unwrap();
        assert!((&a.z - &b.z).iter().all(|d| d.abs() < 1e-9));
    }

    #[test]
    fn transform_replays_training_design() {
        let ds = uniform_dataset(25, 4, 6);
        for spec in [
            ExpansionSpec::interactions(),
            ExpansionSpec::polynomials(3).unwrap(),
            ExpansionSpec::interactions().with_origin(ProductOrigin::Standardized),
        ] {
            let d = expand(ds.x.view(), &ds.feature_names, spec).unwrap();
            let t = d.transform(ds.x.view()).unwrap();
            assert!((&t - &d.z).iter().all(|v| v.abs() < 1e-12));
        }
        let d = expand_interactions(&ds).unwrap();
        assert!(d.transform(ds.x.slice(ndarray::s![.., 0..3])).is_err());
    }

    #[test]
    fn expansion_parsing() {
        assert_eq!(
            "none".parse::<ExpansionSpec>().unwrap(),
            ExpansionSpec::none()
        );
        assert_eq!(
            "interactions".parse::<ExpansionSpec>().unwrap(),
            ExpansionSpec::interactions()
        );
        assert_eq!(
            "poly:6".parse::<ExpansionSpec>().unwrap().to_string(),
            "poly:6"
        );
        assert!("poly:0".parse::<ExpansionSpec>().is_err());
        assert!("cubic".parse::<ExpansionSpec>().is_err());
    }

    #[test]
    fn classification() {
        let active = [1, 2];
        assert_eq!(
            classify_interaction((1, 2), &active),
            HierarchyClass::Strong
        );
        assert_eq!(classify_interaction((1, 7), &active), HierarchyClass::Weak);
        assert_eq!(classify_interaction((6, 7), &active), HierarchyClass::Non);
    }

    #[test]
    fn admissible_counts() {
        assert_eq!(
            count_admissible_interactions(30, 3, HierarchyClass::Strong).unwrap(),
            3
        );
        assert_eq!(
            count_admissible_interactions(30, 3, HierarchyClass::Weak).unwrap(),
            84
        );
        assert_eq!(
            count_admissible_interactions(20, 5, HierarchyClass::Non).unwrap(),
            105
        );
        assert_eq!(exclusive_bin_sizes(20, 5).unwrap(), [10, 75, 105]);
        assert!(count_admissible_interactions(3, 4, HierarchyClass::Weak).is_err());
    }

    #[test]
    fn exclusive_bins_partition_all_pairs() {
        for p in 0..=50u64 {
            for s in 0..=p {
                let [a, b, c] = exclusive_bin_sizes(p, s).unwrap();
                assert_eq!(a + b + c, choose2(p), "p={p} s={s}");
            }
        }
    }

    #[test]
    fn classification_agrees_with_counts() {
        let p = 12;
        let active = [0, 3, 4, 9];
        let mut counts = [0u64; 3];
        for j in 0..p {
            for l in j + 1..p {
                let idx = match classify_interaction((j, l), &active) {
                    HierarchyClass::Strong => 0,
                    HierarchyClass::Weak => 1,
                    HierarchyClass::Non => 2,
                };
                counts[idx] += 1;
            }
        }
        assert_eq!(counts, exclusive_bin_sizes(p as u64, 4).unwrap());
    }
}
