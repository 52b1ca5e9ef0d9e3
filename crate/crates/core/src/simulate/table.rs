//! Replicate-level result rows, their CSV form, and aggregated summaries.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::metrics::SelectionMetrics;
use super::stats::{mean, paired_t_test, se};
use crate::error::{invalid, Result};

/// Bumped whenever a column is added, removed, or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// One framework fitted to one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub schema_version: u32,
    pub experiment: String,
    pub setting: String,
    pub replicate: usize,
    pub framework: String,
    pub converged: bool,
    pub noise_sd: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub n_selected: usize,
    pub n_true: usize,
    pub fdr_overall: f64,
    pub fdr_main: f64,
    pub fdr_inter: f64,
    pub type1_overall: usize,
    pub type1_main: usize,
    pub type1_inter: usize,
    pub type2_overall: usize,
    pub type2_main: usize,
    pub type2_inter: usize,
    /// Prediction RMSE on fresh rows (interactions) or estimation RMSE on
    /// the evaluation grid (poly).
    pub rmse: f64,
}

impl SimRow {
    pub fn new(
        experiment: &str,
        setting: &str,
        replicate: usize,
        framework: &str,
        noise_sd: f64,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            setting: setting.into(),
            replicate,
            framework: framework.into(),
            converged: false,
            noise_sd,
            gamma: f64::NAN,
            lambda: f64::NAN,
            n_selected: 0,
            n_true: 0,
            fdr_overall: f64::NAN,
            fdr_main: f64::NAN,
            fdr_inter: f64::NAN,
            type1_overall: 0,
            type1_main: 0,
            type1_inter: 0,
            type2_overall: 0,
            type2_main: 0,
            type2_inter: 0,
            rmse: f64::NAN,
        }
    }

    pub fn with_selection(mut self, m: &SelectionMetrics) -> Self {
        self.n_selected = m.n_selected;
        self.n_true = m.n_true;
        self.fdr_overall = m.fdr_overall;
        self.fdr_main = m.fdr_main;
        self.fdr_inter = m.fdr_inter;
        self.type1_overall = m.type1_overall;
        self.type1_main = m.type1_main;
        self.type1_inter = m.type1_inter;
        self.type2_overall = m.type2_overall;
        self.type2_main = m.type2_main;
        self.type2_inter = m.type2_inter;
        self
    }

    /// Named metric values, in column order.
    pub fn metrics(&self) -> [(&'static str, f64); 11] {
        [
            ("n_selected", self.n_selected as f64),
            ("fdr_overall", self.fdr_overall),
            ("fdr_main", self.fdr_main),
            ("fdr_inter", self.fdr_inter),
            ("type1_overall", self.type1_overall as f64),
            ("type1_main", self.type1_main as f64),
            ("type1_inter", self.type1_inter as f64),
            ("type2_overall", self.type2_overall as f64),
            ("type2_main", self.type2_main as f64),
            ("type2_inter", self.type2_inter as f64),
            ("rmse", self.rmse),
        ]
    }
}

pub fn write_rows<W: Write>(rows: &[SimRow], w: W) -> Result<()> {
    write_csv(rows, w)
}

/// Read rows, rejecting files written under another schema version.
pub fn read_rows<R: Read>(r: R) -> Result<Vec<SimRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("schema_version") {
        return invalid("not a simulation result file (missing schema_version column)");
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let version: u32 = rec.get(0).unwrap_or("").parse().unwrap_or(0);
        if version != SCHEMA_VERSION {
            return invalid(format!(
                "schema version {version} found, expected {SCHEMA_VERSION}"
            ));
        }
        rows.push(rec.deserialize(Some(&headers))?);
    }
    Ok(rows)
}

/// Mean and standard error of one metric for one framework in one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub setting: String,
    pub framework: String,
    pub metric: String,
    pub n: usize,
    /// Replicates dropped because some framework in the setting did not converge.
    pub n_excluded: usize,
    pub mean: f64,
    pub se: f64,
}

/// Aggregate rows per (experiment, setting, framework, metric).
///
/// Replicates where any framework failed to converge are excluded from
/// every framework of that setting so comparisons stay paired. When an
/// `oracle` framework is present, `rmse_excess` (rmse minus the oracle's
/// rmse on the same replicate) is reported as well.
pub fn summarize(rows: &[SimRow]) -> Vec<SummaryRow> {
    type Key = (String, String);
    let mut by_setting: BTreeMap<Key, Vec<&SimRow>> = BTreeMap::new();
    for r in rows {
        by_setting
            .entry((r.experiment.clone(), r.setting.clone()))
            .or_default()
            .push(r);
    }
    let mut out = Vec::new();
    for ((experiment, setting), rs) in by_setting {
        let all_reps: BTreeSet<usize> = rs.iter().map(|r| r.replicate).collect();
        let bad: BTreeSet<usize> = rs
            .iter()
            .filter(|r| !r.converged)
            .map(|r| r.replicate)
            .collect();
        let n_excluded = bad.len();
        let oracle: BTreeMap<usize, f64> = rs
            .iter()
            .filter(|r| r.framework == "oracle")
            .map(|r| (r.replicate, r.rmse))
            .collect();
        let mut frameworks: Vec<&str> = Vec::new();
        for r in &rs {
            if !frameworks.contains(&r.framework.as_str()) {
                frameworks.push(&r.framework);
            }
        }
        for fw in frameworks {
            let kept: Vec<&&SimRow> = rs
                .iter()
                .filter(|r| r.framework == fw && !bad.contains(&r.replicate))
                .collect();
            let mut series: Vec<(&str, Vec<f64>)> = SimRow::new("", "", 0, "", 0.0)
                .metrics()
                .iter()
                .map(|(name, _)| (*name, Vec::with_capacity(kept.len())))
                .collect();
            for r in &kept {
                for (slot, (_, v)) in series.iter_mut().zip(r.metrics()) {
                    slot.1.push(v);
                }
            }
            if !oracle.is_empty() {
                let excess = kept
                    .iter()
                    .filter_map(|r| oracle.get(&r.replicate).map(|o| r.rmse - o))
                    .collect();
                series.push(("rmse_excess", excess));
            }
            for (metric, values) in series {
                out.push(SummaryRow {
                    experiment: experiment.clone(),
                    setting: setting.clone(),
                    framework: fw.to_string(),
                    metric: metric.to_string(),
                    n: values.len(),
                    n_excluded,
                    mean: mean(&values),
                    se: se(&values),
                });
            }
        }
        debug_assert!(n_excluded <= all_reps.len());
    }
    out
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], w: W) -> Result<()> {
    write_csv(rows, w)
}

/// JSON summary written next to each result CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub schema_version: u32,
    pub experiment: String,
    pub n_rows: usize,
    pub n_unconverged: usize,
    pub config: serde_json::Value,
    pub summary: Vec<SummaryRow>,
}

impl SimSummary {
    pub fn new(experiment: &str, config: serde_json::Value, rows: &[SimRow]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.into(),
            n_rows: rows.len(),
            n_unconverged: rows.iter().filter(|r| !r.converged).count(),
            config,
            summary: summarize(rows),
        }
    }
}

/// Values of one metric per replicate for `framework` in `setting`,
/// restricted to replicates where every framework converged. Replicates
/// are returned in ascending order so two frameworks line up for pairing.
pub fn paired_series(
    rows: &[SimRow],
    setting: &str,
    framework: &str,
    metric: &str,
) -> Vec<(usize, f64)> {
    let bad: BTreeSet<usize> = rows
        .iter()
        .filter(|r| r.setting == setting && !r.converged)
        .map(|r| r.replicate)
        .collect();
    let mut out: Vec<(usize, f64)> = rows
        .iter()
        .filter(|r| r.setting == setting && r.framework == framework && !bad.contains(&r.replicate))
        .filter_map(|r| {
            r.metrics()
                .iter()
                .find(|(m, _)| *m == metric)
                .map(|(_, v)| (r.replicate, *v))
        })
        .collect();
    out.sort_by_key(|(rep, _)| *rep);
    out
}

/// Paired comparison of two frameworks on one metric within a setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub experiment: String,
    pub setting: String,
    pub framework_a: String,
    pub framework_b: String,
    pub metric: String,
    pub n: usize,
    /// Mean of `a - b` over replicates where every framework converged.
    pub mean_diff: f64,
    pub t: f64,
    pub p_value: f64,
}

/// Metrics compared pairwise by [`compare`].
pub const COMPARED_METRICS: [&str; 4] = ["rmse", "fdr_overall", "type1_inter", "type2_overall"];

/// Two-sided paired t-tests between every pair of frameworks in each setting.
pub fn compare(rows: &[SimRow]) -> Vec<Comparison> {
    let mut settings: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r.experiment.as_str(), r.setting.as_str()))
        .collect();
    settings.sort_unstable();
    settings.dedup();
    let mut out = Vec::new();
    for (experiment, setting) in settings {
        let subset: Vec<SimRow> = rows
            .iter()
            .filter(|r| r.experiment == experiment && r.setting == setting)
            .cloned()
            .collect();
        let mut frameworks: Vec<&str> = Vec::new();
        for r in &subset {
            if !frameworks.contains(&r.framework.as_str()) {
                frameworks.push(&r.framework);
            }
        }
        for (i, a) in frameworks.iter().enumerate() {
            for b in &frameworks[i + 1..] {
                for metric in COMPARED_METRICS {
                    let xa = paired_series(&subset, setting, a, metric);
                    let xb = paired_series(&subset, setting, b, metric);
                    let ya: BTreeMap<usize, f64> = xb.into_iter().collect();
                    let (va, vb): (Vec<f64>, Vec<f64>) = xa
                        .iter()
                        .filter_map(|(rep, v)| ya.get(rep).map(|w| (*v, *w)))
                        .unzip();
                    let t = paired_t_test(&va, &vb);
                    out.push(Comparison {
                        experiment: experiment.to_string(),
                        setting: setting.to_string(),
                        framework_a: a.to_string(),
                        framework_b: b.to_string(),
                        metric: metric.to_string(),
                        n: t.n,
                        mean_diff: t.mean_diff,
                        t: t.t,
                        p_value: t.p_value,
                    });
                }
            }
        }
    }
    out
}

/// Error on repeated (experiment, setting, replicate, framework) keys, as
/// produced by merging the same run twice.
pub fn check_unique(rows: &[SimRow]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in rows {
        if !seen.insert((&r.experiment, &r.setting, r.replicate, &r.framework)) {
            return invalid(format!(
                "duplicate row: {} {} replicate {} framework {}",
                r.experiment, r.setting, r.replicate, r.framework
            ));
        }
    }
    Ok(())
}

pub fn write_csv<W: Write, T: Serialize>(rows: &[T], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}
