use std::fs::File;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use srl_core::simulate::table::write_summary_csv;
use srl_core::simulate::{check_unique, compare, read_rows, summarize, write_csv};

use crate::args::ReportArgs;
use crate::config::{flags, load_config_file, resolve, to_value, usage, Run};

pub const REPORT_FILE: &str = "report.csv";
pub const COMPARISONS_FILE: &str = "comparisons.csv";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub inputs: Vec<PathBuf>,
}

pub fn run(args: ReportArgs) -> Result<()> {
    let file = args
        .common
        .config
        .as_deref()
        .map(|p| load_config_file(p, "report"))
        .transpose()?;
    if args.common.seed.is_some() {
        return usage("report takes no --seed");
    }
    let entries = vec![(
        "inputs",
        (!args.inputs.is_empty()).then(|| to_value(&args.inputs)),
    )];
    let config: ReportConfig = resolve(&ReportConfig::default(), file, flags(entries))?;
    if config.inputs.is_empty() {
        return usage("report needs at least one result file");
    }
    let mut rows = Vec::new();
    for path in &config.inputs {
        let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        rows.extend(read_rows(f).with_context(|| format!("reading {}", path.display()))?);
    }
    check_unique(&rows)?;
    let out = args.common.out.unwrap_or_else(|| PathBuf::from("."));
    let mut run = Run::start("report", &out)?;

    let mut buf = Vec::new();
    write_summary_csv(&summarize(&rows), &mut buf)?;
    run.write(REPORT_FILE, &buf)?;
    let mut buf = Vec::new();
    write_csv(&compare(&rows), &mut buf)?;
    run.write(COMPARISONS_FILE, &buf)?;
    run.finish(None, to_value(&config))
}
