use std::path::Path;

use anyhow::Result;
use ctstd_core::io::{load_embeddings, write_report};
use ctstd_core::{analyze, MetricsReport};

/// Loads an embeddings CSV, computes the report and writes it to `output`
/// if given. Nothing is written when loading or any metric fails.
pub fn run_analyze(input: &Path, output: Option<&Path>) -> Result<MetricsReport> {
    let set = load_embeddings(input)?;
    let report = analyze(&set)?;
    if let Some(out) = output {
        write_report(&report, out)?;
    }
    Ok(report)
}
