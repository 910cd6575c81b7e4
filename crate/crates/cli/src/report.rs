//! Stats records, written as line-delimited JSON.

use std::io::{self, Write};

use hyperseries::linspace::{ConstantEvaluation, SeriesRun};
use hyperseries::Algorithm;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub name: String,
    pub coeff: String,
    pub bits: u64,
    pub r: u64,
    pub k1: Option<u64>,
    pub r1: Option<u64>,
    pub m: Option<u64>,
    pub omega: Option<u64>,
    pub max_state_bits: Option<u64>,
}

impl From<&SeriesRun> for SeriesReport {
    fn from(run: &SeriesRun) -> Self {
        Self {
            name: run.name.clone(),
            coeff: run.coeff.to_string(),
            bits: run.bits,
            r: run.r,
            k1: run.plan.as_ref().map(|p| p.k1),
            r1: run.plan.as_ref().map(|p| p.r1),
            m: run.plan.as_ref().map(|p| p.m),
            omega: run.plan.as_ref().map(|p| p.omega),
            max_state_bits: run.stats.as_ref().map(|s| s.max_state_bits),
        }
    }
}

/// One evaluation. The top-level `r`, `k1`, `r1`, `m` describe the series
/// with the most terms; every series is listed under `series`. The block
/// fields are null for the classical algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub constant: String,
    pub n: u64,
    pub algorithm: String,
    pub r: u64,
    pub k1: Option<u64>,
    pub r1: Option<u64>,
    pub m: Option<u64>,
    pub guard_bits: u64,
    /// Seconds; the minimum over `repeats` runs.
    pub wall_time: f64,
    pub repeats: u32,
    /// Peak heap bytes held by the evaluation; null without accounting.
    pub peak_mem: Option<u64>,
    /// Process resident high-water mark in bytes, informational.
    pub rss_hwm: Option<u64>,
    pub series: Vec<SeriesReport>,
}

/// Cost of one evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub wall_time: f64,
    pub repeats: u32,
    pub peak_mem: Option<u64>,
    pub rss_hwm: Option<u64>,
}

impl EvalReport {
    pub fn new(
        constant: &str,
        n: u64,
        algorithm: Algorithm,
        eval: &ConstantEvaluation,
        cost: Measurement,
    ) -> Self {
        let series: Vec<SeriesReport> = eval.series.iter().map(SeriesReport::from).collect();
        let lead = series
            .iter()
            .max_by_key(|s| s.r)
            .expect("evaluations cover at least one series");
        Self {
            constant: constant.to_string(),
            n,
            algorithm: algorithm.as_str().to_string(),
            r: lead.r,
            k1: lead.k1,
            r1: lead.r1,
            m: lead.m,
            guard_bits: eval.guard_bits,
            wall_time: cost.wall_time,
            repeats: cost.repeats,
            peak_mem: cost.peak_mem,
            rss_hwm: cost.rss_hwm,
            series,
        }
    }
}

/// Growth between consecutive sweep points for one algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub constant: String,
    pub algorithm: String,
    pub n_from: u64,
    pub n_to: u64,
    pub time_ratio: f64,
    pub mem_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Record {
    Run(EvalReport),
    Ratio(RatioReport),
}

pub fn write_records<'a>(
    out: &mut dyn Write,
    records: impl IntoIterator<Item = &'a Record>,
) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_records(text: &str) -> serde_json::Result<Vec<Record>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
