//! Experiment reports: JSON documents and flat CSV tables.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::stats::{ComparisonVerdict, EstimateCI};

/// Size of a ladder an experiment integrated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderCount {
    pub target: String,
    pub equations: u64,
}

/// One comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub target: String,
    /// B-default set for joint events, empty otherwise.
    pub d: String,
    /// Contagious set of the law, where one applies.
    pub contagious: String,
    pub t: f64,
    pub lhs_kind: String,
    pub lhs: EstimateCI,
    pub rhs_kind: String,
    pub rhs: EstimateCI,
    /// `None` when two distinct deterministic values are compared.
    pub z_score: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl ReportRow {
    pub(crate) fn from_verdict(
        label: &str,
        (lhs_kind, rhs_kind): (&str, &str),
        v: ComparisonVerdict,
    ) -> Self {
        ReportRow {
            label: label.to_owned(),
            target: String::new(),
            d: String::new(),
            contagious: String::new(),
            t: 0.0,
            lhs_kind: lhs_kind.to_owned(),
            lhs: v.lhs,
            rhs_kind: rhs_kind.to_owned(),
            rhs: v.rhs,
            z_score: v.z_score.is_finite().then_some(v.z_score),
            threshold: v.threshold,
            pass: v.pass,
        }
    }

    pub(crate) fn at(mut self, target: impl ToString, t: f64) -> Self {
        self.target = target.to_string();
        self.t = t;
        self
    }

    pub(crate) fn with_d(mut self, d: impl ToString) -> Self {
        self.d = d.to_string();
        self
    }

    pub(crate) fn with_contagious(mut self, c: impl ToString) -> Self {
        self.contagious = c.to_string();
        self
    }
}

/// Everything an experiment produced. Identical inputs give identical
/// reports regardless of the worker count; timings are not recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub model_hash: String,
    pub config_id: String,
    pub seed: u64,
    pub paths: usize,
    pub times: Vec<f64>,
    pub tol: f64,
    pub ladders: Vec<LadderCount>,
    pub rows: Vec<ReportRow>,
    pub pass: bool,
}

impl Report {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.pass).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    /// One CSV row per comparison.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), HarnessError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "suite", "label", "target", "d", "contagious", "t", "lhs_kind", "lhs_mean", "lhs_se",
            "rhs_kind", "rhs_mean", "rhs_se", "z_score", "threshold", "pass",
        ])?;
        for r in &self.rows {
            w.write_record([
                self.suite.clone(),
                r.label.clone(),
                r.target.clone(),
                r.d.clone(),
                r.contagious.clone(),
                r.t.to_string(),
                r.lhs_kind.clone(),
                r.lhs.mean.to_string(),
                r.lhs.std_error.to_string(),
                r.rhs_kind.clone(),
                r.rhs.mean.to_string(),
                r.rhs.std_error.to_string(),
                r.z_score.map_or_else(String::new, |z| z.to_string()),
                r.threshold.to_string(),
                r.pass.to_string(),
            ])?;
        }
        w.flush().map_err(|source| HarnessError::Io {
            path: "<csv>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Pass counts of one stored report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub file: String,
    pub suite: String,
    pub seed: u64,
    pub rows: usize,
    pub passed: usize,
    pub pass: bool,
}

/// Summaries of every `*.json` report in `dir`, in file-name order.
pub fn summarize_dir(dir: &Path) -> Result<Vec<ReportSummary>, HarnessError> {
    let io = |source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    };
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.extension().is_some_and(|e| e == "json"));
    files.sort();
    files
        .iter()
        .map(|p| {
            let r = Report::read(p)?;
            Ok(ReportSummary {
                file: p.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                suite: r.suite.clone(),
                seed: r.seed,
                rows: r.rows.len(),
                passed: r.passed(),
                pass: r.pass,
            })
        })
        .collect()
}
