//! Margin rows, their reduction, and JSON/CSV rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use slicereg::Quaternion;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Most violations listed individually in a report; the count is always exact.
pub const MAX_LISTED_VIOLATIONS: usize = 100;

/// One signed margin observed on one function, optionally at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub function: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<Quaternion>,
    pub inequality: String,
    pub statement: String,
    pub index: usize,
    pub margin: f64,
    pub allowance: f64,
    pub tolerance: f64,
}

impl Row {
    /// Margin plus its truncation allowance; the row fails below `-tolerance`.
    pub fn slack(&self) -> f64 {
        self.margin + self.allowance
    }

    pub fn holds(&self) -> bool {
        self.slack() >= -self.tolerance
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{} [{}]", self.inequality, self.statement);
        if self.index > 0 {
            let _ = write!(s, " at n={}", self.index);
        }
        let _ = write!(s, " in function {}", self.function);
        if let Some(q) = self.q {
            let _ = write!(s, " at q={q}");
        }
        let _ = write!(s, ": margin {:e}, allowance {:e}", self.margin, self.allowance);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySummary {
    pub samples: usize,
    pub min_margin: f64,
    pub min_slack: f64,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginReport<'a, E: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: &'a RunConfig,
    pub inputs: Vec<String>,
    pub functions: E,
    pub passed: bool,
    pub margins: BTreeMap<String, FamilySummary>,
    pub worst_case: Option<Row>,
    pub violation_count: usize,
    pub violations: Vec<Row>,
}

pub struct Reduced {
    pub margins: BTreeMap<String, FamilySummary>,
    pub worst_case: Option<Row>,
    pub violation_count: usize,
    pub violations: Vec<Row>,
}

impl Reduced {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Min-reduction over rows in their given order; ties keep the first row.
pub fn reduce(rows: &[Row]) -> Reduced {
    let mut margins: BTreeMap<String, FamilySummary> = BTreeMap::new();
    let mut worst: Option<&Row> = None;
    let mut violations = Vec::new();
    let mut violation_count = 0;
    for row in rows {
        let entry = margins.entry(row.inequality.clone()).or_insert(FamilySummary {
            samples: 0,
            min_margin: f64::INFINITY,
            min_slack: f64::INFINITY,
            violations: 0,
        });
        entry.samples += 1;
        entry.min_margin = entry.min_margin.min(row.margin);
        entry.min_slack = entry.min_slack.min(row.slack());
        if !row.holds() {
            entry.violations += 1;
            violation_count += 1;
            if violations.len() < MAX_LISTED_VIOLATIONS {
                violations.push(row.clone());
            }
        }
        if worst.is_none_or(|w| row.slack() + row.tolerance < w.slack() + w.tolerance) {
            worst = Some(row);
        }
    }
    Reduced {
        margins,
        worst_case: worst.cloned(),
        violation_count,
        violations,
    }
}

pub fn margin_rows_csv(rows: &[Row]) -> String {
    let mut out = String::from("function,point,inequality,index,q0,q1,q2,q3,margin,allowance,tolerance,holds\n");
    for r in rows {
        let point = r.point.map(|p| p.to_string()).unwrap_or_default();
        let q = match r.q {
            Some(q) => q.to_array().map(|x| x.to_string()).join(","),
            None => ",,,".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.function,
            point,
            r.inequality,
            r.index,
            q,
            r.margin,
            r.allowance,
            r.tolerance,
            r.holds()
        );
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes to `--out` when given, otherwise to stdout.
pub fn emit(config: &RunConfig, text: &str) -> Result<()> {
    match &config.output_path {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn render<T: Serialize>(config: &RunConfig, report: &T, rows: &[Row]) -> String {
    match config.format {
        Format::Json => to_json(report),
        Format::Csv => margin_rows_csv(rows),
    }
}
