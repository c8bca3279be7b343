//! Report bodies, CSV tables and timings, written once at the end of a run.

use std::fs;
use std::path::Path;

use serde::Serialize;
use trinity_core::report::{CheckRow, Report};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Deterministic report body: identical config and seed give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub summary: Summary,
    pub rows: Vec<CheckRow>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, config_hash: &str, seed: u64, report: Report) -> Self {
        let summary = Summary {
            rows: report.rows.len(),
            failed: report.failures().count(),
            skipped: report.rows.iter().filter(|r| r.is_skip()).count(),
        };
        Self {
            tool: "trinity",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config_hash: config_hash.to_string(),
            seed,
            summary,
            rows: report.rows,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// One plottable scenario datum; `tolerance` and `pass` are blank for plain data.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioRow {
    pub scenario: String,
    pub parameter: String,
    pub quantity: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl ScenarioRow {
    pub fn data(scenario: &str, parameter: String, quantity: &str, value: f64) -> Self {
        Self { scenario: scenario.into(), parameter, quantity: quantity.into(), value, tolerance: None, pass: None }
    }

    pub fn checked(scenario: &str, parameter: String, quantity: &str, defect: f64, tolerance: f64) -> Self {
        Self {
            scenario: scenario.into(),
            parameter,
            quantity: quantity.into(),
            value: defect,
            tolerance: Some(tolerance),
            pass: Some(defect.is_finite() && defect <= tolerance),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
}

/// Wall-clock seconds per stage, kept out of the report body.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub stages: Vec<Stage>,
    pub total_seconds: f64,
}

impl Timings {
    pub fn record(&mut self, stage: &str, seconds: f64) {
        self.stages.push(Stage { name: stage.to_string(), seconds });
        self.total_seconds += seconds;
    }
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn csv_string<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(!rows.is_empty()).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Check rows as CSV with columns `name, anchor, defect, tolerance, pass, note`.
pub fn report_csv(report: &RunReport) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Flat<'a> {
        name: &'a str,
        anchor: &'a str,
        defect: f64,
        tolerance: f64,
        pass: bool,
        note: &'a str,
    }
    let rows: Vec<Flat> = report
        .rows
        .iter()
        .map(|r| Flat { name: &r.name, anchor: &r.anchor, defect: r.defect, tolerance: r.tolerance, pass: r.pass, note: r.note.as_deref().unwrap_or("") })
        .collect();
    csv_string(&rows, &["name", "anchor", "defect", "tolerance", "pass", "note"])
}

/// Scenario rows as CSV with columns `scenario, parameter, quantity, value, tolerance, pass`.
pub fn scenario_csv(rows: &[ScenarioRow]) -> Result<String, CliError> {
    csv_string(rows, &["scenario", "parameter", "quantity", "value", "tolerance", "pass"])
}

pub fn timings_json(t: &Timings) -> String {
    serde_json::to_string_pretty(t).expect("timings serialize") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layouts() {
        let mut r = Report::new();
        r.check("a", "x = y", 1e-12, 1e-9);
        let body = report_csv(&RunReport::new("verify", "h", 1, r)).unwrap();
        assert!(body.starts_with("name,anchor,defect,tolerance,pass,note\n"));
        let rows = [ScenarioRow::data("p", "d=0".into(), "probability", 0.5), ScenarioRow::checked("p", "d=0".into(), "defect", 0.0, 1e-9)];
        let body = scenario_csv(&rows).unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines[0], "scenario,parameter,quantity,value,tolerance,pass");
        assert_eq!(lines[1], "p,d=0,probability,0.5,,");
        assert_eq!(lines[2], "p,d=0,defect,0.0,1e-9,true");
        assert_eq!(scenario_csv(&[]).unwrap(), "scenario,parameter,quantity,value,tolerance,pass\n");
    }
}
