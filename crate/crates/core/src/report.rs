//! Check rows collected by the verification suites.

use serde::{Deserialize, Serialize};

/// One verified identity: a defect compared against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub anchor: String,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, defect: f64, tolerance: f64) -> Self {
        let pass = defect.is_finite() && defect <= tolerance;
        Self { name: name.into(), anchor: anchor.into(), defect, tolerance, pass, note: None }
    }

    /// A row for a check that could not run; it passes and says why.
    pub fn skipped(name: impl Into<String>, anchor: impl Into<String>, reason: impl Into<String>) -> Self {
        Self { name: name.into(), anchor: anchor.into(), defect: 0.0, tolerance: 0.0, pass: true, note: Some(format!("skipped: {}", reason.into())) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_skip(&self) -> bool {
        self.note.as_deref().is_some_and(|n| n.starts_with("skipped"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<CheckRow>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check(&mut self, name: impl Into<String>, anchor: impl Into<String>, defect: f64, tolerance: f64) -> &mut CheckRow {
        self.rows.push(CheckRow::new(name, anchor, defect, tolerance));
        self.rows.last_mut().expect("just pushed")
    }

    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Replaces every tolerance (skipped rows keep passing) and recomputes `pass`.
    pub fn override_tolerance(&mut self, tol: f64) {
        for r in &mut self.rows {
            if r.is_skip() {
                continue;
            }
            r.tolerance = tol;
            r.pass = r.defect.is_finite() && r.defect <= tol;
        }
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        for r in &mut self.rows {
            r.name = format!("{prefix}/{}", r.name);
        }
        self
    }
}

/// Running maximum that treats NaN as a failure.
pub fn max_defect(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, x| if x.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(x) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_and_override() {
        let mut r = Report::new();
        r.check("a", "x", 1e-12, 1e-10);
        r.check("b", "y", f64::NAN, 1.0);
        r.push(CheckRow::skipped("c", "z", "not applicable"));
        assert!(r.rows[0].pass && !r.rows[1].pass && r.rows[2].pass);
        r.override_tolerance(0.0);
        assert!(!r.rows[0].pass && r.rows[2].pass);
        assert!(max_defect([1.0, f64::NAN, 2.0]).is_nan());
        assert_eq!(max_defect([1.0, 3.0]), 3.0);
    }
}
