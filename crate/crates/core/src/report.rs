//! Machine-readable verification records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// One verification case: inputs, computed quantities, bounds and margins.
///
/// `pass` holds iff every margin is at least minus its tolerance. Maps are
/// ordered, so serialization is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub case_id: String,
    pub inputs: BTreeMap<String, f64>,
    pub computed: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, f64>,
    pub margins: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(case_id: impl Into<String>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            case_id: case_id.into(),
            inputs: BTreeMap::new(),
            computed: BTreeMap::new(),
            bounds: BTreeMap::new(),
            margins: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            pass: true,
            notes: Vec::new(),
        }
    }

    pub fn input(mut self, key: &str, value: f64) -> Self {
        self.inputs.insert(key.to_string(), value);
        self
    }

    pub fn computed(mut self, key: &str, value: f64) -> Self {
        self.computed.insert(key.to_string(), value);
        self
    }

    pub fn bound(mut self, key: &str, value: f64) -> Self {
        self.bounds.insert(key.to_string(), value);
        self
    }

    /// Record a checked margin; the case fails if `margin < -tolerance`.
    pub fn margin(mut self, key: &str, margin: f64, tolerance: f64) -> Self {
        self.margins.insert(key.to_string(), margin);
        self.tolerances.insert(key.to_string(), tolerance);
        self.pass = self.recompute_pass();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Force a failure that is not expressed as a margin (e.g. a solver error).
    pub fn fail(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self.margins.insert("error".to_string(), f64::NEG_INFINITY);
        self.tolerances.insert("error".to_string(), 0.0);
        self.pass = false;
        self
    }

    fn recompute_pass(&self) -> bool {
        self.margins.iter().all(|(key, m)| {
            let tol = self.tolerances.get(key).copied().unwrap_or(0.0);
            // NaN margins fail
            *m >= -tol
        })
    }

    /// Margin keys whose check fails.
    pub fn failing(&self) -> Vec<&str> {
        self.margins
            .iter()
            .filter(|(key, m)| !(**m >= -self.tolerances.get(*key).copied().unwrap_or(0.0)))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub case_id: String,
    pub pass: bool,
}

/// Totals over a set of reports, sorted by case id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: u32,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
    pub cases: Vec<SummaryEntry>,
}

impl Summary {
    pub fn from_reports(reports: &[VerificationReport]) -> Self {
        let mut cases: Vec<SummaryEntry> = reports
            .iter()
            .map(|r| SummaryEntry {
                case_id: r.case_id.clone(),
                pass: r.pass,
            })
            .collect();
        cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let passed = cases.iter().filter(|c| c.pass).count();
        Self {
            schema: SCHEMA_VERSION,
            total: cases.len(),
            passed,
            failed: cases.len() - passed,
            all_pass: passed == cases.len(),
            cases,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_tracks_margins() {
        let r = VerificationReport::new("x").margin("a", 0.1, 0.0);
        assert!(r.pass);
        let r = r.margin("b", -1e-6, 1e-5);
        assert!(r.pass);
        let r = r.margin("c", -1e-3, 1e-5);
        assert!(!r.pass);
        assert_eq!(r.failing(), vec!["c"]);
        let r = VerificationReport::new("nan").margin("m", f64::NAN, 1.0);
        assert!(!r.pass);
    }

    #[test]
    fn json_is_stable_and_versioned() {
        let build = || {
            VerificationReport::new("case")
                .input("z", 1.0)
                .input("a", 2.0)
                .computed("lambda1", 2.5)
                .margin("gap", 0.5, 1e-6)
                .note("n")
        };
        let a = build().to_json();
        let b = build().to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(a.find("\"a\"").unwrap() < a.find("\"z\"").unwrap());
        let back: VerificationReport = serde_json::from_str(&a).unwrap();
        assert_eq!(back, build());
    }

    #[test]
    fn summary_sorts_cases() {
        let reports = vec![VerificationReport::new("b"), VerificationReport::new("a").fail("boom")];
        let s = Summary::from_reports(&reports);
        assert_eq!(s.cases[0].case_id, "a");
        assert_eq!(s.passed, 1);
        assert!(!s.all_pass);
    }
}
