//! Verification records and the JSON report.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// A documented discrepancy with a printed value: surfaced, not failed.
    Audit,
}

/// How `lhs` and `rhs` are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Exact,
    Relative,
    Absolute,
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    /// The identity being checked, as a formula.
    pub reference: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub criterion: Criterion,
    pub tolerance: f64,
    /// Number of samples folded into this record; `lhs`/`rhs` come from the worst one.
    pub samples: usize,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Marks the record as an audit regardless of its deviation.
    pub fn audit(mut self) -> Self {
        self.status = Status::Audit;
        self
    }
}

/// Folds many `(lhs, rhs)` samples of one identity into a record that keeps the
/// worst deviation.
#[derive(Clone, Debug)]
pub struct Check {
    id: String,
    reference: String,
    criterion: Criterion,
    tolerance: f64,
    samples: usize,
    worst: Option<(f64, f64)>,
    worst_key: f64,
    exact_ok: bool,
}

impl Check {
    pub fn new(id: impl Into<String>, reference: impl Into<String>, criterion: Criterion, tolerance: f64) -> Self {
        Check {
            id: id.into(),
            reference: reference.into(),
            criterion,
            tolerance,
            samples: 0,
            worst: None,
            worst_key: -1.0,
            exact_ok: true,
        }
    }

    pub fn relative(id: impl Into<String>, reference: impl Into<String>, tol: f64) -> Self {
        Check::new(id, reference, Criterion::Relative, tol)
    }

    pub fn absolute(id: impl Into<String>, reference: impl Into<String>, tol: f64) -> Self {
        Check::new(id, reference, Criterion::Absolute, tol)
    }

    pub fn exact(id: impl Into<String>, reference: impl Into<String>) -> Self {
        Check::new(id, reference, Criterion::Exact, 0.0)
    }

    /// Adds a numeric sample.
    pub fn add(&mut self, lhs: f64, rhs: f64) {
        self.samples += 1;
        let key = match self.criterion {
            Criterion::Absolute => (lhs - rhs).abs(),
            _ => rel_dev(lhs, rhs),
        };
        let key = if key.is_nan() { f64::INFINITY } else { key };
        if key > self.worst_key {
            self.worst_key = key;
            self.worst = Some((lhs, rhs));
        }
    }

    /// Adds a sample of an exact identity; `equal` is decided by the caller.
    pub fn add_exact(&mut self, equal: bool, lhs: f64, rhs: f64) {
        self.samples += 1;
        if !equal && self.exact_ok {
            self.exact_ok = false;
            self.worst = Some((lhs, rhs));
            self.worst_key = f64::INFINITY;
        } else if self.worst.is_none() {
            self.worst = Some((lhs, rhs));
        }
    }

    pub fn finish(self) -> Record {
        let (lhs, rhs) = self.worst.unwrap_or((0.0, 0.0));
        let abs_dev = (lhs - rhs).abs();
        let rel = rel_dev(lhs, rhs);
        let ok = self.samples > 0
            && match self.criterion {
                Criterion::Exact => self.exact_ok,
                Criterion::Relative => rel <= self.tolerance,
                Criterion::Absolute => abs_dev <= self.tolerance,
            };
        Record {
            id: self.id,
            reference: self.reference,
            lhs,
            rhs,
            abs_dev,
            rel_dev: rel,
            criterion: self.criterion,
            tolerance: self.tolerance,
            samples: self.samples,
            status: if ok { Status::Pass } else { Status::Fail },
            note: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub audits: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub p: usize,
    pub q: usize,
    pub trials: usize,
    pub tolerance: f64,
    pub include_total_derivatives: bool,
    pub oracle_corrected_signs: bool,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub summary: Summary,
    pub metadata: Metadata,
    pub records: Vec<Record>,
    /// Command-specific output (densities, spectra, action values).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<serde_json::Value>,
}

impl Report {
    pub fn new(mut records: Vec<Record>, metadata: Metadata, data: Option<serde_json::Value>) -> Self {
        records.sort_by(|a, b| a.id.cmp(&b.id));
        let summary = Summary {
            total: records.len(),
            passed: records.iter().filter(|r| r.status == Status::Pass).count(),
            failed: records.iter().filter(|r| r.status == Status::Fail).count(),
            audits: records.iter().filter(|r| r.status == Status::Audit).count(),
        };
        Report { summary, metadata, records, data }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn record(&self, id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.id == id)
    }
}
