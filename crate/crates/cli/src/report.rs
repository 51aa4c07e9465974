//! Check records and the versioned JSON report.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// a published closed form or constant
    Literature,
    /// a definition, normalization or validation rule
    Identity,
    /// derived here by an independent computation
    Computed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    /// `|observed − expected| ≤ tol`, or a magnitude bound
    Numeric,
    /// `observed ≥ threshold`, residual is the shortfall
    Lower,
    /// exact comparison; residual 0 or 1, tolerance not overridable
    Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub id: String,
    pub inputs: Value,
    pub expected: Value,
    pub observed: Value,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub provenance: Provenance,
    #[serde(skip)]
    kind: Kind,
}

impl Record {
    fn new(id: &str, inputs: Value, expected: Value, observed: Value, residual: f64, tolerance: f64, prov: Provenance, kind: Kind) -> Self {
        let mut r = Record {
            id: id.to_string(),
            inputs,
            expected,
            observed,
            residual,
            tolerance,
            pass: false,
            provenance: prov,
            kind,
        };
        r.settle();
        r
    }

    fn settle(&mut self) {
        self.pass = self.residual.is_finite() && self.residual <= self.tolerance;
    }

    /// `|observed − expected| ≤ tol`.
    pub fn close(id: &str, inputs: Value, expected: f64, observed: f64, tol: f64, prov: Provenance) -> Self {
        Record::new(id, inputs, json!(expected), json!(observed), (observed - expected).abs(), tol, prov, Kind::Numeric)
    }

    /// `|observed/expected − 1| ≤ tol`.
    pub fn relative(id: &str, inputs: Value, expected: f64, observed: f64, tol: f64, prov: Provenance) -> Self {
        let res = ((observed - expected) / expected).abs();
        Record::new(id, inputs, json!(expected), json!(observed), res, tol, prov, Kind::Numeric)
    }

    /// A non-negative residual that should vanish: `residual ≤ tol`.
    pub fn small(id: &str, inputs: Value, residual: f64, tol: f64, prov: Provenance) -> Self {
        Record::new(id, inputs, json!(0.0), json!(residual), residual.abs(), tol, prov, Kind::Numeric)
    }

    /// `observed ≥ threshold`.
    pub fn at_least(id: &str, inputs: Value, threshold: f64, observed: f64, prov: Provenance) -> Self {
        let res = if observed.is_nan() { f64::NAN } else { (threshold - observed).max(0.0) };
        Record::new(id, inputs, json!({ "min": threshold }), json!(observed), res, 0.0, prov, Kind::Lower)
    }

    pub fn exact<T: Serialize + PartialEq>(id: &str, inputs: Value, expected: T, observed: T, prov: Provenance) -> Self {
        let res = if expected == observed { 0.0 } else { 1.0 };
        Record::new(id, inputs, json!(expected), json!(observed), res, 0.0, prov, Kind::Exact)
    }

    /// A computation that errored; always fails.
    pub fn error(id: &str, inputs: Value, msg: String, prov: Provenance) -> Self {
        Record::new(id, inputs, Value::Null, json!({ "error": msg }), f64::NAN, 0.0, prov, Kind::Exact)
    }

    fn override_tolerance(&mut self, tol: f64) {
        if self.kind != Kind::Exact {
            self.tolerance = tol;
            self.settle();
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerNote {
    pub id: &'static str,
    pub text: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub config: RunConfig,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub ledger: Vec<LedgerNote>,
    pub data: Value,
}

impl Report {
    pub fn new(suite: &str, config: &RunConfig, records: Vec<Record>, data: Value) -> Self {
        let mut r = Report {
            schema: SCHEMA,
            suite: suite.to_string(),
            config: config.clone(),
            records,
            summary: Summary::default(),
            ledger: crate::ledger::notes(),
            data,
        };
        if let Some(t) = config.tol {
            for rec in &mut r.records {
                rec.override_tolerance(t);
            }
        }
        r.summary = Summary {
            total: r.records.len(),
            passed: r.records.iter().filter(|x| x.pass).count(),
            failed: r.records.iter().filter(|x| !x.pass).count(),
        };
        r
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
