use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{DeltaInfo, RunConfig};
use crate::error::Result;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

/// A flat table of per-item measurements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| crate::Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| crate::Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub config: RunConfig,
    pub delta: DeltaInfo,
    pub measured: BTreeMap<String, Value>,
    pub assertions: Vec<Assertion>,
    pub caveats: Vec<String>,
    pub table: Table,
    /// RFC 3339; the only field that varies between identical runs.
    pub timestamp: Option<String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: &RunConfig, delta: &DeltaInfo) -> Self {
        ExperimentReport {
            schema_version: REPORT_SCHEMA_VERSION,
            experiment: experiment.into(),
            config: config.clone(),
            delta: delta.clone(),
            measured: BTreeMap::new(),
            assertions: Vec::new(),
            caveats: Vec::new(),
            table: Table::default(),
            timestamp: None,
        }
    }

    pub fn measure(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("measurements serialize");
        self.measured.insert(key.into(), v);
    }

    /// Records a check; a failure downgrades to a warning when `caveat` holds.
    pub fn check(&mut self, name: &str, ok: bool, caveat: bool, detail: String) {
        let status = match (ok, caveat) {
            (true, _) => Status::Pass,
            (false, true) => Status::Warn,
            (false, false) => Status::Fail,
        };
        self.assertions.push(Assertion {
            name: name.into(),
            status,
            detail,
        });
    }

    pub fn caveat(&mut self, text: &str) {
        if !self.caveats.iter().any(|c| c == text) {
            self.caveats.push(text.into());
        }
    }

    pub fn status(&self) -> Status {
        self.assertions
            .iter()
            .map(|a| a.status)
            .max()
            .unwrap_or(Status::Pass)
    }

    pub fn stamp(&mut self) {
        self.timestamp = Some(chrono::Utc::now().to_rfc3339());
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
