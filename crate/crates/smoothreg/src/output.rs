//! CSV tables and JSON summaries.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use smoothreg_core::Verdict;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// JSON number, or `"inf"`, `"-inf"`, `"nan"` for values JSON cannot hold.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Holds => Status::Pass,
            Verdict::Fails => Status::Fail,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub claim: String,
    pub verdict: Status,
    pub evidence: Value,
    pub config_sha256: String,
    pub tool_version: String,
}

/// Everything a subcommand produced, before it is written out.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub findings: Vec<(String, Status, Value)>,
    pub tables: Vec<Table>,
    /// Cells that failed numerically, by identifier.
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn finding(&mut self, claim: impl Into<String>, status: impl Into<Status>, evidence: Value) {
        self.findings.push((claim.into(), status.into(), evidence));
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.findings.iter().all(|f| f.1 == Status::Pass)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub tool: String,
    pub tool_version: String,
    pub subcommand: String,
    pub config_sha256: String,
    pub seed: u64,
    pub passed: bool,
    pub files: Vec<String>,
    pub failed_cells: Vec<String>,
    pub experiments: Vec<Finding>,
}

impl Summary {
    pub fn new(subcommand: &str, config_sha256: &str, seed: u64, outcome: &Outcome) -> Self {
        let experiments = outcome
            .findings
            .iter()
            .map(|(claim, verdict, evidence)| Finding {
                claim: claim.clone(),
                verdict: *verdict,
                evidence: evidence.clone(),
                config_sha256: config_sha256.to_string(),
                tool_version: VERSION.to_string(),
            })
            .collect();
        let mut files: Vec<String> = outcome.tables.iter().map(|t| t.name.clone()).collect();
        files.push("config.json".into());
        Self {
            tool: TOOL.into(),
            tool_version: VERSION.into(),
            subcommand: subcommand.into(),
            config_sha256: config_sha256.into(),
            seed,
            passed: outcome.passed(),
            files,
            failed_cells: outcome.failures.clone(),
            experiments,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

/// Writes the tables, the resolved config and `summary.json` into `dir`.
pub fn write_all(dir: &Path, config_json: &str, outcome: &Outcome, summary: &Summary) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for t in &outcome.tables {
        let p = dir.join(&t.name);
        fs::write(&p, t.to_bytes()?)?;
        written.push(p);
    }
    let p = dir.join("config.json");
    fs::write(&p, format!("{config_json}\n"))?;
    written.push(p);
    let p = dir.join("summary.json");
    fs::write(&p, format!("{}\n", summary.to_json()))?;
    written.push(p);
    Ok(written)
}
