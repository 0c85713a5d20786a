//! Structured command reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Config;

pub const REPORT_VERSION: &str = concat!("qhexa ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub id: String,
    pub pass: bool,
    /// Canonical text for exact checks, a number for numeric ones.
    pub residual: Value,
    /// Present only when timing is enabled.
    pub time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: Config,
    pub results: Vec<ResultRow>,
    pub version: String,
}

impl Report {
    pub fn new(command: impl Into<String>, config: &Config) -> Self {
        Report {
            command: command.into(),
            config: config.clone(),
            results: Vec::new(),
            version: REPORT_VERSION.into(),
        }
    }

    pub fn push(&mut self, id: impl Into<String>, pass: bool, residual: Value, time_ms: f64) -> &mut ResultRow {
        let time_ms = self.config.timing.then_some(time_ms);
        self.results.push(ResultRow {
            id: id.into(),
            pass,
            residual,
            time_ms,
            value: None,
        });
        self.results.last_mut().expect("just pushed")
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// One line per result, then a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let residual = match &r.residual {
                Value::String(s) => s.clone(),
                Value::Number(n) => match n.as_f64() {
                    Some(x) => format!("{x:.3e}"),
                    None => n.to_string(),
                },
                other => other.to_string(),
            };
            out.push_str(&format!("{status} {}  residual {residual}", r.id));
            if let Some(t) = r.time_ms {
                out.push_str(&format!("  {t:.1} ms"));
            }
            if let Some(v) = &r.value {
                match v {
                    Value::String(s) => out.push_str(&format!("  = {s}")),
                    other => out.push_str(&format!("  = {other}")),
                }
            }
            out.push('\n');
        }
        let failed = self.results.iter().filter(|r| !r.pass).count();
        out.push_str(&format!(
            "{}: {} of {} passed\n",
            self.command,
            self.results.len() - failed,
            self.results.len()
        ));
        out
    }
}
