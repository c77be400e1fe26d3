//! Experiment reports and their three serializations.
//!
//! JSON is canonical: keys sorted, two-space indentation, every float written
//! as `{:.16e}` (17 significant digits) so that parsing restores it exactly.
//! Non-finite values are written as `null` and read back as NaN.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Observed,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Observed => "observed",
        }
    }
}

fn nan_for_null<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
    let raw: BTreeMap<String, Option<f64>> = BTreeMap::deserialize(d)?;
    Ok(raw.into_iter().map(|(k, v)| (k, v.unwrap_or(f64::NAN))).collect())
}

/// One asserted inequality or observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// Stable label of the property being tested, e.g. `calibration:sign-threshold`.
    pub anchor: String,
    #[serde(deserialize_with = "nan_for_null")]
    pub values: BTreeMap<String, f64>,
    #[serde(deserialize_with = "nan_for_null")]
    pub tolerances: BTreeMap<String, f64>,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: &str) -> Self {
        Self {
            name: name.into(),
            status: Status::Observed,
            anchor: anchor.to_string(),
            values: BTreeMap::new(),
            tolerances: BTreeMap::new(),
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }

    pub fn count(self, key: &str, v: usize) -> Self {
        self.value(key, v as f64)
    }

    pub fn tol(mut self, key: &str, v: f64) -> Self {
        self.tolerances.insert(key.to_string(), v);
        self
    }

    /// Turns the record into an assertion that holds iff `ok`.
    pub fn holds(mut self, ok: bool) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    /// `pass` when no check failed.
    pub status: Status,
    /// Effective configuration: seed, tolerances and the experiment's table.
    pub config: Value,
    pub checks: Vec<Check>,
    /// Artifact file names relative to the output directory.
    pub artifacts: Vec<String>,
}

impl ExperimentReport {
    pub fn new(experiment: &str, config: Value, checks: Vec<Check>, artifacts: Vec<String>) -> Self {
        let status = if checks.iter().any(|c| c.status == Status::Fail) { Status::Fail } else { Status::Pass };
        Self { experiment: experiment.to_string(), status, config, checks, artifacts }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report is serializable");
        let mut out = String::new();
        write_value(&mut out, &v, 0);
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(format!("malformed report: {e}")))
    }

    /// One header line, then one line per check.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(["experiment", "check", "status", "anchor", "values", "tolerances"]).expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                self.experiment.as_str(),
                c.name.as_str(),
                c.status.as_str(),
                c.anchor.as_str(),
                &flat(&c.values),
                &flat(&c.tolerances),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Line-oriented summary; the experiment name is on the first line.
    pub fn to_human(&self, wall_clock: Option<Duration>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}: {}", self.experiment, self.status.as_str().to_uppercase());
        for c in &self.checks {
            let _ = write!(s, "  [{:<8}] {} ({})", c.status.as_str(), c.name, c.anchor);
            if !c.values.is_empty() {
                let _ = write!(s, "  {}", human_map(&c.values));
            }
            if !c.tolerances.is_empty() {
                let _ = write!(s, "  tol {}", human_map(&c.tolerances));
            }
            s.push('\n');
        }
        for a in &self.artifacts {
            let _ = writeln!(s, "  artifact {a}");
        }
        if let Some(d) = wall_clock {
            let _ = writeln!(s, "  wall clock {:.3} s", d.as_secs_f64());
        }
        s
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn flat(m: &BTreeMap<String, f64>) -> String {
    m.iter().map(|(k, v)| format!("{k}={}", fmt_f64(*v))).collect::<Vec<_>>().join(";")
}

fn human_map(m: &BTreeMap<String, f64>) -> String {
    m.iter().map(|(k, v)| format!("{k}={v:.6e}")).collect::<Vec<_>>().join(" ")
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escape")),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            // serde_json's default map is ordered by key.
            for (i, (k, x)) in m.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&serde_json::to_string(k).expect("key escape"));
                out.push_str(": ");
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let c = Check::new("x", "a").value("third", 1.0 / 3.0).holds(true);
        let r = ExperimentReport::new("demo", Value::Null, vec![c], vec![]);
        let j = r.to_json();
        assert!(j.contains("3.3333333333333331e-1"), "{j}");
        assert_eq!(ExperimentReport::from_json(&j).unwrap(), r);
    }

    #[test]
    fn non_finite_values_become_null() {
        let c = Check::new("x", "a").value("bad", f64::INFINITY);
        let r = ExperimentReport::new("demo", Value::Null, vec![c], vec![]);
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert!(back.checks[0].values["bad"].is_nan());
    }
}
