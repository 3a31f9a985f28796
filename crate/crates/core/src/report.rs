//! Experiment reports and their deterministic serialization.
//!
//! A report serializes to a single JSON document with top-level keys
//! `experiment_id`, `params`, `rows`, `slopes`, `verdicts`. Floats are
//! rendered with 17 significant digits so the document round-trips 8-byte
//! values losslessly, and all ordering is fixed so identical inputs yield
//! byte-identical documents. Wall-clock metadata is confined to an optional
//! sidecar key that reproducible runs omit.

use std::fmt::Write as _;

use crate::solver::Diagnostics;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    FloatList(Vec<f64>),
    IntList(Vec<i64>),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Float(v)
    }
}
impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}
impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}
impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}
impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}
impl From<String> for ParamValue {
    fn from(v: String) -> Self {
        ParamValue::Text(v)
    }
}
impl From<Vec<f64>> for ParamValue {
    fn from(v: Vec<f64>) -> Self {
        ParamValue::FloatList(v)
    }
}

/// Least-squares slope with a standard-error half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub halfwidth: f64,
}

/// A named boolean check. `threshold_param` names the `params` entry the
/// threshold was read from, so every verdict is traceable to the
/// configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub observed: f64,
    pub threshold: f64,
    pub threshold_param: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Table {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column values by name; panics on unknown names (programmer error).
    pub fn column(&self, name: &str) -> Vec<f64> {
        let idx = self
            .columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("no column named {name}"));
        self.rows.iter().map(|r| r[idx]).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub params: Vec<(String, ParamValue)>,
    pub rows: Table,
    pub slopes: Vec<(String, SlopeFit)>,
    pub verdicts: Vec<Verdict>,
    /// Wall-clock sidecar; `None` in reproducible mode.
    pub generated_at: Option<String>,
}

impl ExperimentReport {
    pub fn new(experiment_id: &str) -> ExperimentReport {
        ExperimentReport {
            experiment_id: experiment_id.to_string(),
            ..Default::default()
        }
    }

    pub fn set_param(&mut self, key: &str, value: impl Into<ParamValue>) {
        let value = value.into();
        if let Some(entry) = self.params.iter_mut().find(|(k, _)| k == key) {
            entry.1 = value;
        } else {
            self.params.push((key.to_string(), value));
        }
    }

    pub fn param(&self, key: &str) -> Option<&ParamValue> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Record a verdict whose threshold is stored under `threshold_param`
    /// (the entry is created when missing, keeping the invariant that every
    /// verdict references a present parameter).
    pub fn push_verdict(&mut self, name: &str, pass: bool, observed: f64, threshold_param: &str, threshold: f64) {
        if self.param(threshold_param).is_none() {
            self.set_param(threshold_param, threshold);
        }
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            observed,
            threshold,
            threshold_param: threshold_param.to_string(),
        });
    }

    pub fn push_slope(&mut self, name: &str, fit: SlopeFit) {
        self.slopes.push((name.to_string(), fit));
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn slope(&self, name: &str) -> Option<SlopeFit> {
        self.slopes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| *f)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"experiment_id\": {},", json_string(&self.experiment_id));

        out.push_str("  \"params\": {\n");
        for (i, (k, v)) in self.params.iter().enumerate() {
            let comma = if i + 1 < self.params.len() { "," } else { "" };
            let _ = writeln!(out, "    {}: {}{comma}", json_string(k), param_json(v));
        }
        out.push_str("  },\n");

        out.push_str("  \"rows\": {\n    \"columns\": [");
        for (i, c) in self.rows.columns.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            out.push_str(&json_string(c));
        }
        out.push_str("],\n    \"data\": [\n");
        for (i, row) in self.rows.rows.iter().enumerate() {
            let comma = if i + 1 < self.rows.rows.len() { "," } else { "" };
            out.push_str("      [");
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&json_float(*v));
            }
            let _ = writeln!(out, "]{comma}");
        }
        out.push_str("    ]\n  },\n");

        out.push_str("  \"slopes\": {\n");
        for (i, (name, fit)) in self.slopes.iter().enumerate() {
            let comma = if i + 1 < self.slopes.len() { "," } else { "" };
            let _ = writeln!(
                out,
                "    {}: {{\"slope\": {}, \"halfwidth\": {}}}{comma}",
                json_string(name),
                json_float(fit.slope),
                json_float(fit.halfwidth)
            );
        }
        out.push_str("  },\n");

        out.push_str("  \"verdicts\": [\n");
        for (i, v) in self.verdicts.iter().enumerate() {
            let comma = if i + 1 < self.verdicts.len() { "," } else { "" };
            let _ = writeln!(
                out,
                "    {{\"name\": {}, \"pass\": {}, \"observed\": {}, \"threshold\": {}, \"threshold_param\": {}}}{comma}",
                json_string(&v.name),
                v.pass,
                json_float(v.observed),
                json_float(v.threshold),
                json_string(&v.threshold_param)
            );
        }
        out.push_str("  ]");

        if let Some(ts) = &self.generated_at {
            out.push_str(",\n");
            let _ = writeln!(out, "  \"generated_at\": {}", json_string(ts));
        } else {
            out.push('\n');
        }
        out.push_str("}\n");
        out
    }
}

/// 17 significant digits: enough to reconstruct any f64 exactly.
pub fn json_float(v: f64) -> String {
    if v.is_nan() {
        "\"nan\"".to_string()
    } else if v.is_infinite() {
        if v > 0.0 {
            "\"inf\"".to_string()
        } else {
            "\"-inf\"".to_string()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn param_json(v: &ParamValue) -> String {
    match v {
        ParamValue::Float(x) => json_float(*x),
        ParamValue::Int(i) => i.to_string(),
        ParamValue::Bool(b) => b.to_string(),
        ParamValue::Text(s) => json_string(s),
        ParamValue::FloatList(xs) => {
            let inner: Vec<String> = xs.iter().map(|x| json_float(*x)).collect();
            format!("[{}]", inner.join(", "))
        }
        ParamValue::IntList(xs) => {
            let inner: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            format!("[{}]", inner.join(", "))
        }
    }
}

/// Diagnostics time series as CSV with the fixed header.
pub fn diagnostics_csv(diag: &Diagnostics) -> String {
    let mut out = String::from("t,mean,l2,hamiltonian,hs_norm\n");
    for i in 0..diag.times.len() {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            diag.times[i], diag.mean[i], diag.l2[i], diag.hamiltonian[i], diag.hs_norm[i]
        );
    }
    out
}

/// Seconds since the Unix epoch, for the non-reproducible sidecar field.
pub fn timestamp_now() -> String {
    use std::time::{SystemTime, UNIX_EPOCH};
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{secs}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_round_trips() {
        for &v in &[
            0.0,
            1.0,
            -1.0 / 3.0,
            std::f64::consts::PI,
            1.37082393412364890972,
            6.02e23,
            -5.0e-324,
        ] {
            let s = json_float(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s} -> {back}");
        }
        assert_eq!(json_float(f64::INFINITY), "\"inf\"");
        assert_eq!(json_float(f64::NAN), "\"nan\"");
    }

    #[test]
    fn report_serialization_is_deterministic() {
        let build = || {
            let mut r = ExperimentReport::new("demo");
            r.set_param("s", 2.0);
            r.set_param("n", ParamValue::IntList(vec![32, 64]));
            r.rows = Table::new(&["n", "value"]);
            r.rows.push(vec![32.0, 0.5]);
            r.rows.push(vec![64.0, 0.25]);
            r.push_slope(
                "decay",
                SlopeFit {
                    slope: -1.0,
                    halfwidth: 0.0,
                },
            );
            r.push_verdict("decay_slope", true, -1.0, "slope_tol", 0.05);
            r.to_json()
        };
        assert_eq!(build(), build());
    }

    #[test]
    fn verdict_threshold_param_is_created() {
        let mut r = ExperimentReport::new("demo");
        r.push_verdict("check", true, 1.0, "tol", 0.1);
        assert!(r.param("tol").is_some());
        assert!(r.passed());
        r.push_verdict("fails", false, 9.0, "tol", 0.1);
        assert!(!r.passed());
    }

    #[test]
    fn csv_header_is_fixed() {
        let diag = Diagnostics {
            times: vec![0.0, 0.5],
            mean: vec![0.0, 0.0],
            l2: vec![1.0, 1.0],
            hamiltonian: vec![0.3, 0.3],
            hs_norm: vec![2.0, 2.1],
            ..Default::default()
        };
        let csv = diagnostics_csv(&diag);
        assert!(csv.starts_with("t,mean,l2,hamiltonian,hs_norm\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
