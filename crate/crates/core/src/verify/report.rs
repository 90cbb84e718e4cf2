//! Machine-readable verification records.

use std::fmt;

/// One named check: its parameters, estimate, error bar and verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRecord {
    pub name: String,
    pub params: Vec<(String, String)>,
    pub estimate: f64,
    pub error: f64,
    pub verdict: bool,
}

impl ReportRecord {
    pub fn new(name: impl Into<String>, estimate: f64, error: f64, verdict: bool) -> Self {
        ReportRecord {
            name: name.into(),
            params: Vec::new(),
            estimate,
            error,
            verdict,
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    /// Parameters as `k=v;k=v`.
    pub fn params_joined(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for ReportRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {} estimate={} error={}",
            if self.verdict { "pass" } else { "FAIL" },
            self.name,
            self.params_joined(),
            short(self.estimate),
            short(self.error)
        )
    }
}

fn short(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-3..1e5).contains(&a) {
        format!("{v:.6}")
    } else {
        format!("{v:.3e}")
    }
}
