use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Envelope;

/// A measured difference counts as a violation only beyond this margin.
pub const VIOLATION_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

/// One bound evaluation, optionally judged against a measured difference.
///
/// Two-sided bounds keep their upper limit in `value` and the magnitude of
/// the lower limit in `partners["lower"]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: String,
    pub inputs: BTreeMap<String, f64>,
    pub value: f64,
    pub partners: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub lhs: Option<f64>,
}

impl BoundReport {
    pub fn new(bound: impl Into<String>, value: f64) -> Self {
        Self {
            bound: bound.into(),
            inputs: BTreeMap::new(),
            value,
            partners: BTreeMap::new(),
            verdict: Verdict::NotApplicable,
            lhs: None,
        }
    }

    pub fn from_envelope(bound: impl Into<String>, env: Envelope) -> Self {
        let mut r = Self::new(bound, env.upper);
        if env.lower.is_finite() {
            r.partners.insert("lower".into(), env.lower);
        }
        r
    }

    pub fn input(mut self, name: &str, v: f64) -> Self {
        self.inputs.insert(name.into(), v);
        self
    }

    pub fn partner(mut self, name: &str, v: f64) -> Self {
        self.partners.insert(name.into(), v);
        self
    }

    pub fn envelope(&self) -> Envelope {
        Envelope {
            lower: self.partners.get("lower").copied().unwrap_or(f64::INFINITY),
            upper: self.value,
        }
    }

    /// Records `lhs` and sets the verdict.
    pub fn judge(mut self, lhs: f64) -> Self {
        self.verdict = if self.envelope().contains(lhs, VIOLATION_SLACK) {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        self.lhs = Some(lhs);
        self
    }

    pub fn not_applicable(mut self) -> Self {
        self.verdict = Verdict::NotApplicable;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub const CSV_HEADER: [&'static str; 6] = ["bound", "inputs", "value", "partners", "verdict", "lhs"];

    /// Flat row matching [`Self::CSV_HEADER`]; maps render as `k=v;k=v`.
    pub fn csv_row(&self) -> [String; 6] {
        let flat = |m: &BTreeMap<String, f64>| {
            m.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
        };
        [
            self.bound.clone(),
            flat(&self.inputs),
            self.value.to_string(),
            flat(&self.partners),
            self.verdict.to_string(),
            self.lhs.map(|v| v.to_string()).unwrap_or_default(),
        ]
    }
}
