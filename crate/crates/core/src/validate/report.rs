//! Check records and their JSON form.
//!
//! Floats are written with 17 significant digits so a report round-trips
//! bit for bit and two runs with the same seed produce identical bytes.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Format with 17 significant digits; non-finite values have no JSON form
/// and become `null`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_f64(x)).expect("formatted float is valid JSON")
}

/// Outcome of one residual check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub check: String,
    pub samples: usize,
    /// Samples whose residual could not be evaluated at all.
    pub failed_samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, tolerance: f64) -> Self {
        CheckRecord {
            check: check.into(),
            samples: 0,
            failed_samples: 0,
            max_residual: 0.0,
            tolerance,
        }
    }

    /// Fold in one residual; an error counts as a failed sample with
    /// infinite residual.
    pub fn push(&mut self, r: Result<f64>) {
        self.samples += 1;
        match r {
            Ok(x) if !x.is_nan() => self.max_residual = self.max_residual.max(x),
            Ok(_) | Err(_) => {
                if let Err(e) = &r {
                    log::debug!("{}: sample failed: {e}", self.check);
                }
                self.failed_samples += 1;
                self.max_residual = f64::INFINITY;
            }
        }
    }

    pub fn extend<I: IntoIterator<Item = Result<f64>>>(&mut self, it: I) {
        for r in it {
            self.push(r);
        }
    }

    pub fn from_residuals<I>(check: impl Into<String>, tolerance: f64, it: I) -> Self
    where
        I: IntoIterator<Item = Result<f64>>,
    {
        let mut rec = CheckRecord::new(check, tolerance);
        rec.extend(it);
        rec
    }

    pub fn verdict(&self) -> Verdict {
        if self.samples > 0 && self.failed_samples == 0 && self.max_residual <= self.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }
}

#[derive(Serialize)]
struct CheckJson<'a> {
    check: &'a str,
    samples: usize,
    failed_samples: usize,
    max_residual: Box<RawValue>,
    tolerance: Box<RawValue>,
    verdict: Verdict,
}

#[derive(Deserialize)]
struct CheckIn {
    check: String,
    samples: usize,
    #[serde(default)]
    failed_samples: usize,
    max_residual: Option<f64>,
    tolerance: Option<f64>,
    verdict: Verdict,
}

impl Serialize for CheckRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CheckJson {
            check: &self.check,
            samples: self.samples,
            failed_samples: self.failed_samples,
            max_residual: raw(self.max_residual),
            tolerance: raw(self.tolerance),
            verdict: self.verdict(),
        }
        .serialize(s)
    }
}

/// All checks of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub chain: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    tool_version: &'a str,
    chain: &'a str,
    seed: u64,
    verdict: Verdict,
    checks: &'a [CheckRecord],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportIn {
    #[allow(dead_code)]
    tool_version: String,
    chain: String,
    seed: u64,
    #[allow(dead_code)]
    verdict: Verdict,
    checks: Vec<CheckIn>,
}

impl ValidationReport {
    pub fn new(chain: impl Into<String>, seed: u64) -> Self {
        ValidationReport {
            chain: chain.into(),
            seed,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, rec: CheckRecord) {
        self.checks.push(rec);
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.checks.extend(other.checks);
    }

    pub fn verdict(&self) -> Verdict {
        if !self.checks.is_empty() && self.checks.iter().all(CheckRecord::passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict() == Verdict::Pass
    }

    pub fn get(&self, check: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn to_json(&self) -> String {
        let body = ReportJson {
            tool_version: env!("CARGO_PKG_VERSION"),
            chain: &self.chain,
            seed: self.seed,
            verdict: self.verdict(),
            checks: &self.checks,
        };
        serde_json::to_string_pretty(&body).expect("report serializes") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: ReportIn = serde_json::from_str(s).map_err(|e| Error::Invalid(format!("report schema: {e}")))?;
        let checks = r
            .checks
            .into_iter()
            .map(|c| {
                let rec = CheckRecord {
                    check: c.check,
                    samples: c.samples,
                    failed_samples: c.failed_samples,
                    max_residual: c.max_residual.unwrap_or(f64::INFINITY),
                    tolerance: c.tolerance.unwrap_or(f64::INFINITY),
                };
                if rec.verdict() != c.verdict {
                    return Err(Error::Invalid(format!(
                        "report schema: verdict of `{}` disagrees with its residual",
                        rec.check
                    )));
                }
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ValidationReport {
            chain: r.chain,
            seed: r.seed,
            checks,
        })
    }

    /// One line per check, for terminals.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{:<4} {:<40} samples={:<6} max_residual={} tol={}\n",
                c.verdict(),
                c.check,
                c.samples,
                format_f64(c.max_residual),
                format_f64(c.tolerance)
            ));
        }
        out.push_str(&format!("overall: {}\n", self.verdict()));
        out
    }
}

/// Differences between two reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDiff {
    pub lines: Vec<String>,
    pub verdicts_match: bool,
}

/// Compare two reports check by check.
pub fn report_diff(a: &ValidationReport, b: &ValidationReport) -> ReportDiff {
    let mut lines = Vec::new();
    let mut same = true;
    for ca in &a.checks {
        match b.get(&ca.check) {
            None => {
                same = false;
                lines.push(format!("- {} (only in first)", ca.check));
            }
            Some(cb) => {
                let (va, vb) = (ca.verdict(), cb.verdict());
                if va != vb {
                    same = false;
                }
                if va != vb || ca.max_residual.to_bits() != cb.max_residual.to_bits() {
                    lines.push(format!(
                        "{} {}: {} -> {} (max_residual {} -> {})",
                        if va == vb { "~" } else { "!" },
                        ca.check,
                        va,
                        vb,
                        format_f64(ca.max_residual),
                        format_f64(cb.max_residual)
                    ));
                }
            }
        }
    }
    for cb in &b.checks {
        if a.get(&cb.check).is_none() {
            same = false;
            lines.push(format!("+ {} (only in second)", cb.check));
        }
    }
    ReportDiff {
        lines,
        verdicts_match: same,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ValidationReport {
        let mut r = ValidationReport::new("annulus", 7);
        r.push(CheckRecord::from_residuals("a", 1e-12, [Ok(1e-13), Ok(0.1 + 0.2 - 0.3)]));
        r.push(CheckRecord::from_residuals("b", 1e-9, [Ok(1.0), Err(Error::NonFinite)]));
        r
    }

    #[test]
    fn floats_use_seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(f64::INFINITY), "null");
    }

    #[test]
    fn report_json_round_trips() {
        let r = sample();
        let json = r.to_json();
        let back = ValidationReport::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
        assert_eq!(r.verdict(), Verdict::Fail);
        assert!(r.get("a").unwrap().passed());
        assert_eq!(r.get("b").unwrap().failed_samples, 1);
    }

    #[test]
    fn diff_flags_verdict_changes() {
        let a = sample();
        let mut b = sample();
        assert!(report_diff(&a, &b).verdicts_match);
        b.checks[0].max_residual = 1.0;
        let d = report_diff(&a, &b);
        assert!(!d.verdicts_match);
        assert_eq!(d.lines.len(), 1);
    }

    #[test]
    fn schema_errors_are_reported() {
        assert!(ValidationReport::from_json("{}").is_err());
        assert!(ValidationReport::from_json("not json").is_err());
    }
}
