use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Verdict of an equality check.
///
/// A residual beyond `tolerance + error_bar` is a resolved discrepancy and
/// fails. Otherwise the check passes when the integration error fits inside
/// the tolerance, and is inconclusive when it does not.
pub fn decide(residual: f64, tolerance: f64, error_bar: f64) -> Verdict {
    if !residual.is_finite() || !error_bar.is_finite() {
        return Verdict::Inconclusive;
    }
    if residual.abs() > tolerance + error_bar {
        Verdict::Fail
    } else if error_bar > tolerance {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

/// Outcome of one numerical check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`
    pub residual: f64,
    pub tolerance: f64,
    pub error_bar: f64,
    pub verdict: Verdict,
    pub diagnostics: BTreeMap<String, Value>,
}

impl VerificationReport {
    /// Equality check `lhs = rhs`.
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, error_bar: f64) -> Self {
        let residual = lhs - rhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            residual,
            tolerance,
            error_bar,
            verdict: decide(residual, tolerance, error_bar),
            diagnostics: BTreeMap::new(),
        }
    }

    /// Inequality check `lhs ≤ rhs`.
    pub fn at_most(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let verdict = if lhs <= rhs { Verdict::Pass } else { Verdict::Fail };
        Self {
            name: name.into(),
            lhs,
            rhs,
            residual: lhs - rhs,
            tolerance: 0.0,
            error_bar: 0.0,
            verdict,
            diagnostics: BTreeMap::new(),
        }
        .with("relation", "lhs <= rhs")
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Sort by name, the order in which bundles are emitted.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| a.name.cmp(&b.name));
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn verdict_rules() {
        assert_eq!(decide(1e-9, 1e-8, 0.0), Verdict::Pass);
        assert_eq!(decide(1e-7, 1e-8, 0.0), Verdict::Fail);
        assert_eq!(decide(1e-3, 1e-8, 1e-2), Verdict::Inconclusive);
        assert_eq!(decide(1.0, 1e-8, 1e-2), Verdict::Fail);
        assert_eq!(decide(0.0, 0.0, 0.0), Verdict::Pass);
        assert_eq!(decide(f64::NAN, 1.0, 0.0), Verdict::Inconclusive);
    }

    #[test]
    fn inequality_report() {
        assert!(VerificationReport::at_most("x", 1.0, 2.0).passed());
        let r = VerificationReport::at_most("x", 4.967294, 3.831706);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!((r.residual - 1.135588).abs() < 1e-12);
    }

    #[test]
    fn json_field_names_are_stable() {
        let r = VerificationReport::equality("n", 1.0, 1.0, 1e-8, 0.0).with("seed", 7);
        let v: Value = serde_json::to_value(&r).unwrap();
        for key in ["name", "lhs", "rhs", "residual", "tolerance", "error_bar", "verdict", "diagnostics"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["verdict"], "pass");
        let back: VerificationReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #[test]
        fn verdict_is_pure_and_consistent(res in -10.0f64..10.0, tol in 0.0f64..5.0, err in 0.0f64..5.0) {
            let v = decide(res, tol, err);
            prop_assert_eq!(v, decide(res, tol, err));
            match v {
                Verdict::Pass => prop_assert!(res.abs() <= tol + err && err <= tol),
                Verdict::Inconclusive => prop_assert!(err > tol && res.abs() <= tol + err),
                Verdict::Fail => prop_assert!(res.abs() > tol + err),
            }
        }
    }
}
