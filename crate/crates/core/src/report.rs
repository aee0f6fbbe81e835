//! Shared verdict and check-report types.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// The check was designed to fail (an inadmissible input) and did.
    #[serde(rename = "EXPECTED-FAIL")]
    ExpectedFail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }

    /// `Fail` is the only unsuccessful outcome.
    pub fn is_success(self) -> bool {
        self != Self::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::ExpectedFail => "EXPECTED-FAIL",
        })
    }
}

/// Outcome of an identity or refinement check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub field_spec: String,
    pub resolutions: Vec<f64>,
    pub deviations: Vec<f64>,
    pub fitted_order: Option<f64>,
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}
