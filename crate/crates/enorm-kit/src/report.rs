//! Check records shared by every verification suite.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// One evaluated inequality or equality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Positive means satisfied with room to spare.
    pub slack: f64,
    pub pass: bool,
}

impl Check {
    /// lhs ≤ rhs, allowing `tol` of violation.
    pub fn le<T: Real>(name: impl Into<String>, lhs: T, rhs: T, tol: T) -> Self {
        let slack = rhs - lhs;
        Self {
            check: name.into(),
            lhs: lhs.as_f64(),
            rhs: rhs.as_f64(),
            slack: slack.as_f64(),
            pass: slack >= -tol,
        }
    }

    /// lhs < rhs strictly (up to `tol`).
    pub fn lt<T: Real>(name: impl Into<String>, lhs: T, rhs: T, tol: T) -> Self {
        let slack = rhs - lhs;
        Self {
            check: name.into(),
            lhs: lhs.as_f64(),
            rhs: rhs.as_f64(),
            slack: slack.as_f64(),
            pass: slack > -tol,
        }
    }

    /// |lhs − rhs| ≤ tol; slack is tol − |lhs − rhs|.
    pub fn eq<T: Real>(name: impl Into<String>, lhs: T, rhs: T, tol: T) -> Self {
        let dev = (lhs - rhs).abs();
        Self {
            check: name.into(),
            lhs: lhs.as_f64(),
            rhs: rhs.as_f64(),
            slack: (tol - dev).as_f64(),
            pass: dev <= tol,
        }
    }

    /// A boolean condition reported with its two supporting numbers.
    pub fn flag(name: impl Into<String>, lhs: f64, rhs: f64, pass: bool) -> Self {
        Self {
            check: name.into(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass,
        }
    }
}

pub type Report = Vec<Check>;

pub fn all_pass(report: &[Check]) -> bool {
    report.iter().all(|c| c.pass)
}

pub fn failures(report: &[Check]) -> impl Iterator<Item = &Check> {
    report.iter().filter(|c| !c.pass)
}
