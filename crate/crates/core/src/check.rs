//! Named pass/fail outcomes shared by every verification routine.

use alloc::string::String;

/// One verified property together with the quantity it was judged on.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Measured residual for numeric checks; `None` for exact ones.
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    /// Short human-readable outcome, e.g. `"(1, 19)"` or `"rank 6"`.
    pub detail: String,
}

impl Check {
    pub fn exact(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            residual: None,
            tolerance: None,
            detail: detail.into(),
        }
    }

    /// Passes iff `residual < tolerance` (NaN fails).
    pub fn numeric(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: residual < tolerance,
            residual: Some(residual),
            tolerance: Some(tolerance),
            detail: String::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
