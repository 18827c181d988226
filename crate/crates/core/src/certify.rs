//! Two-sided bounds with provenance.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    /// The bracket closed to within the tolerance.
    Certified,
    /// A positive lower bound exists but the bracket is open.
    Partial,
    /// No usable lower bound.
    Unresolved,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Certified => "CERTIFIED",
            Status::Partial => "PARTIAL",
            Status::Unresolved => "UNRESOLVED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: String,
    pub upper_method: String,
    pub status: Status,
    pub gap_tolerance: f64,
}

impl CertifiedInterval {
    /// A lower bound above the upper one by rounding only is pulled down to
    /// it; a genuine crossing is kept so that it shows up in checks.
    pub fn new(lower: f64, upper: f64, lower_method: impl Into<String>, upper_method: impl Into<String>, gap_tolerance: f64) -> Self {
        let mut lower = lower.max(0.0);
        if lower > upper && lower - upper <= 1e-12 * upper.abs().max(1.0) {
            lower = upper;
        }
        let status = if upper - lower <= gap_tolerance {
            Status::Certified
        } else if lower > 0.0 {
            Status::Partial
        } else {
            Status::Unresolved
        };
        Self {
            lower,
            upper,
            lower_method: lower_method.into(),
            upper_method: upper_method.into(),
            status,
            gap_tolerance,
        }
    }

    pub fn exact(value: f64, method: &str) -> Self {
        Self::new(value, value, method, method, 0.0)
    }

    /// Image under a nondecreasing map.
    pub fn map(&self, f: impl Fn(f64) -> f64, gap_tolerance: f64) -> Self {
        Self::new(f(self.lower), f(self.upper), self.lower_method.clone(), self.upper_method.clone(), gap_tolerance)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    /// Whether the whole interval lies within `tol` of `target`.
    pub fn within(&self, target: f64, tol: f64) -> bool {
        (self.lower - target).abs() <= tol && (self.upper - target).abs() <= tol
    }

    /// Whether `target` lies in the interval widened by `tol`.
    pub fn brackets(&self, target: f64, tol: f64) -> bool {
        self.lower - tol <= target && target <= self.upper + tol
    }
}
