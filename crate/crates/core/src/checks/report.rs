//! Check records and the aggregated diagnostics report.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::{Error, Result};

/// Outcome of one certification. `pass` holds iff `margin ≥ -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    /// Signed slack of the inequality at the worst node, positive when it holds.
    pub margin: f64,
    pub tolerance: f64,
    /// Node where the margin is attained, if the check is nodewise.
    pub location: Option<[f64; 2]>,
}

impl CheckRecord {
    pub fn new(name: &str, margin: f64, tolerance: f64, location: Option<Vec2>) -> Self {
        CheckRecord {
            name: name.to_string(),
            pass: margin >= -tolerance,
            margin,
            tolerance,
            location: location.map(|x| x.to_array()),
        }
    }
}

/// Tracks the smallest value seen together with its node.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Worst {
    pub value: f64,
    pub at: Option<Vec2>,
}

impl Worst {
    pub fn new() -> Self {
        Worst {
            value: f64::INFINITY,
            at: None,
        }
    }

    pub fn push(&mut self, value: f64, at: Vec2) {
        // NaN must register as a failure
        if value < self.value || value.is_nan() && !self.value.is_nan() {
            self.value = value;
            self.at = Some(at);
        }
    }

    pub fn record(self, name: &str, tolerance: f64) -> CheckRecord {
        CheckRecord::new(name, self.value, tolerance, self.at)
    }
}

/// Constants measured on (or computed for) the solution under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredConstants {
    /// Lower bound of the eigenvalues of `D²h` on the source.
    pub theta: f64,
    pub c1: f64,
    /// `max |aᵢⱼ ∂ᵢ∂ⱼ H|` with `H = h̃(∇u)`.
    pub c2: f64,
    /// Smallest boundary value of `⟨∇h, ∇h̃(∇u)⟩`, the reciprocal of `C₄`.
    pub chi_min: f64,
    /// Smallest boundary value of `⟨ν, ν̃(∇u)⟩` for unit normals.
    pub unit_obliqueness_min: f64,
    pub c12: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub volume_source: f64,
    pub volume_target: f64,
    pub mesh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub c: f64,
    pub constants: MeasuredConstants,
    pub checks: Vec<CheckRecord>,
}

impl DiagnosticsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|r| !r.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Parameter(format!("cannot serialize report: {e}")))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_margin_and_tolerance() {
        assert!(CheckRecord::new("a", -1e-7, 1e-6, None).pass);
        assert!(!CheckRecord::new("a", -2e-6, 1e-6, None).pass);
        assert!(!CheckRecord::new("a", f64::NAN, 1e-6, None).pass);
    }

    #[test]
    fn worst_keeps_minimum_and_nan() {
        let mut w = Worst::new();
        w.push(1.0, Vec2::new(1.0, 0.0));
        w.push(0.5, Vec2::new(2.0, 0.0));
        w.push(0.7, Vec2::new(3.0, 0.0));
        assert_eq!(w.value, 0.5);
        assert_eq!(w.at, Some(Vec2::new(2.0, 0.0)));
        w.push(f64::NAN, Vec2::ZERO);
        assert!(!w.record("x", 1.0).pass);
    }

    #[test]
    fn report_round_trips_through_json() {
        let r = DiagnosticsReport {
            c: 1.0,
            constants: MeasuredConstants {
                theta: 2.0,
                c1: 3.0,
                c2: 4.0,
                chi_min: 0.5,
                unit_obliqueness_min: 0.9,
                c12: 1.0 / 0.9,
                lambda_min: 1.0,
                lambda_max: 2.0,
                volume_source: 3.0,
                volume_target: 4.0,
                mesh: 0.1,
            },
            checks: vec![CheckRecord::new("a", 0.1, 1e-6, Some(Vec2::new(0.5, 0.25)))],
        };
        let back: DiagnosticsReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(back.all_pass());
    }
}
