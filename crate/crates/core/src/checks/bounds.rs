//! Bounds on the constant, the eigenvalues and the ellipticity along `h`.

use std::f64::consts::PI;

use super::report::{CheckRecord, Worst};
use super::{Fields, CHECK_TOLERANCE};
use crate::slag::DIM;

/// `nπ/2 - c ≥ arctan((vol Ω / vol Ω̃)^{1/n})`.
pub fn check_angle_bound(f: &Fields) -> CheckRecord {
    let margin = (DIM as f64 * PI / 2.0 - f.c()) - f.volume_ratio.atan();
    CheckRecord::new("angle_bound", margin, CHECK_TOLERANCE, None)
}

/// `1/λ₁ ≥ tan(arctan(ratio)/n)` for the smallest eigenvalue at each node.
pub fn check_eigenvalue_bound(f: &Fields) -> CheckRecord {
    let bound = (f.volume_ratio.atan() / DIM as f64).tan();
    let mut w = Worst::new();
    for (k, h) in f.hessians.iter().enumerate() {
        w.push(1.0 / h.min_eigenvalue() - bound, f.node(k));
    }
    w.record("eigenvalue_bound", CHECK_TOLERANCE)
}

/// `aᵢⱼ ∂ᵢ∂ⱼ h ≥ 1/C₁` at each node.
pub fn check_ellipticity_lower(f: &Fields) -> CheckRecord {
    let lower = 1.0 / f.constants.c1;
    let mut w = Worst::new();
    for (k, (a, j)) in f.coefficients.iter().zip(&f.source).enumerate() {
        w.push(a.frobenius_dot(&j.hessian) - lower, f.node(k));
    }
    w.record("ellipticity_lower", CHECK_TOLERANCE)
}
