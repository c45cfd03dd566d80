//! Concave modification of `arctan` outside an eigenvalue window.
//!
//! `ψ` solves `ψ'' = -2s/(1+s²)² · η(s)` with `ψ(1) = π/4`, `ψ'(1) = 1/2`,
//! where `η` is a `C²` cutoff equal to one on `[lo, hi]` and zero outside
//! `(0, 2·hi)`. Hence `ψ = arctan` on the window and `ψ` is affine outside
//! `[0, 2·hi]`.

use super::matrix::SymMatrix2;
use super::quadrature::gauss_legendre;
use crate::{Error, Result};

const QUAD_POINTS: usize = 24;

#[derive(Debug, Clone)]
pub struct PsiProfile {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // affine continuation data at s = 0 and s = 2·hi
    value_at_zero: f64,
    slope_at_zero: f64,
    value_at_end: f64,
    slope_at_end: f64,
}

/// Quintic smoothstep, `C²` at both ends.
pub(crate) fn smoothstep(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    z * z * z * (10.0 + z * (-15.0 + 6.0 * z))
}

impl PsiProfile {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < 1.0 && hi > 1.0 && hi.is_finite()) {
            return Err(Error::Parameter(format!(
                "psi window must satisfy 0 < lo < 1 < hi, got [{lo}, {hi}]"
            )));
        }
        let (nodes, weights) = gauss_legendre(QUAD_POINTS);
        let mut p = PsiProfile {
            lo,
            hi,
            nodes,
            weights,
            value_at_zero: 0.0,
            slope_at_zero: 0.0,
            value_at_end: 0.0,
            slope_at_end: 0.0,
        };
        let (v0, d0) = p.transition_value(0.0);
        let (v1, d1) = p.transition_value(2.0 * hi);
        p.value_at_zero = v0;
        p.slope_at_zero = d0;
        p.value_at_end = v1;
        p.slope_at_end = d1;
        Ok(p)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Cutoff `η`.
    pub fn eta(&self, s: f64) -> f64 {
        if s <= 0.0 || s >= 2.0 * self.hi {
            0.0
        } else if s < self.lo {
            smoothstep(s / self.lo)
        } else if s <= self.hi {
            1.0
        } else {
            1.0 - smoothstep((s - self.hi) / self.hi)
        }
    }

    fn second_derivative(&self, s: f64) -> f64 {
        let q = 1.0 + s * s;
        -2.0 * s / (q * q) * self.eta(s)
    }

    fn integrate(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// `(ψ, ψ')` on the transition intervals `[0, lo]` and `[hi, 2 hi]`,
    /// integrating from the nearest window endpoint where `ψ = arctan`.
    fn transition_value(&self, s: f64) -> (f64, f64) {
        let a = if s < self.lo { self.lo } else { self.hi };
        let d_a = 1.0 / (1.0 + a * a);
        // ψ'(s) = ψ'(a) + ∫ₐˢ ψ''
        let d = d_a + self.integrate(|x| self.second_derivative(x), a, s);
        // ψ(s) = ψ(a) + [σψ'(σ)]ₐˢ - ∫ₐˢ σψ''(σ) dσ
        let v =
            a.atan() + s * d - a * d_a - self.integrate(|x| x * self.second_derivative(x), a, s);
        (v, d)
    }

    /// `(ψ(s), ψ'(s), ψ''(s))`.
    pub fn psi(&self, s: f64) -> (f64, f64, f64) {
        let end = 2.0 * self.hi;
        if s <= 0.0 {
            (
                self.value_at_zero + self.slope_at_zero * s,
                self.slope_at_zero,
                0.0,
            )
        } else if s >= end {
            (
                self.value_at_end + self.slope_at_end * (s - end),
                self.slope_at_end,
                0.0,
            )
        } else if s >= self.lo && s <= self.hi {
            let q = 1.0 + s * s;
            (s.atan(), 1.0 / q, -2.0 * s / (q * q))
        } else {
            let (v, d) = self.transition_value(s);
            (v, d, self.second_derivative(s))
        }
    }

    /// True when `s` lies in the window where `ψ = arctan`.
    pub fn in_window(&self, s: f64) -> bool {
        s >= self.lo && s <= self.hi
    }
}

/// `Ψ(M) = Σ ψ(λₖ(M))`.
pub fn concavified_angle(profile: &PsiProfile, m: &SymMatrix2) -> f64 {
    m.eigenvalues().iter().map(|&l| profile.psi(l).0).sum()
}
