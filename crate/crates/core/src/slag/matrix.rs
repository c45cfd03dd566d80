use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::geometry::{Mat2, Vec2};

/// Symmetric 2×2 matrix stored by its three independent entries.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymMatrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

/// Spectral decomposition `M = λ₁ v₁v₁ᵀ + λ₂ v₂v₂ᵀ` with `λ₁ ≤ λ₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    /// Unit eigenvectors, `vectors[k]` belongs to `values[k]`.
    pub vectors: [Vec2; 2],
}

impl SymMatrix2 {
    pub const ZERO: SymMatrix2 = SymMatrix2 {
        a11: 0.0,
        a12: 0.0,
        a22: 0.0,
    };
    pub const IDENTITY: SymMatrix2 = SymMatrix2 {
        a11: 1.0,
        a12: 0.0,
        a22: 1.0,
    };

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        SymMatrix2 { a11, a12, a22 }
    }

    pub const fn diag(d1: f64, d2: f64) -> Self {
        SymMatrix2::new(d1, 0.0, d2)
    }

    pub fn scaled_identity(s: f64) -> Self {
        SymMatrix2::new(s, 0.0, s)
    }

    /// `v vᵀ`
    pub fn outer(v: Vec2) -> Self {
        SymMatrix2::new(v.x * v.x, v.x * v.y, v.y * v.y)
    }

    /// Symmetric part of a general matrix.
    pub fn sym_part(m: &Mat2) -> Self {
        SymMatrix2::new(m.m[0][0], 0.5 * (m.m[0][1] + m.m[1][0]), m.m[1][1])
    }

    pub fn to_mat2(self) -> Mat2 {
        Mat2 {
            m: [[self.a11, self.a12], [self.a12, self.a22]],
        }
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a12
    }

    /// `tr(A·B)` for symmetric `A`, `B`.
    pub fn frobenius_dot(&self, o: &SymMatrix2) -> f64 {
        self.a11 * o.a11 + 2.0 * self.a12 * o.a12 + self.a22 * o.a22
    }

    pub fn max_abs(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a22.abs())
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.a11 * v.x + self.a12 * v.y,
            self.a12 * v.x + self.a22 * v.y,
        )
    }

    /// `vᵀ M v`
    pub fn quad_form(&self, v: Vec2) -> f64 {
        self.a11 * v.x * v.x + 2.0 * self.a12 * v.x * v.y + self.a22 * v.y * v.y
    }

    /// `vᵀ M w`
    pub fn bilinear(&self, v: Vec2, w: Vec2) -> f64 {
        v.dot(self.apply(w))
    }

    /// `M²`
    pub fn square(&self) -> SymMatrix2 {
        SymMatrix2::new(
            self.a11 * self.a11 + self.a12 * self.a12,
            self.a12 * (self.a11 + self.a22),
            self.a12 * self.a12 + self.a22 * self.a22,
        )
    }

    pub fn inverse(&self) -> Option<SymMatrix2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(SymMatrix2::new(self.a22 / d, -self.a12 / d, self.a11 / d))
    }

    /// `Pᵀ M P`
    pub fn congruence(&self, p: &Mat2) -> SymMatrix2 {
        let m = self.to_mat2();
        let r = p.transpose().matmul(&m).matmul(p);
        SymMatrix2::sym_part(&r)
    }

    /// Closed-form eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.a11 + self.a22);
        let half_diff = 0.5 * (self.a11 - self.a22);
        let r = half_diff.hypot(self.a12);
        [mean - r, mean + r]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn eigen(&self) -> Eigen2 {
        let values = self.eigenvalues();
        let angle = 0.5 * (2.0 * self.a12).atan2(self.a11 - self.a22);
        let v2 = Vec2::polar(angle);
        Eigen2 {
            values,
            vectors: [v2.perp(), v2],
        }
    }

    /// `Q f(Λ) Qᵀ`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> SymMatrix2 {
        let e = self.eigen();
        let p2 = SymMatrix2::outer(e.vectors[1]);
        let p1 = SymMatrix2::IDENTITY - p2;
        p1 * f(e.values[0]) + p2 * f(e.values[1])
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }
}

impl Add for SymMatrix2 {
    type Output = SymMatrix2;
    fn add(self, o: SymMatrix2) -> SymMatrix2 {
        SymMatrix2::new(self.a11 + o.a11, self.a12 + o.a12, self.a22 + o.a22)
    }
}

impl Sub for SymMatrix2 {
    type Output = SymMatrix2;
    fn sub(self, o: SymMatrix2) -> SymMatrix2 {
        SymMatrix2::new(self.a11 - o.a11, self.a12 - o.a12, self.a22 - o.a22)
    }
}

impl Mul<f64> for SymMatrix2 {
    type Output = SymMatrix2;
    fn mul(self, s: f64) -> SymMatrix2 {
        SymMatrix2::new(self.a11 * s, self.a12 * s, self.a22 * s)
    }
}
