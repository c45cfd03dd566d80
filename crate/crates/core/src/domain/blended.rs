//! Defining functions that are exact quadratics near their minimum.
//!
//! Starting from the signed distance `d` to the boundary of a convex domain,
//!
//! ```text
//! h₁ = d²/(4D) - d,          h₂ = ε|x - x₀|²/(4D²) - ε/2,
//! h  = (h₁ + h₂)/2 + Φ((h₁ - h₂)/2),
//! ```
//!
//! where `D` is the diameter and `Φ` a smoothed absolute value. `h` equals
//! `h₁` in a collar of the boundary and `h₂` deep inside, so the sublevel
//! sets close to the minimum are round balls about `x₀`.

use crate::domain::boundary::BoundaryCurve;
use crate::domain::shape::Jet;
use crate::geometry::Vec2;
use crate::slag::SymMatrix2;
use crate::{Error, Result};

/// Smoothed `|s|` with `Φ = |s|` for `|s| ≥ δ`, convex, even and C³.
///
/// On `|s| < δ` the second derivative is `15/(8δ) (1 - s²/δ²)²`.
/// Returns `(Φ, Φ', Φ'')`.
pub fn blending_phi(s: f64, delta: f64) -> (f64, f64, f64) {
    if s.abs() >= delta {
        return (s.abs(), s.signum(), 0.0);
    }
    let c = 15.0 / (8.0 * delta);
    let (d2, d4) = (delta * delta, delta.powi(4));
    let s2 = s * s;
    let val =
        5.0 * delta / 16.0 + c * (s2 / 2.0 - s2 * s2 / (6.0 * d2) + s2 * s2 * s2 / (30.0 * d4));
    let der = c * (s - 2.0 * s * s2 / (3.0 * d2) + s * s2 * s2 / (5.0 * d4));
    let q = 1.0 - s2 / d2;
    (val, der, c * q * q)
}

#[derive(Debug, Clone)]
pub struct BlendedDefining {
    curve: BoundaryCurve,
    epsilon: f64,
    diameter: f64,
    center: Vec2,
    center_distance: f64,
    max_curvature: f64,
}

impl BlendedDefining {
    /// `epsilon = None` picks `min(d(x₀)/2, 1/(2 κ_max))`.
    pub fn build(curve: BoundaryCurve, epsilon: Option<f64>, center: Vec2) -> Result<Self> {
        let (_, diameter) = curve.area_and_diameter()?;
        let proj = curve.project(center)?;
        let center_distance = proj.signed_distance;
        if center_distance <= 0.0 {
            return Err(Error::Construction {
                reason: "centre point is not inside the domain".into(),
                point: center,
            });
        }
        let mut max_curvature = 0.0f64;
        for &b in curve.samples() {
            let jet = curve.level(b);
            let gn = jet.gradient.norm();
            let t = (jet.gradient * (1.0 / gn)).perp();
            let k = jet.hessian.quad_form(t) / gn;
            if k <= 0.0 {
                return Err(Error::Construction {
                    reason: "boundary is not uniformly convex".into(),
                    point: b,
                });
            }
            max_curvature = max_curvature.max(k);
        }
        let epsilon = epsilon.unwrap_or(0.5 * center_distance.min(1.0 / max_curvature));
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Parameter(format!(
                "collar width must be positive, got {epsilon}"
            )));
        }
        if center_distance <= epsilon {
            return Err(Error::Construction {
                reason: format!(
                    "collar width {epsilon} is not below the distance {center_distance} from the centre to the boundary"
                ),
                point: center,
            });
        }
        let h = BlendedDefining {
            curve,
            epsilon,
            diameter,
            center,
            center_distance,
            max_curvature,
        };
        h.check_collar()?;
        Ok(h)
    }

    /// `h₁` is convex wherever the projection is smooth, i.e. `κ d < 1`.
    fn check_collar(&self) -> Result<()> {
        let fractions = [-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0];
        for (k, &b) in self.curve.samples().iter().enumerate() {
            if k % 4 != 0 {
                continue;
            }
            let n = self.curve.level(b).gradient.normalized();
            for f in fractions {
                let x = b - n * (f * self.epsilon);
                let h1 = self.h1(x)?;
                if !(h1.hessian.min_eigenvalue() > 0.0) {
                    return Err(Error::Construction {
                        reason: "boundary collar function is not convex; reduce epsilon".into(),
                        point: x,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    /// Distance from the centre point to the boundary.
    pub fn center_distance(&self) -> f64 {
        self.center_distance
    }

    pub fn max_curvature(&self) -> f64 {
        self.max_curvature
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    /// Signed distance to the boundary, positive inside.
    pub fn distance(&self, x: Vec2) -> Result<f64> {
        Ok(self.curve.project(x)?.signed_distance)
    }

    pub fn h1(&self, x: Vec2) -> Result<Jet> {
        let p = self.curve.project(x)?;
        self.h1_from(p.signed_distance, p.normal, p.curvature, x)
    }

    fn h1_from(&self, d: f64, normal: Vec2, kappa: f64, x: Vec2) -> Result<Jet> {
        let dd = self.diameter;
        let denom = 1.0 - kappa * d;
        if denom <= 0.0 {
            return Err(Error::Construction {
                reason: "point lies beyond the reach of the boundary".into(),
                point: x,
            });
        }
        let grad_d = -normal;
        let t = normal.perp();
        let hess_d = SymMatrix2::outer(t) * (-kappa / denom);
        let w = d / (2.0 * dd) - 1.0;
        Ok(Jet {
            value: d * d / (4.0 * dd) - d,
            gradient: grad_d * w,
            hessian: SymMatrix2::outer(grad_d) * (1.0 / (2.0 * dd)) + hess_d * w,
        })
    }

    pub fn h2(&self, x: Vec2) -> Jet {
        let (e, dd) = (self.epsilon, self.diameter);
        let r = x - self.center;
        let k = e / (2.0 * dd * dd);
        Jet {
            value: 0.5 * k * r.norm_sq() - 0.5 * e,
            gradient: r * k,
            hessian: SymMatrix2::scaled_identity(k),
        }
    }

    /// The blended function before normalization, with infimum `-ε/2`.
    pub fn raw(&self, x: Vec2) -> Result<Jet> {
        let h2 = self.h2(x);
        let delta = self.epsilon / 16.0;
        // 1-Lipschitz lower bound on d; h₁ is decreasing in d on [0, 2D]
        let d_lb = self.center_distance - (x - self.center).norm();
        if d_lb > 0.0 {
            let h1_ub = d_lb * d_lb / (4.0 * self.diameter) - d_lb;
            if h1_ub - h2.value <= -2.0 * delta {
                return Ok(h2);
            }
        }
        let p = self.curve.project(x)?;
        if p.signed_distance < -self.epsilon {
            return Err(Error::DomainExceeded(x));
        }
        let s_val = {
            let d = p.signed_distance;
            0.5 * (d * d / (4.0 * self.diameter) - d - h2.value)
        };
        if s_val <= -delta {
            return Ok(h2);
        }
        let h1 = self.h1_from(p.signed_distance, p.normal, p.curvature, x)?;
        let (phi, dphi, ddphi) = blending_phi(0.5 * (h1.value - h2.value), delta);
        let dg = h1.gradient - h2.gradient;
        Ok(Jet {
            value: 0.5 * (h1.value + h2.value) + phi,
            gradient: h1.gradient * (0.5 * (1.0 + dphi)) + h2.gradient * (0.5 * (1.0 - dphi)),
            hessian: h1.hessian * (0.5 * (1.0 + dphi))
                + h2.hessian * (0.5 * (1.0 - dphi))
                + SymMatrix2::outer(dg) * (0.25 * ddphi),
        })
    }
}
