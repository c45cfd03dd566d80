//! The concavified operator `Ψ` and the oblique boundary map `G`.

use super::report::{CheckRecord, Worst};
use super::{Fields, CHECK_TOLERANCE};
use crate::domain::{ray_root, DefiningFunction};
use crate::geometry::Vec2;
use crate::slag::psi::smoothstep;
use crate::slag::{concavified_angle, PsiProfile};
use crate::solver::ProblemInstance;
use crate::{Error, Result};

/// Last exit of the line `y + tν` from the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayExit {
    pub tau: f64,
    pub point: Vec2,
    /// Outer unit normal of the target at `point`.
    pub normal: Vec2,
}

/// `τ = sup {t : y + tν ∈ Ω̃}` with the exit point and normal there, or
/// `None` when the line misses the target.
pub fn ray_exit(target: &DefiningFunction, nu: Vec2, y: Vec2) -> Result<Option<RayExit>> {
    let nu = nu.normalized();
    // minimize the convex restriction g(t) = h̃(y + tν)
    let mut t = 0.0;
    let mut j = target.eval(y)?;
    for _ in 0..200 {
        let slope = j.gradient.dot(nu);
        let curv = j.hessian.quad_form(nu);
        if !(curv > 0.0) {
            return Err(Error::Construction {
                reason: "target defining function is not convex along the ray".into(),
                point: y + nu * t,
            });
        }
        let step = -slope / curv;
        if step.abs() <= 1e-14 * (1.0 + t.abs()) || j.value < 0.0 {
            break;
        }
        let mut lambda = 1.0;
        loop {
            let trial = t + lambda * step;
            match target.eval(y + nu * trial) {
                Ok(jt) if jt.value <= j.value => {
                    t = trial;
                    j = jt;
                    break;
                }
                _ => lambda *= 0.5,
            }
            if lambda < 1e-12 {
                break;
            }
        }
        if lambda < 1e-12 {
            break;
        }
    }
    if j.value >= 0.0 {
        return Ok(None);
    }
    let origin = y + nu * t;
    let root = ray_root(|x| target.eval(x), origin, nu.y.atan2(nu.x), 0.0, 1.0)?;
    let tau = t + root.r;
    let point = y + nu * tau;
    let normal = target.eval(point)?.gradient.normalized();
    Ok(Some(RayExit { tau, point, normal }))
}

/// `C²` cutoff: zero below `1/(2 C₁₂)`, one above `1/C₁₂`.
pub fn chi_cutoff(s: f64, c12: f64) -> f64 {
    let lo = 0.5 / c12;
    smoothstep((s - lo) / lo)
}

/// `G(x, y) = ⟨ν, y⟩ - χ(⟨ν, ν̃(Φ)⟩)(⟨ν, y⟩ + τ)` for a boundary point `x`
/// of the source, and `⟨ν, y⟩` when the line `y + tν` misses the target.
pub fn oblique_g(p: &ProblemInstance, x: Vec2, y: Vec2, c12: f64) -> Result<f64> {
    let nu = p.source.unit_normal(x)?;
    let s = nu.dot(y);
    Ok(match ray_exit(&p.target, nu, y)? {
        None => s,
        Some(e) => s - chi_cutoff(nu.dot(e.normal), c12) * (s + e.tau),
    })
}

/// Profile whose window `[min(λ_min/2, 1/2), max(2 λ_max, 2)]` contains
/// every eigenvalue of the solution.
pub fn psi_profile_for(lambda_min: f64, lambda_max: f64) -> Result<PsiProfile> {
    PsiProfile::new((0.5 * lambda_min).min(0.5), (2.0 * lambda_max).max(2.0))
}

/// `Ψ(D²u) = c` inside and `G(x, ∇u) = 0` on the boundary.
pub fn check_reformulation(f: &Fields) -> Result<Vec<CheckRecord>> {
    let grid = &f.problem.grid;
    let profile = psi_profile_for(f.constants.lambda_min, f.constants.lambda_max)?;
    let (mut psi, mut g) = (Worst::new(), Worst::new());
    for k in 0..grid.len() {
        let x = f.node(k);
        if grid.is_boundary(k) {
            let v = oblique_g(f.problem, x, f.gradients[k], f.constants.c12)?;
            g.push(-v.abs(), x);
        } else {
            psi.push(
                -(concavified_angle(&profile, &f.hessians[k]) - f.c()).abs(),
                x,
            );
        }
    }
    Ok(vec![
        psi.record("reformulation_psi", 2.0 * f.opts.solver_tol),
        g.record("reformulation_g", CHECK_TOLERANCE),
    ])
}
