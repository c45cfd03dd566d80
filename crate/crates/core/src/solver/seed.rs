//! Initial guesses from exactly solvable ellipse-to-ellipse problems.

use std::f64::consts::TAU;

use faer::prelude::*;
use faer::Mat;

use crate::domain::DefiningFunction;
use crate::geometry::Vec2;
use crate::grid::RadialGrid;
use crate::slag::{lagrangian_angle, SymMatrix2};
use crate::solver::{ProblemInstance, SolverState};
use crate::{Error, Result};

/// Ellipse `{(x - center)ᵀ form (x - center) ≤ 1}` fitted to a level curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseFit {
    pub center: Vec2,
    pub form: SymMatrix2,
    /// Largest `|(b - center)ᵀ form (b - center) - 1|` over the samples.
    pub residual: f64,
}

const FIT_SAMPLES: usize = 128;

/// Least-squares conic through samples of the zero level of `df`.
pub fn fit_ellipse(df: &DefiningFunction) -> Result<EllipseFit> {
    let o = df.argmin();
    let pts = (0..FIT_SAMPLES)
        .map(|k| df.boundary_point(o, TAU * k as f64 / FIT_SAMPLES as f64))
        .collect::<Result<Vec<_>>>()?;
    let scale = pts.iter().map(|p| (*p - o).norm()).fold(0.0, f64::max);
    // a z₁² + b z₁z₂ + c z₂² + d z₁ + e z₂ = 1 in scaled coordinates about o
    let m = Mat::<f64>::from_fn(pts.len(), 5, |i, j| {
        let z = (pts[i] - o) * (1.0 / scale);
        [z.x * z.x, z.x * z.y, z.y * z.y, z.x, z.y][j]
    });
    let rhs = Mat::<f64>::from_fn(pts.len(), 1, |_, _| 1.0);
    let sol = m.qr().solve_lstsq(&rhs);
    let (a, b, c, d, e) = (
        sol[(0, 0)],
        sol[(1, 0)],
        sol[(2, 0)],
        sol[(3, 0)],
        sol[(4, 0)],
    );
    let p_hat = SymMatrix2::new(a, 0.5 * b, c);
    let inv = p_hat
        .inverse()
        .filter(|_| p_hat.min_eigenvalue() > 0.0)
        .ok_or_else(|| Error::Geometry("level curve is not close to an ellipse".into()))?;
    let zc = inv.apply(Vec2::new(d, e)) * -0.5;
    let k = 1.0 + p_hat.quad_form(zc);
    let form = p_hat * (1.0 / (k * scale * scale));
    let center = o + zc * scale;
    let residual = pts
        .iter()
        .map(|p| (form.quad_form(*p - center) - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(EllipseFit {
        center,
        form,
        residual,
    })
}

/// Symmetric positive `Q` with `Q P₂ Q = P₁`, so that `x ↦ Q x` maps the
/// ellipse of form `P₁` onto the ellipse of form `P₂`.
pub fn ellipse_map(p1: &SymMatrix2, p2: &SymMatrix2) -> SymMatrix2 {
    let s = p2.map_spectrum(f64::sqrt);
    let s_inv = p2.map_spectrum(|l| 1.0 / l.sqrt());
    let mid = p1.congruence(&s.to_mat2()).map_spectrum(f64::sqrt);
    mid.congruence(&s_inv.to_mat2())
}

/// Exact solution for the ellipse pair, `u = ½(x - x_c)ᵀQ(x - x_c) + ⟨y_c, x⟩`,
/// sampled on the grid and normalized to zero mean.
pub fn quadratic_solution(grid: &RadialGrid, src: &EllipseFit, dst: &EllipseFit) -> SolverState {
    let q = ellipse_map(&src.form, &dst.form);
    let (xc, yc) = (src.center, dst.center);
    let u = grid.sample(|x| 0.5 * q.quad_form(x - xc) + yc.dot(x));
    let mut s = SolverState::new(u, lagrangian_angle(&q));
    s.normalize(grid);
    s
}

/// `u = R/(2r) |x - x₀|² + ⟨y₀, x⟩` for `B_r(x₀) → B_R(y₀)`, with
/// `c = 2 arctan(R/r)`.
pub fn initial_ball_solution(
    grid: &RadialGrid,
    x0: Vec2,
    r: f64,
    y0: Vec2,
    big_r: f64,
) -> Result<SolverState> {
    if !(r > 0.0 && big_r > 0.0) {
        return Err(Error::Parameter(format!(
            "ball radii must be positive, got {r} and {big_r}"
        )));
    }
    let k = big_r / r;
    let u = grid.sample(|x| 0.5 * k * (x - x0).norm_sq() + y0.dot(x));
    let mut s = SolverState::new(u, 2.0 * k.atan());
    s.normalize(grid);
    Ok(s)
}

/// Seed for an instance from ellipse fits of both domains. Also returns
/// the larger of the two fit residuals.
pub fn seed_solution(p: &ProblemInstance) -> Result<(SolverState, f64)> {
    let src = fit_ellipse(&p.source)?;
    let dst = fit_ellipse(&p.target)?;
    Ok((
        quadratic_solution(&p.grid, &src, &dst),
        src.residual.max(dst.residual),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainDescriptor;

    #[test]
    fn fit_recovers_a_rotated_ellipse() {
        let d = DomainDescriptor::ellipse(1.5, 0.4)
            .rotated(0.7)
            .centered(Vec2::new(0.3, -0.2));
        let dom = d.build().unwrap();
        let fit = fit_ellipse(dom.defining_function()).unwrap();
        let exact = dom
            .defining_function()
            .eval(Vec2::new(0.3, -0.2))
            .unwrap()
            .hessian
            * 0.5;
        assert!((fit.form - exact).max_abs() < 1e-10);
        assert!((fit.center - Vec2::new(0.3, -0.2)).norm() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn ellipse_map_is_a_square_root() {
        let p1 = SymMatrix2::new(2.0, 0.3, 0.7);
        let p2 = SymMatrix2::new(0.5, -0.2, 1.4);
        let q = ellipse_map(&p1, &p2);
        let back = p2.congruence(&q.to_mat2());
        assert!((back - p1).max_abs() < 1e-13);
        assert!(q.min_eigenvalue() > 0.0);
    }

    #[test]
    fn ball_solution_constant() {
        let dom = DomainDescriptor::disk(1.0).build().unwrap();
        let g = RadialGrid::build(dom.defining_function(), Vec2::ZERO, 8, 16).unwrap();
        let s = initial_ball_solution(&g, Vec2::ZERO, 1.0, Vec2::ZERO, 1.0).unwrap();
        assert!((s.c - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(g.integrate(&s.u).abs() < 1e-14);
        assert!(initial_ball_solution(&g, Vec2::ZERO, 0.0, Vec2::ZERO, 1.0).is_err());
    }
}
