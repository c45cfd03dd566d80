//! Legendre transform of a discrete convex potential.

use crate::exec::{try_map_indices, Execution};
use crate::geometry::Vec2;
use crate::grid::RadialGrid;
use crate::slag::SymMatrix2;
use crate::{Error, Result};

/// A point `y = ∇u(x)` of the gradient image and `v(y) = ⟨x, y⟩ - u(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegendrePoint {
    pub y: Vec2,
    pub x: Vec2,
    pub v: f64,
}

/// How far beyond the grid boundary, in units of `ρ`, a preimage may lie.
const RHO_SLACK: f64 = 1e-9;

/// Invert `∇u(x) = y` by damped Newton iteration on the interpolated
/// potential and evaluate the conjugate.
///
/// Fails with `ConvexityLost` where the interpolated Hessian is not
/// positive definite and with `OutOfRange` when `y ∉ ∇u(Ω̄)`.
pub fn legendre_transform(
    grid: &RadialGrid,
    u: &[f64],
    samples: &[Vec2],
) -> Result<Vec<LegendrePoint>> {
    let grads = grid.gradients(u, Execution::default());
    try_map_indices(samples.len(), Execution::default(), |s| {
        let y = samples[s];
        let start = (0..grid.len())
            .min_by(|&a, &b| {
                (grads[a] - y)
                    .norm_sq()
                    .total_cmp(&(grads[b] - y).norm_sq())
            })
            .unwrap_or(0);
        invert(grid, u, y, grid.node(start))
    })
}

fn invert(grid: &RadialGrid, u: &[f64], y: Vec2, start: Vec2) -> Result<LegendrePoint> {
    let scale = 1.0 + y.norm();
    let mut x = start;
    let mut jet = grid.interpolate(u, x)?;
    for _ in 0..60 {
        let res = jet.gradient - y;
        if res.norm() <= 1e-12 * scale {
            let p = grid.polar(x)?;
            if p.rho > 1.0 + RHO_SLACK {
                return Err(Error::OutOfRange(y));
            }
            return Ok(LegendrePoint {
                y,
                x,
                v: x.dot(y) - jet.value,
            });
        }
        if !(jet.hessian.min_eigenvalue() > 0.0) {
            return Err(Error::ConvexityLost(x));
        }
        let step = jet
            .hessian
            .inverse()
            .ok_or(Error::ConvexityLost(x))?
            .apply(res);
        let mut lambda = 1.0;
        loop {
            let trial = x - step * lambda;
            // stay within the extrapolation band
            let ok = grid.polar(trial).map(|p| p.rho <= 1.1).unwrap_or(false);
            if ok {
                let tj = grid.interpolate(u, trial)?;
                if (tj.gradient - y).norm() < res.norm() || lambda < 1e-3 {
                    x = trial;
                    jet = tj;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                return Err(Error::OutOfRange(y));
            }
        }
    }
    Err(Error::OutOfRange(y))
}

/// Hessian of the conjugate potential at `y` by central differences of
/// step `delta` on the Legendre transform.
pub fn conjugate_hessian_fd(
    grid: &RadialGrid,
    u: &[f64],
    y: Vec2,
    delta: f64,
) -> Result<SymMatrix2> {
    let e1 = Vec2::new(delta, 0.0);
    let e2 = Vec2::new(0.0, delta);
    let pts = [
        y,
        y + e1,
        y - e1,
        y + e2,
        y - e2,
        y + e1 + e2,
        y + e1 - e2,
        y - e1 + e2,
        y - e1 - e2,
    ];
    let v: Vec<f64> = legendre_transform(grid, u, &pts)?
        .iter()
        .map(|p| p.v)
        .collect();
    let d2 = delta * delta;
    Ok(SymMatrix2::new(
        (v[1] - 2.0 * v[0] + v[2]) / d2,
        (v[5] - v[6] - v[7] + v[8]) / (4.0 * d2),
        (v[3] - 2.0 * v[0] + v[4]) / d2,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainDescriptor;

    #[test]
    fn conjugate_of_a_quadratic() {
        // u = ½ xᵀAx has v = ½ yᵀA⁻¹y
        let dom = DomainDescriptor::ellipse(1.0, 0.7).build().unwrap();
        let g = RadialGrid::build(dom.defining_function(), Vec2::ZERO, 32, 64).unwrap();
        let a = SymMatrix2::new(2.0, 0.5, 1.0);
        let u = g.sample(|x| 0.5 * a.quad_form(x));
        let ainv = a.inverse().unwrap();
        let ys = [Vec2::new(0.3, 0.2), Vec2::new(-0.8, 0.1), Vec2::ZERO];
        for p in legendre_transform(&g, &u, &ys).unwrap() {
            assert!((p.v - 0.5 * ainv.quad_form(p.y)).abs() < 5e-5, "{p:?}");
            assert!((p.x - ainv.apply(p.y)).norm() < 1e-3);
        }
        let h = conjugate_hessian_fd(&g, &u, Vec2::new(0.2, -0.1), 1e-3).unwrap();
        assert!((h - ainv).max_abs() < 2e-2, "{h:?}");
    }

    #[test]
    fn far_points_are_out_of_range() {
        let dom = DomainDescriptor::disk(1.0).build().unwrap();
        let g = RadialGrid::build(dom.defining_function(), Vec2::ZERO, 12, 24).unwrap();
        let u = g.sample(|x| 0.5 * x.norm_sq());
        assert!(matches!(
            legendre_transform(&g, &u, &[Vec2::new(2.0, 0.0)]),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn concave_data_lose_convexity() {
        let dom = DomainDescriptor::disk(1.0).build().unwrap();
        let g = RadialGrid::build(dom.defining_function(), Vec2::ZERO, 12, 24).unwrap();
        let u = g.sample(|x| 0.5 * x.x * x.x - 0.5 * x.y * x.y);
        assert!(matches!(
            legendre_transform(&g, &u, &[Vec2::new(0.1, 0.1)]),
            Err(Error::ConvexityLost(_))
        ));
    }
}
