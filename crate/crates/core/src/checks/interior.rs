//! Interior second derivative estimates.
//!
//! `wᵀD²u w` attains its maximum on the boundary, and differentiating the
//! equation once and twice gives `aᵢⱼ ∂ᵢ∂ⱼ ∂ₖu = 0` and
//! `aᵢⱼ ∂ᵢ∂ⱼ (wᵀD²u w) ≥ 0`. The latter two are evaluated by differencing
//! the discrete gradient and Hessian fields, which is only first-order
//! accurate, so their slack scales with the mesh. Near the pole the error
//! of these fourth derivatives behaves like `(Δρ/ρ)²`, which stays O(1) on
//! the first rings at every resolution, so they are evaluated on the outer
//! annulus `ρ ≥ ½` (three quarters of the area), at least two rings inside
//! the boundary and only where the angular cell width `ρ Δφ` is no smaller
//! than the radial width `Δρ`. There the error converges like `mesh²`.

use std::f64::consts::PI;

use super::report::{CheckRecord, Worst};
use super::Fields;
use crate::geometry::Vec2;

/// Number of directions `w` sampled on the half circle.
pub const DIRECTIONS: usize = 16;

fn directions() -> impl Iterator<Item = Vec2> {
    (0..DIRECTIONS).map(|m| Vec2::polar(PI * m as f64 / DIRECTIONS as f64))
}

pub fn check_interior_c2(f: &Fields) -> Vec<CheckRecord> {
    let grid = &f.problem.grid;
    let exec = f.opts.exec;
    let h = f.constants.mesh;
    let scale = 1.0 + f.hessians.iter().map(|m| m.max_abs()).fold(0.0, f64::max);
    let dphi = std::f64::consts::TAU / grid.n_phi() as f64;
    let deep = |k: usize| {
        let i = grid.position(k).0;
        2 * i >= grid.n_rho() && i + 2 <= grid.n_rho() && i as f64 * dphi >= 1.0
    };

    let mut max_principle = Worst::new();
    let mut subharmonic = Worst::new();
    for w in directions() {
        let psi: Vec<f64> = f.hessians.iter().map(|m| m.quad_form(w)).collect();
        let (mut inner, mut inner_at) = (f64::NEG_INFINITY, Vec2::ZERO);
        let mut outer = f64::NEG_INFINITY;
        for (k, &v) in psi.iter().enumerate() {
            if grid.is_boundary(k) {
                outer = outer.max(v);
            } else if v > inner {
                inner = v;
                inner_at = f.node(k);
            }
        }
        max_principle.push(outer - inner, inner_at);
        let d2 = grid.hessians(&psi, exec);
        for k in (0..grid.len()).filter(|&k| deep(k)) {
            subharmonic.push(f.coefficients[k].frobenius_dot(&d2[k]), f.node(k));
        }
    }

    let mut convex = Worst::new();
    for (k, m) in f.hessians.iter().enumerate() {
        convex.push(m.min_eigenvalue(), f.node(k));
    }

    let mut harmonic = Worst::new();
    for comp in 0..2 {
        let g: Vec<f64> = f.gradients.iter().map(|v| v.to_array()[comp]).collect();
        let d2 = grid.hessians(&g, exec);
        for k in (0..grid.len()).filter(|&k| deep(k)) {
            harmonic.push(-f.coefficients[k].frobenius_dot(&d2[k]).abs(), f.node(k));
        }
    }

    vec![
        max_principle.record("interior_max_principle", 5.0 * h * h * scale),
        convex.record("interior_convexity", 0.0),
        harmonic.record("differentiated_equation", 10.0 * h * scale),
        subharmonic.record("directional_subharmonic", 10.0 * h * scale),
    ]
}
