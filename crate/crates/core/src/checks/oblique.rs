//! Obliqueness chain and the barrier `H = h̃(∇u)`.

use super::report::{CheckRecord, Worst};
use super::{Fields, CHECK_TOLERANCE};

/// `χ = ⟨∇h, ∇h̃(∇u)⟩ > 0` and `0 < D²u(∇h̃, ∇h̃) ≤ C₁C₂ χ` on the boundary.
pub fn check_obliqueness(f: &Fields) -> Vec<CheckRecord> {
    let grid = &f.problem.grid;
    let k12 = f.constants.c1 * f.constants.c2;
    let (mut chi, mut form, mut chain) = (Worst::new(), Worst::new(), Worst::new());
    for k in grid.boundary_nodes() {
        let x = f.node(k);
        let gt = f.target[k].gradient;
        let c = f.source[k].gradient.dot(gt);
        let q = f.hessians[k].quad_form(gt);
        chi.push(c, x);
        form.push(q, x);
        chain.push(k12 * c - q, x);
    }
    vec![
        chi.record("obliqueness", 0.0),
        form.record("obliqueness_form", 0.0),
        chain.record("obliqueness_chain", CHECK_TOLERANCE),
    ]
}

/// `∇H` is a positive multiple of `∇h` on the boundary. Both gradients are
/// taken with the same discrete operator, so the tangential components
/// cancel up to the boundary residual.
pub fn check_boundary_alignment(f: &Fields) -> CheckRecord {
    let mut w = Worst::new();
    for k in f.problem.grid.boundary_nodes() {
        let (a, b) = (f.barrier_gradients[k], f.source_gradients_discrete[k]);
        let scale = a.norm() * b.norm();
        let rel = a.cross(b).abs() / scale;
        let m = if a.dot(b) > 0.0 {
            CHECK_TOLERANCE - rel
        } else {
            -1.0 - rel
        };
        w.push(m, f.node(k));
    }
    w.record("boundary_alignment", 0.0)
}

/// `H ≥ C₁C₂ h` everywhere, `⟨∇h, ∇H⟩ ≤ C₁C₂ |∇h|²` on the boundary,
/// `H < 0` inside and `H = 0` on the boundary.
pub fn check_h_barrier(f: &Fields) -> Vec<CheckRecord> {
    let grid = &f.problem.grid;
    let k12 = f.constants.c1 * f.constants.c2;
    let (mut lower, mut normal, mut inside, mut edge) =
        (Worst::new(), Worst::new(), Worst::new(), Worst::new());
    for k in 0..grid.len() {
        let x = f.node(k);
        let hb = f.barrier[k];
        lower.push(hb - k12 * f.source[k].value, x);
        if grid.is_boundary(k) {
            let g = f.source[k].gradient;
            normal.push(k12 * g.norm_sq() - g.dot(f.barrier_gradients[k]), x);
            edge.push(-hb.abs(), x);
        } else {
            inside.push(-hb, x);
        }
    }
    vec![
        lower.record("h_barrier", CHECK_TOLERANCE),
        normal.record("h_barrier_normal", CHECK_TOLERANCE),
        inside.record("h_negative_inside", 0.0),
        edge.record("h_zero_on_boundary", f.opts.solver_tol),
    ]
}
