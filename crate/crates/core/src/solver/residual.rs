//! Discrete equations and their exact linearization.
//!
//! Rows are indexed like the nodes: interior nodes carry `F(D²u) - c`,
//! boundary nodes carry `h̃(∇u)`, and a final row imposes `Σ wₖ uₖ = 0`.

use crate::exec::{try_map_indices, Execution};
use crate::geometry::Vec2;
use crate::slag::{angle_coefficients, lagrangian_angle, SymMatrix2};
use crate::solver::ProblemInstance;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub values: Vec<f64>,
    pub interior_inf: f64,
    pub boundary_inf: f64,
    pub normalization: f64,
}

impl Residual {
    pub fn max_norm(&self) -> f64 {
        self.interior_inf
            .max(self.boundary_inf)
            .max(self.normalization.abs())
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Nodal gradients and Hessians of a discrete potential.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub gradients: Vec<Vec2>,
    pub hessians: Vec<SymMatrix2>,
}

pub fn derivatives(p: &ProblemInstance, u: &[f64], exec: Execution) -> Derivatives {
    Derivatives {
        gradients: p.grid.gradients(u, exec),
        hessians: p.grid.hessians(u, exec),
    }
}

/// Fails with `ConvexityLost` at the first node whose discrete Hessian is
/// not positive definite.
pub fn check_convexity(p: &ProblemInstance, d: &Derivatives) -> Result<()> {
    match d.hessians.iter().position(|h| !(h.min_eigenvalue() > 0.0)) {
        Some(k) => Err(Error::ConvexityLost(p.grid.node(k))),
        None => Ok(()),
    }
}

/// Obliqueness `⟨∇h, ∇h̃(∇u)⟩` at each boundary node, in boundary order.
pub fn obliqueness(p: &ProblemInstance, d: &Derivatives) -> Result<Vec<f64>> {
    p.grid
        .boundary_nodes()
        .map(|k| {
            Ok(p.source_gradient(k)
                .dot(p.target.eval(d.gradients[k])?.gradient))
        })
        .collect()
}

pub fn check_obliqueness(p: &ProblemInstance, d: &Derivatives) -> Result<()> {
    for (off, chi) in obliqueness(p, d)?.into_iter().enumerate() {
        if !(chi > 0.0) {
            return Err(Error::ObliquenessLost {
                node: p.grid.boundary_nodes().start + off,
                value: chi,
            });
        }
    }
    Ok(())
}

pub fn residual(p: &ProblemInstance, u: &[f64], c: f64, exec: Execution) -> Result<Residual> {
    let d = derivatives(p, u, exec);
    residual_from(p, u, c, &d, exec)
}

pub fn residual_from(
    p: &ProblemInstance,
    u: &[f64],
    c: f64,
    d: &Derivatives,
    exec: Execution,
) -> Result<Residual> {
    let grid = &p.grid;
    let n = grid.len();
    let mut values = try_map_indices(n, exec, |k| {
        if grid.is_boundary(k) {
            Ok(p.target.eval(d.gradients[k])?.value)
        } else {
            Ok(lagrangian_angle(&d.hessians[k]) - c)
        }
    })?;
    let (mut interior_inf, mut boundary_inf) = (0.0f64, 0.0f64);
    for (k, v) in values.iter().enumerate() {
        if grid.is_boundary(k) {
            boundary_inf = boundary_inf.max(v.abs());
        } else {
            interior_inf = interior_inf.max(v.abs());
        }
    }
    let normalization = grid.integrate(u);
    values.push(normalization);
    Ok(Residual {
        values,
        interior_inf,
        boundary_inf,
        normalization,
    })
}

/// Sparse Jacobian in coordinate form.
#[derive(Debug, Clone)]
pub struct Jacobian {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Jacobian {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }
}

/// Exact derivative of [`residual`] with respect to `(u, c)`.
///
/// Interior rows: `tr((I + M²)⁻¹ D²δu) - δc`. Boundary rows:
/// `⟨∇h̃(∇u), ∇δu⟩`. Fails with `ObliquenessLost` where
/// `⟨∇h, ∇h̃(∇u)⟩ ≤ 0`.
pub fn linearize(p: &ProblemInstance, u: &[f64], exec: Execution) -> Result<Jacobian> {
    let d = derivatives(p, u, exec);
    linearize_from(p, &d, exec)
}

pub fn linearize_from(p: &ProblemInstance, d: &Derivatives, exec: Execution) -> Result<Jacobian> {
    let grid = &p.grid;
    let n = grid.len();
    let rows = try_map_indices(n, exec, |k| -> Result<Vec<(usize, f64)>> {
        if grid.is_boundary(k) {
            let gt = p.target.eval(d.gradients[k])?.gradient;
            let chi = p.source_gradient(k).dot(gt);
            if !(chi > 0.0) {
                return Err(Error::ObliquenessLost {
                    node: k,
                    value: chi,
                });
            }
            Ok(grid
                .gradient_stencil(k)
                .iter()
                .map(|&(q, w)| (q, gt.dot(w)))
                .collect())
        } else {
            let a = angle_coefficients(&d.hessians[k]);
            let mut row: Vec<(usize, f64)> = grid
                .hessian_stencil(k)
                .iter()
                .map(|&(q, w)| (q, a.frobenius_dot(&w)))
                .collect();
            row.push((n, -1.0));
            Ok(row)
        }
    })?;
    let mut entries = Vec::with_capacity(rows.iter().map(Vec::len).sum::<usize>() + n);
    for (r, row) in rows.into_iter().enumerate() {
        entries.extend(row.into_iter().map(|(c, v)| (r, c, v)));
    }
    entries.extend(grid.weights().iter().enumerate().map(|(c, &w)| (n, c, w)));
    Ok(Jacobian { n: n + 1, entries })
}
