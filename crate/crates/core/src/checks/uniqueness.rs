//! Two solutions of the same instance differ by a constant.

use super::report::{CheckRecord, Worst};
use crate::exec::Execution;
use crate::slag::{uniqueness_matrix, DEFAULT_QUAD_POINTS};
use crate::solver::{ProblemInstance, SolverState};
use crate::Result;

pub fn check_uniqueness(
    p: &ProblemInstance,
    a: &SolverState,
    b: &SolverState,
) -> Result<Vec<CheckRecord>> {
    let grid = &p.grid;
    let diff: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
    let mean = grid.integrate(&diff) / grid.area();
    let mut potential = Worst::new();
    for (k, d) in diff.iter().enumerate() {
        potential.push(-(d - mean).abs(), grid.node(k));
    }
    let ha = grid.hessians(&a.u, Execution::default());
    let hb = grid.hessians(&b.u, Execution::default());
    let mut matrix = Worst::new();
    for (k, (m1, m2)) in ha.iter().zip(&hb).enumerate() {
        let bm = uniqueness_matrix(m1, m2, DEFAULT_QUAD_POINTS)?;
        matrix.push(bm.min_eigenvalue(), grid.node(k));
    }
    Ok(vec![
        potential.record("uniqueness_potential", 1e-6),
        CheckRecord::new("uniqueness_constant", -(a.c - b.c).abs(), 1e-8, None),
        matrix.record("uniqueness_matrix", 0.0),
    ])
}
