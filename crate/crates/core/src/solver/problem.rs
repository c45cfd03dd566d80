use std::sync::Arc;

use crate::domain::DefiningFunction;
use crate::exec::Execution;
use crate::geometry::Vec2;
use crate::grid::RadialGrid;
use crate::Result;

/// Newton iteration controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Convergence threshold on the largest residual component.
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings allowed in the line search.
    pub max_halvings: usize,
    pub exec: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-8,
            max_iter: 25,
            max_halvings: 30,
            exec: Execution::default(),
        }
    }
}

/// A discretized instance: source `{h ≤ 0}`, target `{h̃ ≤ 0}` and a grid
/// fitted to the source.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub source: DefiningFunction,
    pub target: DefiningFunction,
    pub grid: Arc<RadialGrid>,
    /// Continuation parameter the instance belongs to, 1 for the full problem.
    pub t: f64,
    /// `∇h` at the boundary nodes, in boundary order.
    source_normals: Vec<Vec2>,
}

impl ProblemInstance {
    pub fn new(
        source: DefiningFunction,
        target: DefiningFunction,
        anchor: Vec2,
        n_rho: usize,
        n_phi: usize,
    ) -> Result<Self> {
        let grid = RadialGrid::build(&source, anchor, n_rho, n_phi)?;
        ProblemInstance::with_grid(source, target, Arc::new(grid))
    }

    pub fn with_grid(
        source: DefiningFunction,
        target: DefiningFunction,
        grid: Arc<RadialGrid>,
    ) -> Result<Self> {
        let source_normals = grid
            .boundary_nodes()
            .map(|k| Ok(source.eval(grid.node(k))?.gradient))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemInstance {
            source,
            target,
            grid,
            t: 1.0,
            source_normals,
        })
    }

    pub fn at_parameter(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Unknowns are the nodal values followed by the constant `c`.
    pub fn n_unknowns(&self) -> usize {
        self.grid.len() + 1
    }

    /// `∇h` at boundary node `k`.
    pub fn source_gradient(&self, k: usize) -> Vec2 {
        self.source_normals[k - self.grid.boundary_nodes().start]
    }
}

/// Discrete potential and constant, with the Newton residual history.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub u: Vec<f64>,
    pub c: f64,
    /// Largest residual component before each iteration and at exit.
    pub history: Vec<f64>,
    pub iterations: usize,
}

impl SolverState {
    pub fn new(u: Vec<f64>, c: f64) -> Self {
        SolverState {
            u,
            c,
            history: Vec::new(),
            iterations: 0,
        }
    }

    /// Subtract the weighted mean so that `Σ wₖ uₖ = 0`.
    pub fn normalize(&mut self, grid: &RadialGrid) {
        let mean = grid.integrate(&self.u) / grid.area();
        for v in &mut self.u {
            *v -= mean;
        }
    }
}
