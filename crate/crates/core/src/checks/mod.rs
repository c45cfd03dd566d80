//! Runtime certification of the a-priori estimates on a discrete solution.
//!
//! Every inequality below holds for exact solutions. On a converged discrete
//! solution each is evaluated nodewise and reported with its worst margin.
//! Constants that the estimates leave abstract (`C₂`, `C₄`, `C₁₂`) are
//! measured from the solution itself; `C₁` comes from its defining identity.

mod bounds;
mod interior;
mod oblique;
mod reformulation;
mod report;
mod uniqueness;

pub use bounds::{check_angle_bound, check_eigenvalue_bound, check_ellipticity_lower};
pub use interior::{check_interior_c2, DIRECTIONS};
pub use oblique::{check_boundary_alignment, check_h_barrier, check_obliqueness};
pub use reformulation::{
    check_reformulation, chi_cutoff, oblique_g, psi_profile_for, ray_exit, RayExit,
};
pub use report::{CheckRecord, DiagnosticsReport, MeasuredConstants};
pub use uniqueness::check_uniqueness;

use crate::domain::Jet;
use crate::exec::{try_map_indices, Execution};
use crate::geometry::Vec2;
use crate::slag::{angle_coefficients, SymMatrix2};
use crate::solver::{ProblemInstance, SolverState};
use crate::Result;

/// Tolerance used by every nodewise inequality.
pub const CHECK_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Residual tolerance the solution was converged to.
    pub solver_tol: f64,
    pub exec: Execution,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            solver_tol: 1e-8,
            exec: Execution::default(),
        }
    }
}

/// Nodal quantities shared by the checks.
#[derive(Debug, Clone)]
pub struct Fields<'a> {
    pub problem: &'a ProblemInstance,
    pub state: &'a SolverState,
    pub opts: CheckOptions,
    pub gradients: Vec<Vec2>,
    pub hessians: Vec<SymMatrix2>,
    /// `(I + (D²u)²)⁻¹`.
    pub coefficients: Vec<SymMatrix2>,
    /// `h` and its derivatives at the nodes.
    pub source: Vec<Jet>,
    /// `h̃` and its derivatives at `∇u` of each node.
    pub target: Vec<Jet>,
    /// `H = h̃(∇u)`.
    pub barrier: Vec<f64>,
    pub barrier_gradients: Vec<Vec2>,
    pub barrier_hessians: Vec<SymMatrix2>,
    /// Discrete gradient of the sampled `h`.
    pub source_gradients_discrete: Vec<Vec2>,
    /// `(vol Ω / vol Ω̃)^{1/2}`.
    pub volume_ratio: f64,
    pub constants: MeasuredConstants,
}

impl<'a> Fields<'a> {
    pub fn new(
        problem: &'a ProblemInstance,
        state: &'a SolverState,
        opts: CheckOptions,
    ) -> Result<Self> {
        let grid = &problem.grid;
        let exec = opts.exec;
        let n = grid.len();
        let gradients = grid.gradients(&state.u, exec);
        let hessians = grid.hessians(&state.u, exec);
        let coefficients: Vec<SymMatrix2> = hessians.iter().map(angle_coefficients).collect();
        let source = try_map_indices(n, exec, |k| problem.source.eval(grid.node(k)))?;
        let target = try_map_indices(n, exec, |k| problem.target.eval(gradients[k]))?;
        let barrier: Vec<f64> = target.iter().map(|j| j.value).collect();
        let barrier_gradients = grid.gradients(&barrier, exec);
        let barrier_hessians = grid.hessians(&barrier, exec);
        let h_values: Vec<f64> = source.iter().map(|j| j.value).collect();
        let source_gradients_discrete = grid.gradients(&h_values, exec);

        let volume_source = problem.source.metrics()?.volume;
        let volume_target = problem.target.metrics()?.volume;
        let volume_ratio = (volume_source / volume_target).sqrt();
        let theta = problem.source.theta()?;
        let s = (volume_ratio.atan() / 2.0).sin();
        let c1 = 1.0 / (theta * s * s);
        let c2 = coefficients
            .iter()
            .zip(&barrier_hessians)
            .map(|(a, d2)| a.frobenius_dot(d2).abs())
            .fold(0.0, f64::max);
        let (mut chi_min, mut unit_min) = (f64::INFINITY, f64::INFINITY);
        for k in grid.boundary_nodes() {
            let (g, gt) = (source[k].gradient, target[k].gradient);
            chi_min = chi_min.min(g.dot(gt));
            unit_min = unit_min.min(g.normalized().dot(gt.normalized()));
        }
        let (mut lambda_min, mut lambda_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for h in &hessians {
            let [a, b] = h.eigenvalues();
            lambda_min = lambda_min.min(a);
            lambda_max = lambda_max.max(b);
        }
        let constants = MeasuredConstants {
            theta,
            c1,
            c2,
            chi_min,
            unit_obliqueness_min: unit_min,
            c12: 1.0 / unit_min,
            lambda_min,
            lambda_max,
            volume_source,
            volume_target,
            mesh: grid.spacing(),
        };
        Ok(Fields {
            problem,
            state,
            opts,
            gradients,
            hessians,
            coefficients,
            source,
            target,
            barrier,
            barrier_gradients,
            barrier_hessians,
            source_gradients_discrete,
            volume_ratio,
            constants,
        })
    }

    pub fn c(&self) -> f64 {
        self.state.c
    }

    pub fn node(&self, k: usize) -> Vec2 {
        self.problem.grid.node(k)
    }
}

/// Run every single-solution certification.
pub fn certify(
    problem: &ProblemInstance,
    state: &SolverState,
    opts: CheckOptions,
) -> Result<DiagnosticsReport> {
    let f = Fields::new(problem, state, opts)?;
    let mut checks = vec![
        check_angle_bound(&f),
        check_eigenvalue_bound(&f),
        check_ellipticity_lower(&f),
    ];
    checks.extend(check_obliqueness(&f));
    checks.push(check_boundary_alignment(&f));
    checks.extend(check_h_barrier(&f));
    checks.extend(check_interior_c2(&f));
    checks.extend(check_reformulation(&f)?);
    Ok(DiagnosticsReport {
        c: state.c,
        constants: f.constants,
        checks,
    })
}
