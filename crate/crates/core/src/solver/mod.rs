//! Discretization, Newton iteration and continuation for the second
//! boundary value problem.

pub mod continuation;
pub mod dump;
mod linear;
mod newton;
mod problem;
mod residual;
pub mod seed;

pub use continuation::{
    continuation_solve, transfer_solution, ContinuationOptions, ContinuationResult, PathPoint,
    Schedule,
};
pub use dump::{emit_fields, read_field, RunSummary};
pub use linear::{solve as solve_linear, solve_normalized};
pub use newton::newton_solve;
pub use problem::{ProblemInstance, SolverOptions, SolverState};
pub use residual::{
    check_convexity, check_obliqueness, derivatives, linearize, obliqueness, residual, Derivatives,
    Jacobian, Residual,
};
pub use seed::{fit_ellipse, initial_ball_solution, seed_solution, EllipseFit};

use crate::domain::DefiningFunction;
use crate::geometry::Vec2;
use crate::Result;

/// Build the instance on an `n_rho × n_phi` grid about `anchor`, seed it
/// from ellipse fits and run Newton.
pub fn solve_direct(
    source: &DefiningFunction,
    target: &DefiningFunction,
    anchor: Vec2,
    n_rho: usize,
    n_phi: usize,
    opts: &SolverOptions,
) -> Result<(ProblemInstance, SolverState)> {
    let p = ProblemInstance::new(source.clone(), target.clone(), anchor, n_rho, n_phi)?;
    let (seed, _) = seed_solution(&p)?;
    let s = newton_solve(&p, seed, opts)?;
    Ok((p, s))
}
