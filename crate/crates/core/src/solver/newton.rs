//! Damped Newton iteration with convexity and obliqueness safeguards.

use crate::solver::linear::solve_normalized;
use crate::solver::residual::{
    check_convexity, check_obliqueness, derivatives, linearize_from, residual_from,
};
use crate::solver::{ProblemInstance, SolverOptions, SolverState};
use crate::{Error, Result};

const ARMIJO: f64 = 1e-4;

/// Solve the discrete equations starting from `init`.
///
/// A step is accepted only if the new iterate is convex at every node,
/// oblique at every boundary node and decreases `‖R‖₂` by the Armijo
/// factor; otherwise it is halved, at most `max_halvings` times.
pub fn newton_solve(
    p: &ProblemInstance,
    init: SolverState,
    opts: &SolverOptions,
) -> Result<SolverState> {
    let exec = opts.exec;
    let n = p.grid.len();
    if init.u.len() != n {
        return Err(Error::Parameter(format!(
            "initial guess has {} values for {} nodes",
            init.u.len(),
            n
        )));
    }
    let SolverState { mut u, mut c, .. } = init;
    let d = derivatives(p, &u, exec);
    check_convexity(p, &d).map_err(|e| Error::Safeguard(format!("initial guess: {e}")))?;
    check_obliqueness(p, &d).map_err(|e| Error::Safeguard(format!("initial guess: {e}")))?;
    let mut r = residual_from(p, &u, c, &d, exec)
        .map_err(|e| Error::Safeguard(format!("initial guess: {e}")))?;
    let mut d = d;
    let mut history = vec![r.max_norm()];

    for it in 0..opts.max_iter {
        if r.max_norm() <= opts.tol {
            return Ok(SolverState {
                u,
                c,
                history,
                iterations: it,
            });
        }
        let jac = linearize_from(p, &d, exec)?;
        let rhs: Vec<f64> = r.values.iter().map(|v| -v).collect();
        let step = solve_normalized(&jac, &rhs, p.grid.weights())?;
        let norm0 = r.norm2();
        let mut lambda = 1.0;
        let mut last_reason = String::new();
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let trial_u: Vec<f64> = u.iter().zip(&step).map(|(a, s)| a + lambda * s).collect();
            let trial_c = c + lambda * step[n];
            let td = derivatives(p, &trial_u, exec);
            let outcome = check_convexity(p, &td)
                .and_then(|_| check_obliqueness(p, &td))
                .and_then(|_| residual_from(p, &trial_u, trial_c, &td, exec));
            match outcome {
                Ok(tr) if tr.norm2() <= (1.0 - ARMIJO * lambda) * norm0 => {
                    accepted = Some((trial_u, trial_c, td, tr));
                    break;
                }
                Ok(tr) => last_reason = format!("no decrease ({:e} vs {:e})", tr.norm2(), norm0),
                Err(e) => last_reason = e.to_string(),
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((tu, tc, td, tr)) => {
                u = tu;
                c = tc;
                d = td;
                r = tr;
                history.push(r.max_norm());
            }
            None => {
                return Err(if last_reason.starts_with("no decrease") {
                    Error::NonConvergence { history }
                } else {
                    Error::Safeguard(format!(
                        "line search failed at iteration {it}: {last_reason}"
                    ))
                });
            }
        }
    }
    if r.max_norm() <= opts.tol {
        return Ok(SolverState {
            u,
            c,
            history,
            iterations: opts.max_iter,
        });
    }
    Err(Error::NonConvergence { history })
}
