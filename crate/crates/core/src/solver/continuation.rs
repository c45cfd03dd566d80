//! Continuation in the sublevel parameter `t` from nearly quadratic
//! sublevel pairs up to the full domains.

use std::f64::consts::TAU;

use crate::domain::DefiningFunction;
use crate::exec::{try_map_indices, Execution};
use crate::geometry::Vec2;
use crate::slag::lagrangian_angle;
use crate::solver::seed::{fit_ellipse, seed_solution};
use crate::solver::{newton_solve, ProblemInstance, SolverOptions, SolverState};
use crate::{Error, Result};

/// Parameter values visited by the continuation; the last one is `1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// `steps` geometrically spaced values from `t0` (chosen automatically
    /// when `None`) to `1`.
    Geometric {
        t0: Option<f64>,
        steps: usize,
    },
    Explicit(Vec<f64>),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::Geometric { t0: None, steps: 8 }
    }
}

impl Schedule {
    pub fn values(&self, source: &DefiningFunction, target: &DefiningFunction) -> Result<Vec<f64>> {
        let ts = match self {
            Schedule::Geometric { t0, steps } => {
                let t0 = t0.unwrap_or_else(|| default_t0(source, target));
                if *steps == 0 {
                    return Err(Error::Parameter(
                        "continuation needs at least one step".into(),
                    ));
                }
                let ratio = (1.0 / t0).powf(1.0 / *steps as f64);
                let mut v: Vec<f64> = (0..*steps).map(|k| t0 * ratio.powi(k as i32)).collect();
                v.push(1.0);
                v
            }
            Schedule::Explicit(v) => v.clone(),
        };
        if ts.is_empty()
            || ts.iter().any(|t| !(*t > 0.0 && *t <= 1.0))
            || ts.windows(2).any(|w| w[1] <= w[0])
            || *ts.last().unwrap() != 1.0
        {
            return Err(Error::Parameter(format!(
                "schedule must increase within (0, 1] and end at 1, got {ts:?}"
            )));
        }
        Ok(ts)
    }
}

/// Relative tolerance on the ellipse fit of the first sublevel pair.
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Half the largest parameter at which both sublevels are known to be
/// exact ellipses, capped at 0.05. Shapes without such a range are probed
/// by shrinking `t` until both sublevels fit an ellipse to
/// [`FIT_TOLERANCE`].
pub fn default_t0(source: &DefiningFunction, target: &DefiningFunction) -> f64 {
    let limits = [source.exact_sublevel_limit(), target.exact_sublevel_limit()];
    let lim = limits
        .iter()
        .flatten()
        .filter(|l| **l > 0.0)
        .fold(f64::INFINITY, |a, b| a.min(*b));
    let mut t = (0.5 * lim).min(0.05);
    if limits.contains(&Some(0.0)) {
        let fits = |t: f64| {
            [source, target].iter().all(|df| {
                df.sublevel(t)
                    .and_then(|s| fit_ellipse(&s))
                    .map(|f| f.residual <= 0.5 * FIT_TOLERANCE)
                    .unwrap_or(false)
            })
        };
        while t > 1e-12 && !fits(t) {
            t *= 0.25;
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationOptions {
    pub n_rho: usize,
    pub n_phi: usize,
    pub schedule: Schedule,
    pub solver: SolverOptions,
    pub max_bisections: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            n_rho: 32,
            n_phi: 64,
            schedule: Schedule::default(),
            solver: SolverOptions::default(),
            max_bisections: 6,
        }
    }
}

/// One solved point of the continuation path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPoint {
    pub t: f64,
    pub c: f64,
    pub iterations: usize,
    pub residual: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub problem: ProblemInstance,
    pub state: SolverState,
    pub path: Vec<PathPoint>,
}

/// Carry a solution to a new instance by the similarity that maps the old
/// sublevel pair approximately onto the new one:
///
/// ```text
/// u_new(x) = σₓσ_y [u_old(x₀ + (x - x₀)/σₓ) - ⟨ỹ₀, (x - x₀)/σₓ⟩] + ⟨ỹ₀, x⟩
/// ```
///
/// with `σ` the mean radius ratios about the anchors `x₀` and `ỹ₀`.
pub fn transfer_solution(
    old: &ProblemInstance,
    state: &SolverState,
    new: &ProblemInstance,
) -> Result<SolverState> {
    let x0 = new.grid.anchor();
    let y0 = new.target.argmin();
    let sx = mean_radius(&new.source, x0)? / mean_radius(&old.source, x0)?;
    let sy = mean_radius(&new.target, y0)? / mean_radius(&old.target, y0)?;
    let grid = &new.grid;
    let u = try_map_indices(grid.len(), Execution::default(), |k| {
        let dz = (grid.node(k) - x0) * (1.0 / sx);
        let v = old.grid.interpolate(&state.u, x0 + dz)?.value;
        Ok(sx * sy * (v - y0.dot(dz)) + y0.dot(grid.node(k)))
    })?;
    let hess = grid.hessians(&u, Execution::default());
    let (mut acc, mut wsum) = (0.0, 0.0);
    for (k, h) in hess.iter().enumerate() {
        if !grid.is_boundary(k) {
            acc += grid.weights()[k] * lagrangian_angle(h);
            wsum += grid.weights()[k];
        }
    }
    let mut s = SolverState::new(u, acc / wsum);
    s.normalize(grid);
    Ok(s)
}

fn mean_radius(df: &DefiningFunction, o: Vec2) -> Result<f64> {
    const N: usize = 64;
    let r = try_map_indices(N, Execution::default(), |k| {
        Ok(df.boundary_radius(o, TAU * k as f64 / N as f64)?.r)
    })?;
    Ok(r.iter().sum::<f64>() / N as f64)
}

fn path_point(p: &ProblemInstance, s: &SolverState) -> PathPoint {
    let hess = p.grid.hessians(&s.u, Execution::default());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for h in &hess {
        let [a, b] = h.eigenvalues();
        lo = lo.min(a);
        hi = hi.max(b);
    }
    PathPoint {
        t: p.t,
        c: s.c,
        iterations: s.iterations,
        residual: s.history.last().copied().unwrap_or(f64::NAN),
        lambda_min: lo,
        lambda_max: hi,
    }
}

fn instance(
    source: &DefiningFunction,
    target: &DefiningFunction,
    t: f64,
    opts: &ContinuationOptions,
) -> Result<ProblemInstance> {
    Ok(ProblemInstance::new(
        source.sublevel(t)?,
        target.sublevel(t)?,
        source.argmin(),
        opts.n_rho,
        opts.n_phi,
    )?
    .at_parameter(t))
}

/// Solve on `{h ≤ t - 1} → {h̃ ≤ t - 1}` along the schedule, seeding the
/// first step from ellipse fits and each later one by
/// [`transfer_solution`]. A failed step is bisected toward the last
/// solved parameter at most `max_bisections` times.
pub fn continuation_solve(
    source: &DefiningFunction,
    target: &DefiningFunction,
    opts: &ContinuationOptions,
) -> Result<ContinuationResult> {
    let ts = opts.schedule.values(source, target)?;
    let first = instance(source, target, ts[0], opts)?;
    let (seed, fit) = seed_solution(&first)?;
    if fit > FIT_TOLERANCE {
        return Err(Error::Parameter(format!(
            "sublevels at t0 = {} are not ellipses within {FIT_TOLERANCE:e} (fit residual {fit:e}); lower t0",
            ts[0]
        )));
    }
    let state = newton_solve(&first, seed, &opts.solver).map_err(|e| Error::ContinuationStuck {
        last_t: 0.0,
        reason: format!("initial step at t = {}: {e}", ts[0]),
    })?;
    let mut path = vec![path_point(&first, &state)];
    let (mut prev_p, mut prev_s) = (first, state);

    for &goal in &ts[1..] {
        let mut t_try = goal;
        let mut bisections = 0;
        while prev_p.t < goal {
            let attempt = instance(source, target, t_try, opts).and_then(|p| {
                let init = transfer_solution(&prev_p, &prev_s, &p)?;
                let s = newton_solve(&p, init, &opts.solver)?;
                Ok((p, s))
            });
            match attempt {
                Ok((p, s)) => {
                    path.push(path_point(&p, &s));
                    prev_p = p;
                    prev_s = s;
                    t_try = goal;
                }
                Err(e) => {
                    if bisections == opts.max_bisections {
                        return Err(Error::ContinuationStuck {
                            last_t: prev_p.t,
                            reason: e.to_string(),
                        });
                    }
                    bisections += 1;
                    t_try = 0.5 * (prev_p.t + t_try);
                }
            }
        }
    }
    Ok(ContinuationResult {
        problem: prev_p,
        state: prev_s,
        path,
    })
}
