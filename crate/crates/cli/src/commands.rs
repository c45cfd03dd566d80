use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use slag_core::checks::{certify, CheckOptions, Fields, MeasuredConstants};
use slag_core::config::{Method, RunConfig};
use slag_core::domain::{DefiningKind, Domain, DomainKind};
use slag_core::exec::Execution;
use slag_core::solver::dump::{write_json, write_path};
use slag_core::solver::{
    continuation_solve, emit_fields, solve_direct, PathPoint, ProblemInstance, RunSummary,
    SolverState,
};
use slag_core::{Error, Vec2};

/// Command line arguments shared by every subcommand.
pub struct Invocation {
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub sequential: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Diagnostics(Vec<String>),
}

impl CliError {
    /// 2 configuration, 3 geometry, 4 solver, 5 failed certification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::Config { .. } | Error::Parameter(_) | Error::Io { .. } => 2,
                Error::DomainExceeded(_) | Error::Construction { .. } | Error::Geometry(_) => 3,
                _ => 4,
            },
            CliError::Io { .. } => 2,
            CliError::Diagnostics(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Diagnostics(names) => write!(f, "certification failed: {}", names.join(", ")),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

struct Run {
    cfg: RunConfig,
    out: PathBuf,
    exec: Execution,
    source: Domain,
    target: Domain,
}

fn setup(inv: Invocation) -> Result<Run> {
    let mut cfg = RunConfig::from_path(&inv.config)?;
    if let Some(n) = inv.grid {
        cfg.grid.radial = n;
        cfg.grid.angular = n;
    }
    if let Some(tol) = inv.tol {
        cfg.solver.newton_tol = tol;
    }
    if let Some(out) = inv.out {
        cfg.output.dir = out;
    }
    cfg.validate()?;
    let out = cfg.output.dir.clone();
    fs::create_dir_all(&out).map_err(|source| CliError::Io {
        path: out.clone(),
        source,
    })?;
    let exec = if inv.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let source = cfg.source.build()?;
    let target = cfg.target.build()?;
    Ok(Run {
        cfg,
        out,
        exec,
        source,
        target,
    })
}

struct Solved {
    problem: ProblemInstance,
    state: SolverState,
    path: Option<Vec<PathPoint>>,
    method: Method,
}

fn is_ellipse(d: &Domain) -> bool {
    matches!(d.descriptor().kind, DomainKind::Ellipse { .. })
}

fn solve_pair(run: &Run, source: &Domain, target: &Domain, method: Method) -> Result<Solved> {
    let method = match method {
        Method::Auto if is_ellipse(source) && is_ellipse(target) => Method::Direct,
        Method::Auto => Method::Continuation,
        m => m,
    };
    let (hs, ht) = (source.defining_function(), target.defining_function());
    if method == Method::Direct {
        let (problem, state) = solve_direct(
            hs,
            ht,
            source.anchor(),
            run.cfg.grid.radial,
            run.cfg.grid.angular,
            &run.cfg.solver_options(run.exec),
        )?;
        return Ok(Solved {
            problem,
            state,
            path: None,
            method,
        });
    }
    let r = continuation_solve(hs, ht, &run.cfg.continuation_options(run.exec))?;
    Ok(Solved {
        problem: r.problem,
        state: r.state,
        path: Some(r.path),
        method,
    })
}

#[derive(Serialize)]
struct SolveSummary {
    method: Method,
    continuation_steps: Option<usize>,
    #[serde(flatten)]
    run: RunSummary,
    constants: MeasuredConstants,
}

fn write_solution(run: &Run, s: &Solved, constants: MeasuredConstants) -> Result<()> {
    emit_fields(&s.problem, &s.state, &run.out)?;
    let summary = SolveSummary {
        method: s.method,
        continuation_steps: s.path.as_ref().map(|p| p.len()),
        run: RunSummary::new(&s.problem, &s.state)?,
        constants,
    };
    write_json(&run.out.join("summary.json"), &summary)?;
    if let Some(path) = &s.path {
        write_path(&run.out.join("tpath.csv"), path)?;
    }
    println!(
        "c = {:.12} ({} newton iterations, residual {:.3e})",
        s.state.c,
        s.state.iterations,
        s.state.history.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn check_options(run: &Run) -> CheckOptions {
    CheckOptions {
        solver_tol: run.cfg.solver.newton_tol,
        exec: run.exec,
    }
}

fn solve_and_write(inv: Invocation, method: Option<Method>) -> Result<()> {
    let run = setup(inv)?;
    let s = solve_pair(
        &run,
        &run.source,
        &run.target,
        method.unwrap_or(run.cfg.solver.method),
    )?;
    let constants = Fields::new(&s.problem, &s.state, check_options(&run))?.constants;
    write_solution(&run, &s, constants)
}

pub fn solve(inv: Invocation) -> Result<()> {
    solve_and_write(inv, None)
}

pub fn continuation(inv: Invocation) -> Result<()> {
    solve_and_write(inv, Some(Method::Continuation))
}

pub fn verify(inv: Invocation) -> Result<()> {
    let run = setup(inv)?;
    let s = solve_pair(&run, &run.source, &run.target, run.cfg.solver.method)?;
    let report = certify(&s.problem, &s.state, check_options(&run))?;
    write_solution(&run, &s, report.constants)?;
    report.write_json(&run.out.join("diagnostics.json"))?;
    for r in &report.checks {
        println!(
            "{:<26} {}  margin {:+.3e}  tolerance {:.1e}",
            r.name,
            if r.pass { "pass" } else { "FAIL" },
            r.margin,
            r.tolerance
        );
    }
    let failed: Vec<String> = report.failures().map(|r| r.name.clone()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Diagnostics(failed))
    }
}

#[derive(Serialize)]
struct DualSummary {
    c_forward: f64,
    c_backward: f64,
    /// `c + c' - π`, zero for exact solutions.
    defect: f64,
    n_rho: usize,
    n_phi: usize,
}

pub fn dual(inv: Invocation) -> Result<()> {
    let run = setup(inv)?;
    let method = run.cfg.solver.method;
    let fwd = solve_pair(&run, &run.source, &run.target, method)?;
    let bwd = solve_pair(&run, &run.target, &run.source, method)?;
    let summary = DualSummary {
        c_forward: fwd.state.c,
        c_backward: bwd.state.c,
        defect: fwd.state.c + bwd.state.c - PI,
        n_rho: run.cfg.grid.radial,
        n_phi: run.cfg.grid.angular,
    };
    write_json(&run.out.join("dual.json"), &summary)?;
    println!(
        "c = {:.12}, c' = {:.12}, c + c' - pi = {:+.3e}",
        summary.c_forward, summary.c_backward, summary.defect
    );
    Ok(())
}

#[derive(Serialize)]
struct DomainReport {
    kind: &'static str,
    volume: f64,
    diameter: f64,
    theta: f64,
    h_min: f64,
    argmin: [f64; 2],
    epsilon: Option<f64>,
}

fn tabulate(domain: &Domain, samples: usize, path: &Path) -> Result<DomainReport> {
    let h = domain.defining_function();
    let pts = domain.curve().samples();
    let (mut lo, mut hi) = (
        Vec2::new(f64::INFINITY, f64::INFINITY),
        Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    );
    for p in pts {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let pad = (hi - lo) * 0.1;
    let (lo, hi) = (lo - pad, hi + pad);
    let mut out = String::from("x1,x2,h\n");
    let step = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (samples - 1) as f64;
    for i in 0..samples {
        for j in 0..samples {
            let x = Vec2::new(step(lo.x, hi.x, j), step(lo.y, hi.y, i));
            // points where the function is undefined are written as NaN
            let v = h.value(x).unwrap_or(f64::NAN);
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", x.x, x.y, v));
        }
    }
    fs::write(path, out).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let m = h.metrics()?;
    let (kind, epsilon) = match h.kind() {
        DefiningKind::Analytic(_) => ("analytic", None),
        DefiningKind::Blended(b) => ("blended", Some(b.epsilon())),
    };
    Ok(DomainReport {
        kind,
        volume: m.volume,
        diameter: m.diameter,
        theta: m.theta,
        h_min: m.h_min,
        argmin: m.argmin.to_array(),
        epsilon,
    })
}

#[derive(Serialize)]
struct DomainsReport {
    source: DomainReport,
    target: DomainReport,
}

pub fn build_domain(inv: Invocation) -> Result<()> {
    let run = setup(inv)?;
    let n = run.cfg.output.samples;
    let report = DomainsReport {
        source: tabulate(&run.source, n, &run.out.join("h_source.csv"))?,
        target: tabulate(&run.target, n, &run.out.join("h_target.csv"))?,
    };
    write_json(&run.out.join("domains.json"), &report)?;
    for (name, r) in [("source", &report.source), ("target", &report.target)] {
        println!(
            "{name}: {} defining function, volume {:.6}, theta {:.6}",
            r.kind, r.volume, r.theta
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_class() {
        let core = |e: Error| CliError::Core(e).exit_code();
        assert_eq!(core(Error::Parameter("x".into())), 2);
        assert_eq!(core(Error::Geometry("x".into())), 3);
        assert_eq!(core(Error::DomainExceeded(Vec2::ZERO)), 3);
        assert_eq!(core(Error::NonConvergence { history: vec![1.0] }), 4);
        assert_eq!(
            core(Error::ContinuationStuck {
                last_t: 0.5,
                reason: "x".into()
            }),
            4
        );
        assert_eq!(core(Error::Safeguard("x".into())), 4);
        assert_eq!(
            CliError::Diagnostics(vec!["angle_bound".into()]).exit_code(),
            5
        );
    }
}
