//! Nodal field files and run summaries.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::grid::RadialGrid;
use crate::solver::continuation::PathPoint;
use crate::solver::{residual, ProblemInstance, SolverState};
use crate::{Error, Result};

/// Names of the emitted fields; each goes to `fields_<name>.csv`.
pub const FIELD_NAMES: [&str; 5] = ["u", "grad1", "grad2", "lambda1", "lambda2"];

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

fn write_field(path: &Path, grid: &RadialGrid, values: &[f64]) -> Result<()> {
    let mut out = String::with_capacity(64 * values.len());
    out.push_str("i_rho,i_phi,x1,x2,value\n");
    for (k, v) in values.iter().enumerate() {
        let (i, j) = grid.position(k);
        let x = grid.node(k);
        out.push_str(&format!("{i},{j},{:.16e},{:.16e},{:.16e}\n", x.x, x.y, v));
    }
    let mut f = create(path)?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Write `u`, both gradient components and both Hessian eigenvalues, one
/// CSV file per field, in node order (pole first, then ring by ring).
pub fn emit_fields(p: &ProblemInstance, s: &SolverState, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let grid = &p.grid;
    let grads = grid.gradients(&s.u, Execution::default());
    let eigs: Vec<[f64; 2]> = grid
        .hessians(&s.u, Execution::default())
        .iter()
        .map(|h| h.eigenvalues())
        .collect();
    let fields: [Vec<f64>; 5] = [
        s.u.clone(),
        grads.iter().map(|g| g.x).collect(),
        grads.iter().map(|g| g.y).collect(),
        eigs.iter().map(|e| e[0]).collect(),
        eigs.iter().map(|e| e[1]).collect(),
    ];
    let mut paths = Vec::new();
    for (name, vals) in FIELD_NAMES.iter().zip(fields.iter()) {
        let path = dir.join(format!("fields_{name}.csv"));
        write_field(&path, grid, vals)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Read a field written by [`emit_fields`], checking it matches `grid`.
pub fn read_field(path: &Path, grid: &RadialGrid) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let bad = |line: usize, msg: &str| {
        Error::config(format!("{}:{line}", path.display()), msg.to_string())
    };
    if lines.next().map(str::trim) != Some("i_rho,i_phi,x1,x2,value") {
        return Err(bad(1, "unexpected header"));
    }
    let mut values = Vec::with_capacity(grid.len());
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(bad(n + 2, "expected 5 columns"));
        }
        let k = values.len();
        if k >= grid.len() {
            return Err(bad(n + 2, "more rows than grid nodes"));
        }
        let (i, j) = grid.position(k);
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad(n + 2, "not a number"))
        };
        if cols[0].trim() != i.to_string() || cols[1].trim() != j.to_string() {
            return Err(bad(n + 2, "node indices do not match the grid"));
        }
        let x = grid.node(k);
        let (x1, x2) = (parse(cols[2])?, parse(cols[3])?);
        if (x1 - x.x).abs() > 1e-9 * (1.0 + x.x.abs())
            || (x2 - x.y).abs() > 1e-9 * (1.0 + x.y.abs())
        {
            return Err(bad(n + 2, "node position does not match the grid"));
        }
        values.push(parse(cols[4])?);
    }
    if values.len() != grid.len() {
        return Err(bad(0, "fewer rows than grid nodes"));
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub interior_inf: f64,
    pub boundary_inf: f64,
    pub normalization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub c: f64,
    pub t: f64,
    pub n_rho: usize,
    pub n_phi: usize,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub residual: ResidualSummary,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl RunSummary {
    pub fn new(p: &ProblemInstance, s: &SolverState) -> Result<Self> {
        let r = residual(p, &s.u, s.c, Execution::default())?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for h in p.grid.hessians(&s.u, Execution::default()) {
            let [a, b] = h.eigenvalues();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        Ok(RunSummary {
            c: s.c,
            t: p.t,
            n_rho: p.grid.n_rho(),
            n_phi: p.grid.n_phi(),
            iterations: s.iterations,
            history: s.history.clone(),
            residual: ResidualSummary {
                interior_inf: r.interior_inf,
                boundary_inf: r.boundary_inf,
                normalization: r.normalization,
            },
            lambda_min: lo,
            lambda_max: hi,
        })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::config(path.display().to_string(), e.to_string()))
}

pub fn write_path(path: &Path, points: &[PathPoint]) -> Result<()> {
    let mut out = String::from("t,c,iterations,residual,lambda_min,lambda_max\n");
    for p in points {
        out.push_str(&format!(
            "{:.16e},{:.16e},{},{:.6e},{:.16e},{:.16e}\n",
            p.t, p.c, p.iterations, p.residual, p.lambda_min, p.lambda_max
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
