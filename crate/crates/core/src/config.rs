//! Run configuration files.
//!
//! ```toml
//! [source]
//! kind = "disk"
//! a = 1.0
//!
//! [target]
//! kind = "ellipse"
//! a = 1.5
//! b = 0.5
//! rotation = 0.5235987755982988
//!
//! [grid]
//! radial = 64
//! angular = 64
//!
//! [solver]
//! newton_tol = 1e-8
//! max_iter = 25
//! method = "auto"
//!
//! [continuation]
//! steps = 8
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every section except `[source]` and `[target]` may be omitted. Unknown
//! keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::DomainDescriptor;
use crate::exec::Execution;
use crate::solver::{ContinuationOptions, Schedule, SolverOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub radial: usize,
    pub angular: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            radial: 64,
            angular: 64,
        }
    }
}

/// How `solve` reaches the full problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Newton from the quadratic seed when both domains are ellipses,
    /// continuation otherwise.
    #[default]
    Auto,
    Direct,
    Continuation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    pub method: Method,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        SolverConfig {
            newton_tol: d.tol,
            max_iter: d.max_iter,
            max_halvings: d.max_halvings,
            method: Method::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationConfig {
    /// Number of geometric steps from `t0` to 1.
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    /// Explicit increasing parameter values ending at 1; overrides
    /// `steps` and `t0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<f64>>,
    pub max_bisections: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            steps: 8,
            t0: None,
            schedule: None,
            max_bisections: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Samples per axis when tabulating a defining function.
    pub samples: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            samples: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub source: DomainDescriptor,
    pub target: DomainDescriptor,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub continuation: ContinuationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn new(source: DomainDescriptor, target: DomainDescriptor) -> Self {
        RunConfig {
            source,
            target,
            grid: GridConfig::default(),
            solver: SolverConfig::default(),
            continuation: ContinuationConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Self::parse(text, "config")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn parse(text: &str, origin: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let at = e
                .span()
                .map(|s| {
                    let line = text[..s.start.min(text.len())].matches('\n').count() + 1;
                    format!("{origin}:{line}")
                })
                .unwrap_or_else(|| origin.to_string());
            Error::config(at, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate()?;
        self.target.validate()?;
        if !(self.solver.newton_tol > 0.0 && self.solver.newton_tol.is_finite()) {
            return Err(Error::config("solver.newton_tol", "must be positive"));
        }
        if self.solver.max_iter == 0 {
            return Err(Error::config("solver.max_iter", "must be at least 1"));
        }
        if self.continuation.steps == 0 {
            return Err(Error::config("continuation.steps", "must be at least 1"));
        }
        if self.output.samples < 2 {
            return Err(Error::config("output.samples", "must be at least 2"));
        }
        Ok(())
    }

    pub fn solver_options(&self, exec: Execution) -> SolverOptions {
        SolverOptions {
            tol: self.solver.newton_tol,
            max_iter: self.solver.max_iter,
            max_halvings: self.solver.max_halvings,
            exec,
        }
    }

    pub fn schedule(&self) -> Schedule {
        match &self.continuation.schedule {
            Some(v) => Schedule::Explicit(v.clone()),
            None => Schedule::Geometric {
                t0: self.continuation.t0,
                steps: self.continuation.steps,
            },
        }
    }

    pub fn continuation_options(&self, exec: Execution) -> ContinuationOptions {
        ContinuationOptions {
            n_rho: self.grid.radial,
            n_phi: self.grid.angular,
            schedule: self.schedule(),
            solver: self.solver_options(exec),
            max_bisections: self.continuation.max_bisections,
        }
    }
}
