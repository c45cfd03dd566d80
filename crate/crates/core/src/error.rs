use std::path::PathBuf;

use crate::geometry::Vec2;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point ({}, {}) lies outside the region where the defining function is defined", .0.x, .0.y)]
    DomainExceeded(Vec2),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("defining function construction failed at ({}, {}): {reason}", point.x, point.y)]
    Construction { reason: String, point: Vec2 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("potential is not convex at ({}, {})", .0.x, .0.y)]
    ConvexityLost(Vec2),

    #[error("point ({}, {}) is outside the range of the gradient map", .0.x, .0.y)]
    OutOfRange(Vec2),

    #[error("boundary condition is not oblique at node {node} (value {value:e})")]
    ObliquenessLost { node: usize, value: f64 },

    #[error("newton iteration did not converge in {} iterations (last residual {:e})", .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { history: Vec<f64> },

    #[error("newton safeguard: {0}")]
    Safeguard(String),

    #[error("continuation stuck after t = {last_t} ({reason})")]
    ContinuationStuck { last_t: f64, reason: String },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: message.into(),
        }
    }

    /// True for errors raised by the nonlinear solver rather than by the
    /// geometry or configuration.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::ConvexityLost(_)
                | Error::ObliquenessLost { .. }
                | Error::NonConvergence { .. }
                | Error::Safeguard(_)
                | Error::ContinuationStuck { .. }
                | Error::LinearSolve(_)
                | Error::OutOfRange(_)
        )
    }
}
