//! Boundary fitted polar grids and finite differences on them.

mod interp;
mod radial;

pub use interp::PolarPoint;
pub use radial::{PoleFit, RadialGrid, Stencils};
