//! Matrix algebra of the special Lagrangian operator.

mod angle;
pub mod legendre;
mod matrix;
pub mod psi;
pub mod quadrature;
mod uniqueness;

pub use angle::{angle_coefficients, angle_derivative, half_turn_bound, lagrangian_angle, DIM};
pub use legendre::{conjugate_hessian_fd, legendre_transform, LegendrePoint};
pub use matrix::{Eigen2, SymMatrix2};
pub use psi::{concavified_angle, PsiProfile};
pub use uniqueness::{uniqueness_matrix, DEFAULT_QUAD_POINTS};
