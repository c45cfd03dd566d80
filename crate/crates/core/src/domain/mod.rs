//! Convex domains, their defining functions and sublevel families.

mod blended;
mod boundary;
mod defining;
mod descriptor;
mod shape;

pub use blended::{blending_phi, BlendedDefining};
pub use boundary::{diameter, ray_root, BoundaryCurve, Projection, RayRoot, CURVE_SAMPLES};
pub use defining::{DefiningFunction, DefiningKind, DomainMetrics};
pub use descriptor::{Domain, DomainBlock, DomainDescriptor, DomainKind, DomainSummary};
pub use shape::{ConvexPolygon, EllipseShape, Jet, Shape, SmoothedPolygon, SuperellipseShape};
