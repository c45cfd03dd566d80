//! Level-set descriptions `{g ≤ 0}` of the supported convex shapes.

use crate::geometry::{Mat2, Vec2};
use crate::slag::SymMatrix2;
use crate::{Error, Result};

/// Value, gradient and Hessian of a scalar function of the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: Vec2,
    pub hessian: SymMatrix2,
}

impl Jet {
    pub fn scaled(self, s: f64) -> Jet {
        Jet {
            value: self.value * s,
            gradient: self.gradient * s,
            hessian: self.hessian * s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipseShape {
    pub a: f64,
    pub b: f64,
    pub center: Vec2,
    pub rotation: f64,
}

impl EllipseShape {
    fn frame(&self) -> Mat2 {
        Mat2::rotation(self.rotation)
    }

    /// `(x'/a)² + (y'/b)² - 1` in the rotated frame.
    pub fn level(&self, x: Vec2) -> Jet {
        let r = self.frame();
        let local = r.transpose().apply(x - self.center);
        let (ia2, ib2) = (1.0 / (self.a * self.a), 1.0 / (self.b * self.b));
        let value = local.x * local.x * ia2 + local.y * local.y * ib2 - 1.0;
        let g_local = Vec2::new(2.0 * local.x * ia2, 2.0 * local.y * ib2);
        let h_local = SymMatrix2::diag(2.0 * ia2, 2.0 * ib2);
        Jet {
            value,
            gradient: r.apply(g_local),
            hessian: h_local.congruence(&r.transpose()),
        }
    }

    /// Quadratic form matrix `P` with the ellipse equal to `{(x-c)ᵀP(x-c) ≤ 1}`.
    pub fn form(&self) -> SymMatrix2 {
        let r = self.frame();
        SymMatrix2::diag(1.0 / (self.a * self.a), 1.0 / (self.b * self.b))
            .congruence(&r.transpose())
    }
}

/// Rounded box between an ellipse and the superellipse of exponent `p`:
/// `½(|x'/a|^p + |y'/b|^p + (x'/a)² + (y'/b)²) - 1`.
///
/// The quadratic part keeps the level function uniformly convex at the
/// axis points, where the pure power term has vanishing curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperellipseShape {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub center: Vec2,
    pub rotation: f64,
}

impl SuperellipseShape {
    pub fn level(&self, x: Vec2) -> Jet {
        let r = Mat2::rotation(self.rotation);
        let local = r.transpose().apply(x - self.center);
        let p = self.p;
        let term = |s: f64, scale: f64| -> (f64, f64, f64) {
            let z = s / scale;
            let az = z.abs();
            let v = az.powf(p) + z * z;
            let d = (p * az.powf(p - 1.0) * z.signum() + 2.0 * z) / scale;
            let dd = (p * (p - 1.0) * az.powf(p - 2.0) + 2.0) / (scale * scale);
            (v, d, dd)
        };
        let (v1, d1, dd1) = term(local.x, self.a);
        let (v2, d2, dd2) = term(local.y, self.b);
        Jet {
            value: 0.5 * (v1 + v2) - 1.0,
            gradient: r.apply(Vec2::new(0.5 * d1, 0.5 * d2)),
            hessian: SymMatrix2::diag(0.5 * dd1, 0.5 * dd2).congruence(&r.transpose()),
        }
    }
}

/// Convex polygon given by counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    // outward unit normals and offsets: polygon = {⟨nₖ, x⟩ ≤ bₖ}
    normals: Vec<Vec2>,
    offsets: Vec<f64>,
}

impl ConvexPolygon {
    pub fn new(vertices: &[Vec2]) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Geometry(
                "a polygon needs at least three vertices".into(),
            ));
        }
        let n = vertices.len();
        let area2: f64 = (0..n)
            .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
            .sum();
        let mut v = vertices.to_vec();
        if area2 < 0.0 {
            v.reverse();
        }
        let mut normals = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        for i in 0..n {
            let e = v[(i + 1) % n] - v[i];
            if e.norm() == 0.0 {
                return Err(Error::Geometry(format!("repeated polygon vertex {i}")));
            }
            let turn = e.cross(v[(i + 2) % n] - v[(i + 1) % n]);
            if turn <= 0.0 {
                return Err(Error::Geometry(format!(
                    "polygon is not strictly convex at vertex {}",
                    (i + 1) % n
                )));
            }
            let nrm = Vec2::new(e.y, -e.x).normalized();
            normals.push(nrm);
            offsets.push(nrm.dot(v[i]));
        }
        Ok(ConvexPolygon {
            vertices: v,
            normals,
            offsets,
        })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn contains(&self, x: Vec2) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(n, b)| n.dot(x) <= *b)
    }

    /// Exact distance from an interior point to the boundary: the minimum
    /// over edges of the distance to the closest point on the segment.
    pub fn distance_to_boundary(&self, x: Vec2) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::DomainExceeded(x));
        }
        let n = self.vertices.len();
        let d = (0..n)
            .map(|i| {
                let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
                let e = q - p;
                let s = ((x - p).dot(e) / e.norm_sq()).clamp(0.0, 1.0);
                (x - (p + e * s)).norm()
            })
            .fold(f64::INFINITY, f64::min);
        Ok(d)
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let (mut a, mut c) = (0.0, Vec2::ZERO);
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let w = p.cross(q);
            a += w;
            c += (p + q) * w;
        }
        c * (1.0 / (3.0 * a))
    }
}

/// Smooth uniformly convex domain following a convex polygon:
///
/// ```text
/// g(x) = (1/s) log Σₖ exp(s(⟨nₖ, x - x₀⟩ - βₖ)) + (κ/2)(|x - x₀|² - m²)
/// ```
///
/// with `βₖ` the distance from the anchor `x₀` to edge line `k` and
/// `m = minₖ βₖ`. The log-sum-exp rounds the corners at scale `1/s`, the
/// quadratic term bends the edges inward with curvature about `κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedPolygon {
    pub polygon: ConvexPolygon,
    pub anchor: Vec2,
    pub sharpness: f64,
    pub bulge: f64,
    betas: Vec<f64>,
    inradius: f64,
}

/// Corner sharpness in units of the anchor inradius.
const SHARPNESS: f64 = 3.0;
/// Edge curvature in units of the inverse anchor inradius.
const BULGE: f64 = 0.2;

impl SmoothedPolygon {
    pub fn new(polygon: ConvexPolygon, anchor: Vec2) -> Result<Self> {
        let m = polygon.distance_to_boundary(anchor)?;
        if m <= 0.0 {
            return Err(Error::Geometry(
                "polygon anchor lies on the boundary".into(),
            ));
        }
        let betas: Vec<f64> = polygon
            .normals
            .iter()
            .zip(&polygon.offsets)
            .map(|(n, b)| b - n.dot(anchor))
            .collect();
        let inradius = betas.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(SmoothedPolygon {
            polygon,
            anchor,
            sharpness: SHARPNESS / inradius,
            bulge: BULGE / inradius,
            betas,
            inradius,
        })
    }

    /// Distance from the anchor to the nearest edge line of the polygon.
    pub fn anchor_inradius(&self) -> f64 {
        self.inradius
    }

    pub fn level(&self, x: Vec2) -> Jet {
        let s = self.sharpness;
        let d = x - self.anchor;
        let z: Vec<f64> = self
            .polygon
            .normals
            .iter()
            .zip(&self.betas)
            .map(|(n, b)| s * (n.dot(d) - b))
            .collect();
        let zmax = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = z.iter().map(|zi| (zi - zmax).exp()).collect();
        let total: f64 = w.iter().sum();
        let mut mean = Vec2::ZERO;
        let mut second = SymMatrix2::ZERO;
        for (wi, n) in w.iter().zip(&self.polygon.normals) {
            let p = wi / total;
            mean += *n * p;
            second = second + SymMatrix2::outer(*n) * p;
        }
        let lse = (zmax + total.ln()) / s;
        let k = self.bulge;
        let m = self.inradius;
        Jet {
            value: lse + 0.5 * k * (d.norm_sq() - m * m),
            gradient: mean + d * k,
            hessian: (second - SymMatrix2::outer(mean)) * s + SymMatrix2::scaled_identity(k),
        }
    }
}

/// Any of the supported convex shapes, as the sublevel set `{g ≤ 0}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ellipse(EllipseShape),
    Superellipse(SuperellipseShape),
    SmoothedPolygon(SmoothedPolygon),
}

impl Shape {
    pub fn level(&self, x: Vec2) -> Jet {
        match self {
            Shape::Ellipse(e) => e.level(x),
            Shape::Superellipse(s) => s.level(x),
            Shape::SmoothedPolygon(p) => p.level(x),
        }
    }

    /// A point where `g` is minimal or, for polygons, the anchor.
    pub fn center(&self) -> Vec2 {
        match self {
            Shape::Ellipse(e) => e.center,
            Shape::Superellipse(s) => s.center,
            Shape::SmoothedPolygon(p) => p.anchor,
        }
    }

    /// Upper bound on the distance from [`Shape::center`] to the boundary.
    pub fn extent(&self) -> f64 {
        match self {
            Shape::Ellipse(e) => e.a.max(e.b),
            Shape::Superellipse(s) => s.a.max(s.b) * std::f64::consts::SQRT_2,
            Shape::SmoothedPolygon(p) => p
                .polygon
                .vertices
                .iter()
                .map(|v| (*v - p.anchor).norm())
                .fold(0.0, f64::max),
        }
    }
}
