//! Star-shaped parametrization of level curves and projection onto them.

use std::f64::consts::TAU;

use crate::domain::shape::{Jet, Shape};
use crate::geometry::Vec2;
use crate::{Error, Result};

/// Boundary radius along a ray together with its angular derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayRoot {
    pub r: f64,
    pub dr: f64,
    pub ddr: f64,
}

/// Solve `f(origin + r e(φ)) = level` for the unique `r > 0`.
///
/// `f` must be convex with `f(origin) < level`. Evaluation errors are treated
/// as lying outside the level set. `extent` is the initial bracket guess.
pub fn ray_root<F>(f: F, origin: Vec2, phi: f64, level: f64, extent: f64) -> Result<RayRoot>
where
    F: Fn(Vec2) -> Result<Jet>,
{
    let e = Vec2::polar(phi);
    let at = |r: f64| -> Option<Jet> { f(origin + e * r).ok() };
    let f0 = at(0.0).ok_or(Error::DomainExceeded(origin))?;
    if f0.value >= level {
        return Err(Error::Geometry(format!(
            "ray origin {:?} is not inside the level set {level}",
            origin
        )));
    }
    let mut hi = extent.max(1e-12);
    let mut expansions = 0;
    while matches!(at(hi), Some(j) if j.value < level) {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Geometry("level set is unbounded along a ray".into()));
        }
    }
    let (mut a, mut b) = (0.0, hi);
    let mut r = hi;
    let mut last: Option<Jet> = None;
    for _ in 0..200 {
        match at(r) {
            None => {
                b = r;
                r = 0.5 * (a + b);
                continue;
            }
            Some(j) => {
                let g = j.value - level;
                let slope = j.gradient.dot(e);
                if g < 0.0 {
                    a = r;
                } else {
                    b = r;
                }
                last = Some(j);
                if g.abs() <= 1e-15 * (1.0 + level.abs()) || b - a <= 4.0 * f64::EPSILON * b {
                    break;
                }
                let newton = r - g / slope;
                r = if slope > 0.0 && newton > a && newton < b {
                    newton
                } else {
                    0.5 * (a + b)
                };
            }
        }
    }
    let j = match last {
        Some(j) => j,
        None => return Err(Error::Geometry("ray root search failed".into())),
    };
    let t = e.perp();
    let (grad, hess) = (j.gradient, j.hessian);
    let g_r = grad.dot(e);
    if g_r <= 0.0 {
        return Err(Error::Geometry(format!(
            "level curve is not star-shaped about {:?}",
            origin
        )));
    }
    let g_phi = r * grad.dot(t);
    let dr = -g_phi / g_r;
    let g_rr = hess.quad_form(e);
    let g_rphi = r * hess.bilinear(e, t) + grad.dot(t);
    let g_phiphi = r * r * hess.quad_form(t) - r * g_r;
    let ddr = -(g_rr * dr * dr + 2.0 * g_rphi * dr + g_phiphi) / g_r;
    Ok(RayRoot { r, dr, ddr })
}

/// Closest boundary point of a convex domain to a query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub point: Vec2,
    /// Outward unit normal at `point`.
    pub normal: Vec2,
    /// Boundary curvature at `point`.
    pub curvature: f64,
    /// Distance to `point`, positive inside the domain.
    pub signed_distance: f64,
}

/// A closed convex level curve `{g = 0}` parametrized by angle about an
/// interior point, with a table of samples for projection start values.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    shape: Shape,
    origin: Vec2,
    extent: f64,
    phis: Vec<f64>,
    points: Vec<Vec2>,
}

/// Number of tabulated boundary samples.
pub const CURVE_SAMPLES: usize = 1024;

impl BoundaryCurve {
    pub fn new(shape: Shape) -> Result<Self> {
        let origin = shape.center();
        let extent = shape.extent();
        let level = |x| Ok(shape.level(x));
        let phis: Vec<f64> = (0..CURVE_SAMPLES)
            .map(|k| TAU * k as f64 / CURVE_SAMPLES as f64)
            .collect();
        let mut points = Vec::with_capacity(CURVE_SAMPLES);
        for &phi in &phis {
            let root = ray_root(level, origin, phi, 0.0, extent)?;
            points.push(origin + Vec2::polar(phi) * root.r);
        }
        Ok(BoundaryCurve {
            shape,
            origin,
            extent,
            phis,
            points,
        })
    }

    pub fn origin(&self) -> Vec2 {
        self.origin
    }

    pub fn samples(&self) -> &[Vec2] {
        &self.points
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn level(&self, x: Vec2) -> Jet {
        self.shape.level(x)
    }

    pub fn radius(&self, phi: f64) -> Result<RayRoot> {
        ray_root(
            |x| Ok(self.shape.level(x)),
            self.origin,
            phi,
            0.0,
            self.extent,
        )
    }

    /// Point on the curve at angle `phi` and its first two derivatives.
    pub fn point(&self, phi: f64) -> Result<(Vec2, Vec2, Vec2)> {
        let RayRoot { r, dr, ddr } = self.radius(phi)?;
        let e = Vec2::polar(phi);
        let t = e.perp();
        let b = self.origin + e * r;
        let db = e * dr + t * r;
        let ddb = e * (ddr - r) + t * (2.0 * dr);
        Ok((b, db, ddb))
    }

    /// Closest boundary point, by Newton on the squared distance in the
    /// angle, started from the nearest tabulated sample.
    pub fn project(&self, x: Vec2) -> Result<Projection> {
        let (k0, _) = self
            .points
            .iter()
            .enumerate()
            .map(|(k, p)| (k, (*p - x).norm_sq()))
            .fold(
                (0, f64::INFINITY),
                |acc, v| if v.1 < acc.1 { v } else { acc },
            );
        let step = TAU / CURVE_SAMPLES as f64;
        let (mut lo, mut hi) = (self.phis[k0] - 2.0 * step, self.phis[k0] + 2.0 * step);
        let mut phi = self.phis[k0];
        for _ in 0..60 {
            let (b, db, ddb) = self.point(phi)?;
            let diff = b - x;
            let g = diff.dot(db);
            let gg = db.norm_sq() + diff.dot(ddb);
            if g > 0.0 {
                hi = phi;
            } else {
                lo = phi;
            }
            let newton = phi - g / gg;
            let next = if gg > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let done = (next - phi).abs() <= 1e-15 * (1.0 + phi.abs()) || hi - lo < 1e-15;
            phi = next;
            if done {
                break;
            }
        }
        let (b, _, _) = self.point(phi)?;
        let jet = self.level(b);
        let gn = jet.gradient.norm();
        let normal = jet.gradient * (1.0 / gn);
        let tangent = normal.perp();
        let curvature = jet.hessian.quad_form(tangent) / gn;
        let dist = (x - b).norm();
        let inside = self.level(x).value <= 0.0;
        Ok(Projection {
            point: b,
            normal,
            curvature,
            signed_distance: if inside { dist } else { -dist },
        })
    }

    /// Enclosed area and diameter from the tabulated samples.
    pub fn area_and_diameter(&self) -> Result<(f64, f64)> {
        let step = TAU / CURVE_SAMPLES as f64;
        let mut area = 0.0;
        for &phi in &self.phis {
            let r = self.radius(phi)?.r;
            area += 0.5 * r * r * step;
        }
        Ok((area, diameter(&self.points)))
    }
}

/// Largest pairwise distance in a point set.
pub fn diameter(points: &[Vec2]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max((*p - *q).norm_sq());
        }
    }
    best.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::shape::EllipseShape;

    fn disk_at(r: f64, center: Vec2) -> EllipseShape {
        EllipseShape {
            a: r,
            b: r,
            center,
            rotation: 0.0,
        }
    }

    fn disk(r: f64) -> impl Fn(Vec2) -> Result<Jet> + Sync {
        let e = disk_at(r, Vec2::ZERO);
        move |x| Ok(e.level(x))
    }

    #[test]
    fn ray_root_on_disk() {
        let root = ray_root(disk(2.0), Vec2::new(0.5, 0.0), 0.0, 0.0, 1.0).unwrap();
        assert!((root.r - 1.5).abs() < 1e-14);
        assert!(root.dr.abs() < 1e-14);
    }

    #[test]
    fn implicit_derivatives_match_differences() {
        let e = EllipseShape {
            a: 1.5,
            b: 0.6,
            center: Vec2::ZERO,
            rotation: 0.3,
        };
        let f = move |x| Ok(e.level(x));
        let o = Vec2::new(0.2, 0.1);
        let (phi, h) = (0.7, 1e-4);
        let r = |p| ray_root(&f, o, p, 0.0, 1.0).unwrap();
        let (c, p, m) = (r(phi), r(phi + h), r(phi - h));
        assert!(((p.r - m.r) / (2.0 * h) - c.dr).abs() < 1e-7);
        assert!(((p.r - 2.0 * c.r + m.r) / (h * h) - c.ddr).abs() < 1e-5);
    }

    #[test]
    fn projection_onto_disk() {
        let curve = BoundaryCurve::new(Shape::Ellipse(disk_at(1.0, Vec2::ZERO))).unwrap();
        let p = curve.project(Vec2::new(0.3, 0.4)).unwrap();
        assert!((p.signed_distance - 0.5).abs() < 1e-12);
        assert!((p.point - Vec2::new(0.6, 0.8)).norm() < 1e-12);
        assert!((p.curvature - 1.0).abs() < 1e-12);
        let outside = curve.project(Vec2::new(1.2, 0.0)).unwrap();
        assert!((outside.signed_distance + 0.2).abs() < 1e-12);
    }

    #[test]
    fn disk_area_and_diameter() {
        let curve = BoundaryCurve::new(Shape::Ellipse(disk_at(1.0, Vec2::new(0.3, 0.0)))).unwrap();
        let (a, d) = curve.area_and_diameter().unwrap();
        assert!((a - std::f64::consts::PI).abs() < 1e-10);
        assert!((d - 2.0).abs() < 1e-4);
    }
}
