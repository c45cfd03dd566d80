//! Evaluation of grid functions away from the nodes.

use std::f64::consts::TAU;

use crate::domain::Jet;
use crate::geometry::{Mat2, Vec2};
use crate::grid::RadialGrid;
use crate::slag::SymMatrix2;
use crate::{Error, Result};

/// Cubic Lagrange weights and their first two derivatives for nodes at
/// `0, 1, 2, 3`, evaluated at `s`.
#[allow(clippy::needless_range_loop)]
fn lagrange4(s: f64) -> [[f64; 4]; 3] {
    let mut out = [[0.0; 4]; 3];
    for k in 0..4 {
        let others: Vec<f64> = (0..4).filter(|&m| m != k).map(|m| m as f64).collect();
        let denom: f64 = others.iter().map(|m| k as f64 - m).product();
        let (a, b, c) = (s - others[0], s - others[1], s - others[2]);
        out[0][k] = a * b * c / denom;
        out[1][k] = (b * c + a * c + a * b) / denom;
        out[2][k] = 2.0 * (a + b + c) / denom;
    }
    out
}

/// Polar coordinates `(ρ, φ)` of a point and the exact mapping derivatives.
#[derive(Debug, Clone, Copy)]
pub struct PolarPoint {
    pub rho: f64,
    pub phi: f64,
    r: f64,
    dr: f64,
    ddr: f64,
}

impl RadialGrid {
    pub fn polar(&self, y: Vec2) -> Result<PolarPoint> {
        let d = y - self.anchor();
        let phi = d.y.atan2(d.x).rem_euclid(TAU);
        let ray = self.defining().boundary_radius(self.anchor(), phi)?;
        Ok(PolarPoint {
            rho: d.norm() / ray.r,
            phi,
            r: ray.r,
            dr: ray.dr,
            ddr: ray.ddr,
        })
    }

    /// Interpolated value, gradient and Hessian of nodal `values` at `y`.
    ///
    /// Points slightly outside the grid are handled by quadratic
    /// extrapolation in `ρ` from the boundary ring.
    pub fn interpolate(&self, values: &[f64], y: Vec2) -> Result<Jet> {
        if !y.is_finite() {
            return Err(Error::Parameter("interpolation point is not finite".into()));
        }
        let p = self.polar(y)?;
        self.interpolate_polar(values, y, p)
    }

    pub fn interpolate_polar(&self, values: &[f64], y: Vec2, p: PolarPoint) -> Result<Jet> {
        let (n, m) = (self.n_rho(), self.n_phi());
        let drho = 1.0 / n as f64;
        let dphi = TAU / m as f64;
        if p.rho < 2.0 * drho {
            let (mut value, mut gradient, mut hessian) = (0.0, Vec2::ZERO, SymMatrix2::ZERO);
            for (k, v, g, h) in self.pole_fit().weights_at(y - self.anchor()) {
                value += v * values[k];
                gradient += g * values[k];
                hessian = hessian + h * values[k];
            }
            return Ok(Jet {
                value,
                gradient,
                hessian,
            });
        }

        let jf = p.phi / dphi;
        let j0 = jf.floor() as i64 - 1;
        let wphi = lagrange4(jf - j0 as f64);
        let column = |j: usize| -> [f64; 3] {
            if p.rho <= 1.0 {
                let fi = p.rho / drho;
                let i0 = ((fi.floor() as usize).saturating_sub(1)).clamp(1, n - 3);
                let w = lagrange4(fi - i0 as f64);
                let mut out = [0.0; 3];
                for (k, slot) in out.iter_mut().enumerate() {
                    let scale = drho.powi(k as i32);
                    *slot = (0..4)
                        .map(|a| w[k][a] * values[self.index(i0 + a, j)])
                        .sum::<f64>()
                        / scale;
                }
                out
            } else {
                let f = |i: usize| values[self.index(i, j)];
                let f_r = (1.5 * f(n) - 2.0 * f(n - 1) + 0.5 * f(n - 2)) / drho;
                let f_rr =
                    (2.0 * f(n) - 5.0 * f(n - 1) + 4.0 * f(n - 2) - f(n - 3)) / (drho * drho);
                let t = p.rho - 1.0;
                [f(n) + f_r * t + 0.5 * f_rr * t * t, f_r + f_rr * t, f_rr]
            }
        };
        let mut cols = [[0.0; 3]; 4];
        for (a, c) in cols.iter_mut().enumerate() {
            *c = column((j0 + a as i64).rem_euclid(m as i64) as usize);
        }
        let comb = |d: usize, k: usize| {
            (0..4).map(|a| wphi[d][a] * cols[a][k]).sum::<f64>() / dphi.powi(d as i32)
        };
        let (f, f_p, f_pp) = (comb(0, 0), comb(1, 0), comb(2, 0));
        let (f_r, f_rp, f_rr) = (comb(0, 1), comb(1, 1), comb(0, 2));

        let e = Vec2::polar(p.phi);
        let t = e.perp();
        let (rho, r, dr, ddr) = (p.rho, p.r, p.dr, p.ddr);
        let x_r = e * r;
        let x_p = (e * dr + t * r) * rho;
        let x_rp = e * dr + t * r;
        let x_pp = (e * (ddr - r) + t * (2.0 * dr)) * rho;
        let jac = Mat2::from_columns(x_r, x_p);
        let inv = jac
            .inverse()
            .ok_or_else(|| Error::Geometry("singular polar map".into()))?;
        let gradient = inv.transpose().apply(Vec2::new(f_r, f_p));
        let hc = SymMatrix2::new(f_rr, f_rp, f_pp);
        let corr = SymMatrix2::new(0.0, x_rp.x, x_pp.x) * gradient.x
            + SymMatrix2::new(0.0, x_rp.y, x_pp.y) * gradient.y;
        Ok(Jet {
            value: f,
            gradient,
            hessian: (hc - corr).congruence(&inv),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainDescriptor;

    #[test]
    fn lagrange_weights_reproduce_cubics() {
        let f = |s: f64| 1.0 - 2.0 * s + 0.5 * s * s - 0.25 * s * s * s;
        let df = |s: f64| -2.0 + s - 0.75 * s * s;
        let ddf = |s: f64| 1.0 - 1.5 * s;
        for s in [0.3, 1.5, 2.7] {
            let w = lagrange4(s);
            let apply = |d: usize| (0..4).map(|k| w[d][k] * f(k as f64)).sum::<f64>();
            assert!((apply(0) - f(s)).abs() < 1e-13);
            assert!((apply(1) - df(s)).abs() < 1e-13);
            assert!((apply(2) - ddf(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_converges() {
        let dom = DomainDescriptor::ellipse(1.2, 0.9)
            .rotated(0.3)
            .build()
            .unwrap();
        let f = |x: Vec2| (0.7 * x.x).sin() + x.x * x.y + 0.3 * x.y * x.y;
        let err = |n: usize| {
            let g =
                RadialGrid::build(dom.defining_function(), Vec2::new(0.1, 0.05), n, 2 * n).unwrap();
            let vals = g.sample(f);
            let mut worst = 0.0f64;
            for y in [
                Vec2::new(0.4, 0.3),
                Vec2::new(-0.9, 0.1),
                Vec2::new(0.12, 0.06),
                Vec2::new(0.0, -0.85),
            ] {
                let j = g.interpolate(&vals, y).unwrap();
                let exact_h = SymMatrix2::new(-0.49 * (0.7 * y.x).sin(), 1.0, 0.6);
                worst = worst
                    .max((j.value - f(y)).abs())
                    .max((j.hessian - exact_h).max_abs());
            }
            worst
        };
        let (e1, e2) = (err(16), err(32));
        assert!(e2 < 0.35 * e1, "{e1} -> {e2}");
    }

    #[test]
    fn affine_data_near_pole_and_outside() {
        let dom = DomainDescriptor::disk(1.0).build().unwrap();
        let g = RadialGrid::build(dom.defining_function(), Vec2::new(0.2, 0.0), 32, 64).unwrap();
        let vals = g.sample(|x| 2.0 + x.x - 3.0 * x.y);
        // the pole patch is exact on cubics
        let j = g.interpolate(&vals, Vec2::new(0.21, 0.01)).unwrap();
        assert!((j.gradient - Vec2::new(1.0, -3.0)).norm() < 1e-10);
        assert!(j.hessian.max_abs() < 1e-8);
        for y in [Vec2::new(-0.5, 0.5), Vec2::new(1.02, 0.0)] {
            let j = g.interpolate(&vals, y).unwrap();
            assert!((j.value - (2.0 + y.x - 3.0 * y.y)).abs() < 1e-4);
            assert!((j.gradient - Vec2::new(1.0, -3.0)).norm() < 1e-3);
        }
    }
}
