//! Normalized uniformly convex defining functions and their sublevel sets.

use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use crate::domain::blended::BlendedDefining;
use crate::domain::boundary::{diameter, ray_root, RayRoot};
use crate::domain::shape::{Jet, Shape};
use crate::exec::{try_map_indices, Execution};
use crate::geometry::Vec2;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub enum DefiningKind {
    /// The level function of the shape itself.
    Analytic(Shape),
    /// The blended construction that is a quadratic near its minimum.
    Blended(BlendedDefining),
}

impl DefiningKind {
    fn raw(&self, x: Vec2) -> Result<Jet> {
        match self {
            DefiningKind::Analytic(s) => Ok(s.level(x)),
            DefiningKind::Blended(h) => h.raw(x),
        }
    }

    fn extent(&self) -> f64 {
        match self {
            DefiningKind::Analytic(s) => s.extent(),
            DefiningKind::Blended(h) => h.curve().shape().extent(),
        }
    }

    fn start(&self) -> Vec2 {
        match self {
            DefiningKind::Analytic(s) => s.center(),
            DefiningKind::Blended(h) => h.center(),
        }
    }
}

/// Geometric summary of the zero sublevel set of a defining function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainMetrics {
    /// Lower bound of the Hessian eigenvalues over the sampled domain.
    pub theta: f64,
    pub h_min: f64,
    pub argmin: Vec2,
    pub diameter: f64,
    pub volume: f64,
}

/// Number of radial and angular rings of the convexity sample set.
const THETA_RADIAL: usize = 100;
const THETA_ANGULAR: usize = 128;
const BOUNDARY_SAMPLES: usize = 720;

/// `h = scale · raw - shift`, where `raw` is the underlying level function.
///
/// The unshifted function has infimum `-1`; `sublevel(t)` subtracts `t - 1`
/// so that its zero set is the boundary of `{h ≤ t - 1}`.
#[derive(Debug, Clone)]
pub struct DefiningFunction {
    kind: Arc<DefiningKind>,
    argmin: Vec2,
    scale: f64,
    shift: f64,
    metrics: Arc<OnceLock<DomainMetrics>>,
}

impl DefiningFunction {
    pub fn new(kind: DefiningKind) -> Result<Self> {
        let argmin = minimize(&kind)?;
        let raw_min = kind.raw(argmin)?.value;
        if !(raw_min < 0.0) {
            return Err(Error::Construction {
                reason: "level function has an empty interior".into(),
                point: argmin,
            });
        }
        let df = DefiningFunction {
            kind: Arc::new(kind),
            argmin,
            scale: -1.0 / raw_min,
            shift: 0.0,
            metrics: Arc::new(OnceLock::new()),
        };
        let m = df.metrics()?;
        if !(m.theta > 0.0) {
            return Err(Error::Construction {
                reason: format!(
                    "defining function is not uniformly convex (θ = {:e})",
                    m.theta
                ),
                point: m.argmin,
            });
        }
        Ok(df)
    }

    pub fn analytic(shape: Shape) -> Result<Self> {
        DefiningFunction::new(DefiningKind::Analytic(shape))
    }

    pub fn blended(h: BlendedDefining) -> Result<Self> {
        DefiningFunction::new(DefiningKind::Blended(h))
    }

    pub fn kind(&self) -> &DefiningKind {
        &self.kind
    }

    pub fn eval(&self, x: Vec2) -> Result<Jet> {
        let j = self.kind.raw(x)?.scaled(self.scale);
        Ok(Jet {
            value: j.value - self.shift,
            ..j
        })
    }

    pub fn value(&self, x: Vec2) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }

    /// Offset subtracted from the normalized function, `t - 1` for `h_t`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn argmin(&self) -> Vec2 {
        self.argmin
    }

    /// The defining function `h - (t - 1)` of `{h ≤ t - 1}`, `t ∈ (0, 1]`.
    pub fn sublevel(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Parameter(format!(
                "sublevel parameter {t} outside (0, 1]"
            )));
        }
        let shift = self.shift + (t - 1.0);
        if self.eval(self.argmin)?.value - (t - 1.0) >= 0.0 {
            return Err(Error::Parameter(format!("sublevel {t} is empty")));
        }
        Ok(DefiningFunction {
            kind: self.kind.clone(),
            argmin: self.argmin,
            scale: self.scale,
            shift,
            metrics: Arc::new(OnceLock::new()),
        })
    }

    /// Radius of the zero level along the ray from `origin` at angle `phi`.
    pub fn boundary_radius(&self, origin: Vec2, phi: f64) -> Result<RayRoot> {
        ray_root(|x| self.eval(x), origin, phi, 0.0, self.kind.extent())
    }

    pub fn boundary_point(&self, origin: Vec2, phi: f64) -> Result<Vec2> {
        Ok(origin + Vec2::polar(phi) * self.boundary_radius(origin, phi)?.r)
    }

    /// Outward unit normal `∇h/|∇h|`.
    pub fn unit_normal(&self, x: Vec2) -> Result<Vec2> {
        Ok(self.eval(x)?.gradient.normalized())
    }

    pub fn contains(&self, x: Vec2) -> bool {
        matches!(self.value(x), Ok(v) if v <= 0.0)
    }

    /// Largest `t` for which the sublevel `{h ≤ t - 1}` of the unshifted
    /// function is known to be an exact ellipse; `None` when every sublevel
    /// is one.
    pub fn exact_sublevel_limit(&self) -> Option<f64> {
        match &*self.kind {
            DefiningKind::Analytic(Shape::Ellipse(_)) => None,
            DefiningKind::Analytic(_) => Some(0.0),
            DefiningKind::Blended(h) => {
                let r = h.center_distance() - h.epsilon();
                Some(r * r / (2.0 * h.diameter() * h.diameter()))
            }
        }
    }

    pub fn theta(&self) -> Result<f64> {
        Ok(self.metrics()?.theta)
    }

    pub fn metrics(&self) -> Result<&DomainMetrics> {
        if let Some(m) = self.metrics.get() {
            return Ok(m);
        }
        let m = self.compute_metrics()?;
        let _ = self.metrics.set(m);
        Ok(self.metrics.get().expect("metrics were just set"))
    }

    fn compute_metrics(&self) -> Result<DomainMetrics> {
        let o = self.argmin;
        let radii = try_map_indices(BOUNDARY_SAMPLES, Execution::default(), |k| {
            let phi = TAU * k as f64 / BOUNDARY_SAMPLES as f64;
            self.boundary_radius(o, phi).map(|r| r.r)
        })?;
        let step = TAU / BOUNDARY_SAMPLES as f64;
        let volume = radii.iter().map(|r| 0.5 * r * r * step).sum();
        let points: Vec<Vec2> = radii
            .iter()
            .enumerate()
            .map(|(k, r)| o + Vec2::polar(step * k as f64) * *r)
            .collect();
        let mins = try_map_indices(THETA_ANGULAR, Execution::default(), |j| {
            let phi = TAU * j as f64 / THETA_ANGULAR as f64;
            let r = self.boundary_radius(o, phi)?.r;
            let e = Vec2::polar(phi);
            let mut lo = f64::INFINITY;
            for i in 0..=THETA_RADIAL {
                let x = o + e * (r * i as f64 / THETA_RADIAL as f64);
                lo = lo.min(self.eval(x)?.hessian.min_eigenvalue());
            }
            Ok(lo)
        })?;
        Ok(DomainMetrics {
            theta: mins.into_iter().fold(f64::INFINITY, f64::min),
            h_min: self.eval(o)?.value,
            argmin: o,
            diameter: diameter(&points),
            volume,
        })
    }
}

/// Damped Newton minimization of a convex level function.
fn minimize(kind: &DefiningKind) -> Result<Vec2> {
    let mut x = kind.start();
    for _ in 0..100 {
        let j = kind.raw(x)?;
        if j.gradient.norm() <= 1e-14 * (1.0 + x.norm()) {
            return Ok(x);
        }
        let inv = j.hessian.inverse().ok_or(Error::Construction {
            reason: "singular Hessian while locating the minimum".into(),
            point: x,
        })?;
        let step = inv.apply(j.gradient);
        let mut lambda = 1.0;
        loop {
            let y = x - step * lambda;
            if let Ok(jy) = kind.raw(y) {
                if jy.value <= j.value {
                    let done = (step * lambda).norm() <= 1e-15 * (1.0 + x.norm());
                    x = y;
                    if done {
                        return Ok(x);
                    }
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Ok(x);
            }
        }
    }
    Ok(x)
}
