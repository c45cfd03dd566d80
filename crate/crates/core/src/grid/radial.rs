//! Boundary fitted polar grid `x = x₀ + ρ r(φ) e(φ)` on a convex domain.
//!
//! Node 0 is the pole `x₀`. Ring `i ∈ 1..=N` at `ρ = i/N` has `M` equally
//! spaced angles; ring `N` lies on the boundary. Derivatives are computed
//! by finite differences in `(ρ, φ)` and pulled back through a Jacobian
//! obtained with the same differences applied to the node coordinates,
//! which makes the Cartesian gradient and Hessian exact on affine functions.

use std::f64::consts::TAU;

use faer::prelude::*;
use faer::Mat;

use crate::domain::{DefiningFunction, RayRoot};
use crate::exec::{map_indices, Execution};
use crate::geometry::{Mat2, Vec2};
use crate::slag::SymMatrix2;
use crate::{Error, Result};

type Row<T> = Vec<(usize, T)>;

/// Compressed rows of `(node, weight)` pairs.
#[derive(Debug, Clone)]
pub struct Stencils<T> {
    offsets: Vec<usize>,
    entries: Vec<(usize, T)>,
}

impl<T: Copy> Stencils<T> {
    fn from_rows(rows: Vec<Vec<(usize, T)>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut entries = Vec::new();
        for r in rows {
            entries.extend(r);
            offsets.push(entries.len());
        }
        Stencils { offsets, entries }
    }

    pub fn row(&self, k: usize) -> &[(usize, T)] {
        &self.entries[self.offsets[k]..self.offsets[k + 1]]
    }
}

/// Least-squares cubic fit about the pole over the pole and rings 1, 2.
#[derive(Debug, Clone)]
pub struct PoleFit {
    scale: f64,
    nodes: Vec<usize>,
    /// `10 × nodes.len()` map from nodal values to monomial coefficients.
    pinv: Vec<[f64; 10]>,
}

/// Value and derivatives of a local cubic at a point.
fn monomials(p: Vec2) -> ([f64; 10], [[f64; 10]; 2], [[f64; 10]; 3]) {
    let (x, y) = (p.x, p.y);
    let v = [
        1.0,
        x,
        y,
        x * x,
        x * y,
        y * y,
        x * x * x,
        x * x * y,
        x * y * y,
        y * y * y,
    ];
    let dx = [
        0.0,
        1.0,
        0.0,
        2.0 * x,
        y,
        0.0,
        3.0 * x * x,
        2.0 * x * y,
        y * y,
        0.0,
    ];
    let dy = [
        0.0,
        0.0,
        1.0,
        0.0,
        x,
        2.0 * y,
        0.0,
        x * x,
        2.0 * x * y,
        3.0 * y * y,
    ];
    let dxx = [0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 6.0 * x, 2.0 * y, 0.0, 0.0];
    let dxy = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0 * x, 2.0 * y, 0.0];
    let dyy = [0.0, 0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 2.0 * x, 6.0 * y];
    (v, [dx, dy], [dxx, dxy, dyy])
}

impl PoleFit {
    fn new(grid_nodes: &[Vec2], pole: Vec2, nodes: Vec<usize>, scale: f64) -> Result<Self> {
        let m = nodes.len();
        let mut v = Mat::<f64>::zeros(m, 10);
        for (row, &k) in nodes.iter().enumerate() {
            let (mono, _, _) = monomials((grid_nodes[k] - pole) * (1.0 / scale));
            for (c, val) in mono.iter().enumerate() {
                v[(row, c)] = *val;
            }
        }
        let sol = v.qr().solve_lstsq(&Mat::<f64>::identity(m, m));
        let mut pinv = vec![[0.0f64; 10]; m];
        for (col, p) in pinv.iter_mut().enumerate() {
            for (c, slot) in p.iter_mut().enumerate() {
                *slot = sol[(c, col)];
            }
        }
        if pinv.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Geometry("degenerate pole neighbourhood".into()));
        }
        Ok(PoleFit { scale, nodes, pinv })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Value, gradient and Hessian stencils of the fit at `offset` from the pole.
    pub fn weights_at(&self, offset: Vec2) -> Vec<(usize, f64, Vec2, SymMatrix2)> {
        let s = self.scale;
        let (v, d, dd) = monomials(offset * (1.0 / s));
        self.nodes
            .iter()
            .zip(&self.pinv)
            .map(|(&k, p)| {
                let dot = |a: &[f64; 10]| a.iter().zip(p).map(|(x, y)| x * y).sum::<f64>();
                (
                    k,
                    dot(&v),
                    Vec2::new(dot(&d[0]), dot(&d[1])) * (1.0 / s),
                    SymMatrix2::new(dot(&dd[0]), dot(&dd[1]), dot(&dd[2])) * (1.0 / (s * s)),
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RadialGrid {
    n_rho: usize,
    n_phi: usize,
    anchor: Vec2,
    defining: DefiningFunction,
    rays: Vec<RayRoot>,
    nodes: Vec<Vec2>,
    weights: Vec<f64>,
    gradient: Stencils<Vec2>,
    hessian: Stencils<SymMatrix2>,
    pole: PoleFit,
}

/// One-dimensional difference weights in `ρ` for ring `i` of `n`.
fn rho_weights(i: usize, n: usize, d: f64) -> (Row<f64>, Row<f64>) {
    if i < n {
        (
            vec![(i - 1, -0.5 / d), (i + 1, 0.5 / d)],
            vec![
                (i - 1, 1.0 / (d * d)),
                (i, -2.0 / (d * d)),
                (i + 1, 1.0 / (d * d)),
            ],
        )
    } else {
        (
            vec![(n, 1.5 / d), (n - 1, -2.0 / d), (n - 2, 0.5 / d)],
            vec![
                (n, 2.0 / (d * d)),
                (n - 1, -5.0 / (d * d)),
                (n - 2, 4.0 / (d * d)),
                (n - 3, -1.0 / (d * d)),
            ],
        )
    }
}

fn merge<T: Copy + std::ops::Add<Output = T>>(mut v: Vec<(usize, T)>) -> Vec<(usize, T)> {
    v.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, T)> = Vec::with_capacity(v.len());
    for (k, w) in v {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 = last.1 + w,
            _ => out.push((k, w)),
        }
    }
    out
}

impl RadialGrid {
    /// Grid with `n_rho` rings and `n_phi` angles on `{h ≤ 0}` about `anchor`.
    pub fn build(
        defining: &DefiningFunction,
        anchor: Vec2,
        n_rho: usize,
        n_phi: usize,
    ) -> Result<Self> {
        if n_rho < 8 {
            return Err(Error::Parameter(format!(
                "need at least 8 radial rings, got {n_rho}"
            )));
        }
        if n_phi < 16 || !n_phi.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "need an even number of at least 16 angular nodes, got {n_phi}"
            )));
        }
        if !anchor.is_finite() || !defining.contains(anchor) || defining.value(anchor)? >= 0.0 {
            return Err(Error::Geometry(format!(
                "grid anchor ({}, {}) is not inside the domain",
                anchor.x, anchor.y
            )));
        }
        let dphi = TAU / n_phi as f64;
        let rays = (0..n_phi)
            .map(|j| defining.boundary_radius(anchor, dphi * j as f64))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| match e {
                Error::Geometry(_) => e,
                other => Error::Geometry(format!("boundary ray failed: {other}")),
            })?;
        let total = 1 + n_rho * n_phi;
        let mut nodes = vec![anchor; total];
        for i in 1..=n_rho {
            let rho = i as f64 / n_rho as f64;
            for (j, ray) in rays.iter().enumerate() {
                nodes[1 + (i - 1) * n_phi + j] =
                    anchor + Vec2::polar(dphi * j as f64) * (rho * ray.r);
            }
        }

        let drho = 1.0 / n_rho as f64;
        let mean_r2 = rays.iter().map(|r| r.r * r.r).sum::<f64>() / n_phi as f64;
        let mut weights = vec![0.0; total];
        weights[0] = TAU * mean_r2 * drho * drho / 8.0;
        for i in 1..=n_rho {
            let radial = if i < n_rho {
                i as f64 * drho * drho
            } else {
                0.5 * (1.0 - (n_rho as f64 - 0.5).powi(2) * drho * drho)
            };
            for (j, ray) in rays.iter().enumerate() {
                weights[1 + (i - 1) * n_phi + j] = dphi * ray.r * ray.r * radial;
            }
        }

        let pole_nodes: Vec<usize> = (0..1 + 2 * n_phi).collect();
        let pole = PoleFit::new(&nodes, anchor, pole_nodes, 2.0 * drho * mean_r2.sqrt())?;

        let mut grid = RadialGrid {
            n_rho,
            n_phi,
            anchor,
            defining: defining.clone(),
            rays,
            nodes,
            weights,
            gradient: Stencils::from_rows(vec![]),
            hessian: Stencils::from_rows(vec![]),
            pole,
        };
        let rows = map_indices(total, Execution::default(), |k| grid.node_stencils(k));
        let mut grad_rows = Vec::with_capacity(total);
        let mut hess_rows = Vec::with_capacity(total);
        for r in rows {
            let (g, h) = r?;
            grad_rows.push(g);
            hess_rows.push(h);
        }
        grid.gradient = Stencils::from_rows(grad_rows);
        grid.hessian = Stencils::from_rows(hess_rows);
        Ok(grid)
    }

    /// Node index of ring `i`, angle `j`; ring 0 is the pole.
    pub fn index(&self, i: usize, j: usize) -> usize {
        if i == 0 {
            0
        } else {
            1 + (i - 1) * self.n_phi + j % self.n_phi
        }
    }

    /// `(ring, angle)` of a node.
    pub fn position(&self, k: usize) -> (usize, usize) {
        if k == 0 {
            (0, 0)
        } else {
            (1 + (k - 1) / self.n_phi, (k - 1) % self.n_phi)
        }
    }

    fn node_stencils(&self, k: usize) -> Result<(Row<Vec2>, Row<SymMatrix2>)> {
        if k == 0 {
            let w = self.pole.weights_at(Vec2::ZERO);
            return Ok((
                w.iter().map(|e| (e.0, e.2)).collect(),
                w.iter().map(|e| (e.0, e.3)).collect(),
            ));
        }
        let (i, j) = self.position(k);
        let (n, m) = (self.n_rho, self.n_phi);
        let drho = 1.0 / n as f64;
        let dphi = TAU / m as f64;
        let (r1, r2) = rho_weights(i, n, drho);
        let jp = (j + 1) % m;
        let jm = (j + m - 1) % m;
        let d_rho: Vec<(usize, f64)> = r1.iter().map(|&(ii, w)| (self.index(ii, j), w)).collect();
        let d_rhorho: Vec<(usize, f64)> =
            r2.iter().map(|&(ii, w)| (self.index(ii, j), w)).collect();
        let d_phi = vec![
            (self.index(i, jp), 0.5 / dphi),
            (self.index(i, jm), -0.5 / dphi),
        ];
        let c = 1.0 / (dphi * dphi);
        let d_phiphi = vec![
            (self.index(i, jp), c),
            (k, -2.0 * c),
            (self.index(i, jm), c),
        ];
        let mut d_rhophi = Vec::new();
        for &(ii, w) in &r1 {
            d_rhophi.push((self.index(ii, jp), 0.5 * w / dphi));
            d_rhophi.push((self.index(ii, jm), -0.5 * w / dphi));
        }
        let (d_rho, d_phi, d_rhorho, d_phiphi, d_rhophi) = (
            merge(d_rho),
            merge(d_phi),
            merge(d_rhorho),
            merge(d_phiphi),
            merge(d_rhophi),
        );

        let apply = |s: &[(usize, f64)]| {
            s.iter()
                .fold(Vec2::ZERO, |acc, &(q, w)| acc + self.nodes[q] * w)
        };
        let (x_r, x_p) = (apply(&d_rho), apply(&d_phi));
        let (x_rr, x_rp, x_pp) = (apply(&d_rhorho), apply(&d_rhophi), apply(&d_phiphi));
        let jac = Mat2::from_columns(x_r, x_p);
        let inv = jac
            .inverse()
            .filter(|_| jac.det() > 0.0)
            .ok_or_else(|| Error::Geometry(format!("degenerate grid cell at node {k}")))?;
        let inv_t = inv.transpose();

        let mut grad = Vec::new();
        for &(q, w) in &d_rho {
            grad.push((q, inv_t.apply(Vec2::new(w, 0.0))));
        }
        for &(q, w) in &d_phi {
            grad.push((q, inv_t.apply(Vec2::new(0.0, w))));
        }
        let grad = merge(grad);

        // second coordinate derivatives, one symmetric matrix per component
        let x1 = SymMatrix2::new(x_rr.x, x_rp.x, x_pp.x);
        let x2 = SymMatrix2::new(x_rr.y, x_rp.y, x_pp.y);
        let mut comp: Vec<(usize, SymMatrix2)> = Vec::new();
        for &(q, w) in &d_rhorho {
            comp.push((q, SymMatrix2::new(w, 0.0, 0.0)));
        }
        for &(q, w) in &d_rhophi {
            comp.push((q, SymMatrix2::new(0.0, w, 0.0)));
        }
        for &(q, w) in &d_phiphi {
            comp.push((q, SymMatrix2::new(0.0, 0.0, w)));
        }
        for &(q, g) in &grad {
            comp.push((q, (x1 * g.x + x2 * g.y) * -1.0));
        }
        let hess = merge(comp)
            .into_iter()
            .map(|(q, s)| (q, s.congruence(&inv)))
            .collect();
        Ok((grad, hess))
    }

    pub fn n_rho(&self) -> usize {
        self.n_rho
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn anchor(&self) -> Vec2 {
        self.anchor
    }

    pub fn defining(&self) -> &DefiningFunction {
        &self.defining
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn node(&self, k: usize) -> Vec2 {
        self.nodes[k]
    }

    pub fn rays(&self) -> &[RayRoot] {
        &self.rays
    }

    pub fn pole_fit(&self) -> &PoleFit {
        &self.pole
    }

    /// Control volume weights; they sum to the area enclosed by the grid.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_boundary(&self, k: usize) -> bool {
        k > 0 && self.position(k).0 == self.n_rho
    }

    pub fn boundary_nodes(&self) -> std::ops::Range<usize> {
        let start = self.index(self.n_rho, 0);
        start..start + self.n_phi
    }

    /// Mesh width: the largest distance between neighbouring nodes.
    pub fn spacing(&self) -> f64 {
        let dphi = TAU / self.n_phi as f64;
        let drho = 1.0 / self.n_rho as f64;
        let rmax = self.rays.iter().map(|r| r.r).fold(0.0, f64::max);
        rmax * drho.max(dphi)
    }

    pub fn gradient_stencil(&self, k: usize) -> &[(usize, Vec2)] {
        self.gradient.row(k)
    }

    pub fn hessian_stencil(&self, k: usize) -> &[(usize, SymMatrix2)] {
        self.hessian.row(k)
    }

    pub fn gradient(&self, values: &[f64], k: usize) -> Vec2 {
        self.gradient_stencil(k)
            .iter()
            .fold(Vec2::ZERO, |acc, &(q, w)| acc + w * values[q])
    }

    pub fn hessian(&self, values: &[f64], k: usize) -> SymMatrix2 {
        self.hessian_stencil(k)
            .iter()
            .fold(SymMatrix2::ZERO, |acc, &(q, w)| acc + w * values[q])
    }

    pub fn gradients(&self, values: &[f64], mode: Execution) -> Vec<Vec2> {
        map_indices(self.len(), mode, |k| self.gradient(values, k))
    }

    pub fn hessians(&self, values: &[f64], mode: Execution) -> Vec<SymMatrix2> {
        map_indices(self.len(), mode, |k| self.hessian(values, k))
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Nodal values of a function.
    pub fn sample(&self, f: impl Fn(Vec2) -> f64 + Sync + Send) -> Vec<f64> {
        map_indices(self.len(), Execution::default(), |k| f(self.nodes[k]))
    }
}
