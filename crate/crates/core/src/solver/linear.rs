//! Linear solves for the Newton systems.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::solver::Jacobian;
use crate::{Error, Result};

/// Below this size the system is factored densely.
const DENSE_LIMIT: usize = 400;

/// Solve `J x = b`.
pub fn solve(jac: &Jacobian, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = jac.n;
    if rhs.len() != n {
        return Err(Error::LinearSolve(format!(
            "right-hand side has {} rows, expected {n}",
            rhs.len()
        )));
    }
    let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
    let x = if n <= DENSE_LIMIT {
        let mut a = Mat::<f64>::zeros(n, n);
        for &(r, c, v) in &jac.entries {
            a[(r, c)] += v;
        }
        a.partial_piv_lu().solve(&b)
    } else {
        let triplets: Vec<Triplet<usize, usize, f64>> = jac
            .entries
            .iter()
            .map(|&(r, c, v)| Triplet::new(r, c, v))
            .collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        lu.solve(&b)
    };
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::LinearSolve("singular Newton system".into()))
    }
}

/// Solve a Newton system whose last row is the normalization `Σ wₖ δuₖ = g`.
///
/// Constants lie in the kernel of the remaining rows, so the dense
/// normalization row is replaced by the pin `δu₀ = 0` and restored
/// afterwards by adding the appropriate constant. This keeps the factored
/// matrix sparse.
pub fn solve_normalized(jac: &Jacobian, rhs: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
    let n_nodes = weights.len();
    if jac.n != n_nodes + 1 || rhs.len() != jac.n {
        return Err(Error::LinearSolve(
            "inconsistent Newton system dimensions".into(),
        ));
    }
    let mut entries: Vec<(usize, usize, f64)> = jac
        .entries
        .iter()
        .copied()
        .filter(|e| e.0 != n_nodes)
        .collect();
    entries.push((n_nodes, 0, 1.0));
    let pinned = Jacobian { n: jac.n, entries };
    let mut b = rhs.to_vec();
    b[n_nodes] = 0.0;
    let mut x = solve(&pinned, &b)?;
    let wsum: f64 = weights.iter().sum();
    let current: f64 = weights.iter().zip(&x).map(|(w, v)| w * v).sum();
    let alpha = (rhs[n_nodes] - current) / wsum;
    for v in &mut x[..n_nodes] {
        *v += alpha;
    }
    Ok(x)
}
