use super::angle::angle_coefficients;
use super::matrix::SymMatrix2;
use super::quadrature::gauss_legendre;
use crate::{Error, Result};

/// Default number of Gauss–Legendre points for [`uniqueness_matrix`].
pub const DEFAULT_QUAD_POINTS: usize = 16;

/// `B = ∫₀¹ [I + (s M₂ + (1-s) M₁)²]⁻¹ ds`.
///
/// Satisfies the mean value identity `tr(B (M₂ - M₁)) = F(M₂) - F(M₁)` up
/// to quadrature error.
pub fn uniqueness_matrix(
    m1: &SymMatrix2,
    m2: &SymMatrix2,
    quad_points: usize,
) -> Result<SymMatrix2> {
    if quad_points < 2 {
        return Err(Error::Parameter(format!(
            "uniqueness matrix needs at least 2 quadrature points, got {quad_points}"
        )));
    }
    let (x, w) = gauss_legendre(quad_points);
    let mut acc = SymMatrix2::ZERO;
    for (&xi, &wi) in x.iter().zip(&w) {
        let s = 0.5 * (xi + 1.0);
        let m = *m2 * s + *m1 * (1.0 - s);
        acc = acc + angle_coefficients(&m) * (0.5 * wi);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let m = SymMatrix2::new(1.3, 0.2, 0.7);
        let b = uniqueness_matrix(&m, &m, DEFAULT_QUAD_POINTS).unwrap();
        assert!((b - angle_coefficients(&m)).max_abs() < 1e-15);
    }

    #[test]
    fn scalar_analogue() {
        // embedding 1-D: M₁ = 0, M₂ = diag(1, 0); the (1,1) entry is ∫₀¹ ds/(1+s²)
        let b = uniqueness_matrix(&SymMatrix2::ZERO, &SymMatrix2::diag(1.0, 0.0), 16).unwrap();
        assert!((b.a11 - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((b.a22 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_points() {
        assert!(uniqueness_matrix(&SymMatrix2::ZERO, &SymMatrix2::ZERO, 1).is_err());
    }
}
