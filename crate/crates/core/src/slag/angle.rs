use super::matrix::SymMatrix2;

/// Spatial dimension of the grids and domains.
pub const DIM: usize = 2;

/// `n π / 2`, the supremum of the Lagrangian angle of a convex potential.
pub fn half_turn_bound() -> f64 {
    DIM as f64 * std::f64::consts::FRAC_PI_2
}

/// Lagrangian angle `F(M) = Σ arctan λₖ(M)`.
pub fn lagrangian_angle(m: &SymMatrix2) -> f64 {
    m.eigenvalues().iter().map(|l| l.atan()).sum()
}

/// Coefficient matrix `A = (I + M²)⁻¹` of the linearized operator.
pub fn angle_coefficients(m: &SymMatrix2) -> SymMatrix2 {
    let p = SymMatrix2::IDENTITY + m.square();
    // det(I + M²) = Π (1 + λₖ²) ≥ 1
    p.inverse().expect("I + M² is always invertible")
}

/// Directional derivative `dF(M)[Ṁ] = tr((I + M²)⁻¹ Ṁ)`.
pub fn angle_derivative(m: &SymMatrix2, m_dot: &SymMatrix2) -> f64 {
    angle_coefficients(m).frobenius_dot(m_dot)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(lagrangian_angle(&SymMatrix2::ZERO), 0.0);
        assert!((lagrangian_angle(&SymMatrix2::IDENTITY) - FRAC_PI_2).abs() < 1e-15);
        assert!((lagrangian_angle(&SymMatrix2::diag(2.0, 0.5)) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn coupled_matrix() {
        let f = lagrangian_angle(&SymMatrix2::new(2.0, 1.0, 2.0));
        assert!((f - (FRAC_PI_4 + 3f64.atan())).abs() < 1e-15);
    }

    #[test]
    fn coefficients_of_diagonal() {
        let a = angle_coefficients(&SymMatrix2::diag(1.0, 2.0));
        assert!((a - SymMatrix2::diag(0.5, 0.2)).max_abs() < 1e-16);
        assert_eq!(angle_coefficients(&SymMatrix2::ZERO), SymMatrix2::IDENTITY);
    }

    #[test]
    fn derivative_trivial_cases() {
        let md = SymMatrix2::new(0.3, -0.2, 1.1);
        assert!((angle_derivative(&SymMatrix2::ZERO, &md) - md.trace()).abs() < 1e-15);
        let d = angle_derivative(&SymMatrix2::IDENTITY, &SymMatrix2::IDENTITY);
        assert!((d - 1.0).abs() < 1e-15);
    }
}
