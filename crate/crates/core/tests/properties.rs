use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use slag_core::checks::{chi_cutoff, oblique_g};
use slag_core::config::RunConfig;
use slag_core::domain::{blending_phi, DomainDescriptor};
use slag_core::exec::Execution;
use slag_core::grid::RadialGrid;
use slag_core::slag::{
    angle_coefficients, angle_derivative, lagrangian_angle, uniqueness_matrix, PsiProfile,
};
use slag_core::solver::ProblemInstance;
use slag_core::{SymMatrix2, Vec2};

fn sym() -> impl Strategy<Value = SymMatrix2> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(a, b, c)| SymMatrix2::new(a, b, c))
}

/// Positive definite with eigenvalues in `[0.05, 20]`.
fn spd() -> impl Strategy<Value = SymMatrix2> {
    (0.05..20.0f64, 0.05..20.0f64, 0.0..PI).prop_map(|(l1, l2, th)| {
        let (c, s) = (th.cos(), th.sin());
        SymMatrix2::new(
            l1 * c * c + l2 * s * s,
            (l1 - l2) * c * s,
            l1 * s * s + l2 * c * c,
        )
    })
}

fn grid() -> &'static RadialGrid {
    static G: OnceLock<RadialGrid> = OnceLock::new();
    G.get_or_init(|| {
        let d = DomainDescriptor::ellipse(1.2, 0.8)
            .rotated(0.4)
            .build()
            .unwrap();
        RadialGrid::build(d.defining_function(), Vec2::new(0.1, 0.05), 12, 24).unwrap()
    })
}

fn oblique_instance() -> &'static ProblemInstance {
    static P: OnceLock<ProblemInstance> = OnceLock::new();
    P.get_or_init(|| {
        let a = DomainDescriptor::disk(1.0).build().unwrap();
        let b = DomainDescriptor::ellipse(1.3, 0.6)
            .rotated(0.5)
            .build()
            .unwrap();
        ProblemInstance::new(
            a.defining_function().clone(),
            b.defining_function().clone(),
            Vec2::ZERO,
            8,
            16,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn grid_operators_are_linear(a in -3.0..3.0f64, b in -3.0..3.0f64, k in 0.5..3.0f64, p in 0.0..PI) {
        let g = grid();
        let f = g.sample(|x| (k * x.x + p).sin() * x.y.cos());
        let h = g.sample(|x| (x.x * x.y + k).exp());
        let mix: Vec<f64> = f.iter().zip(&h).map(|(u, v)| a * u + b * v).collect();
        let (gf, gh, gm) = (g.gradients(&f, Execution::Sequential), g.gradients(&h, Execution::Sequential), g.gradients(&mix, Execution::Sequential));
        let (hf, hh, hm) = (g.hessians(&f, Execution::Sequential), g.hessians(&h, Execution::Sequential), g.hessians(&mix, Execution::Sequential));
        for k in 0..g.len() {
            let dg = gm[k] - (gf[k] * a + gh[k] * b);
            let dh = hm[k] - (hf[k] * a + hh[k] * b);
            prop_assert!(dg.norm() <= 1e-9 * (1.0 + gm[k].norm()));
            prop_assert!(dh.max_abs() <= 1e-9 * (1.0 + hm[k].max_abs()));
        }
    }

    #[test]
    fn affine_fields_have_exact_derivatives(c0 in -2.0..2.0f64, c1 in -2.0..2.0f64, c2 in -2.0..2.0f64) {
        let g = grid();
        let f = g.sample(|x| c0 + c1 * x.x + c2 * x.y);
        for (gr, he) in g.gradients(&f, Execution::Sequential).iter().zip(g.hessians(&f, Execution::Sequential)) {
            prop_assert!((*gr - Vec2::new(c1, c2)).norm() <= 1e-10);
            prop_assert!(he.max_abs() <= 1e-9);
        }
    }

    #[test]
    fn angle_lies_in_the_open_half_turn(m in sym()) {
        let f = lagrangian_angle(&m);
        prop_assert!(f > -PI && f < PI);
        let a = angle_coefficients(&m);
        let [lo, hi] = a.eigenvalues();
        prop_assert!(lo > 0.0 && hi <= 1.0 + 1e-15);
    }

    #[test]
    fn convex_matrices_have_positive_angle(m in spd()) {
        let f = lagrangian_angle(&m);
        prop_assert!(f > 0.0 && f < PI);
    }

    #[test]
    fn angle_derivative_matches_central_differences(m in sym(), d in sym()) {
        let exact = angle_derivative(&m, &d);
        let fd = |e: f64| (lagrangian_angle(&(m + d * e)) - lagrangian_angle(&(m - d * e))) / (2.0 * e);
        // central differences are second order: halving the step quarters the error
        let (e1, e2) = ((fd(1e-3) - exact).abs(), (fd(5e-4) - exact).abs());
        prop_assert!(e2 <= 1e-8 || e2 <= 0.3 * e1, "{e1:e} {e2:e}");
    }

    #[test]
    fn uniqueness_matrix_mean_value_identity(m1 in spd(), m2 in spd()) {
        let b = uniqueness_matrix(&m1, &m2, 64).unwrap();
        let lhs = b.frobenius_dot(&(m2 - m1));
        prop_assert!((lhs - (lagrangian_angle(&m2) - lagrangian_angle(&m1))).abs() <= 1e-10);
        prop_assert!(b.min_eigenvalue() > 0.0);
    }

    #[test]
    fn blending_phi_is_a_convex_majorant_of_abs(s in -2.0..2.0f64, delta in 0.01..1.0f64) {
        let (v, d, dd) = blending_phi(s, delta);
        prop_assert!(v >= s.abs() - 1e-15);
        prop_assert!(d.abs() <= 1.0 && dd >= 0.0);
        prop_assert_eq!(blending_phi(-s, delta).0, v);
        if s.abs() >= delta {
            prop_assert_eq!(v, s.abs());
        }
    }

    #[test]
    fn psi_is_concave_increasing_and_arctan_on_its_window(lo in 0.05..0.95f64, hi in 1.05..20.0f64, s in -5.0..60.0f64) {
        let p = PsiProfile::new(lo, hi).unwrap();
        let (v, d, dd) = p.psi(s);
        prop_assert!(d > 0.0 && dd <= 0.0);
        if p.in_window(s) {
            prop_assert!((v - s.atan()).abs() <= 1e-15);
        }
        // concavity: the graph lies below each tangent
        let t = s + 0.7;
        prop_assert!(p.psi(t).0 <= v + d * 0.7 + 1e-12);
    }

    #[test]
    fn chi_cutoff_is_a_monotone_switch(s in -1.0..2.0f64, ds in 0.0..1.0f64, c12 in 1.0..10.0f64) {
        let (a, b) = (chi_cutoff(s, c12), chi_cutoff(s + ds, c12));
        prop_assert!((0.0..=1.0).contains(&a) && a <= b);
        if s <= 0.5 / c12 {
            prop_assert_eq!(a, 0.0);
        }
        if s >= 1.0 / c12 {
            prop_assert_eq!(a, 1.0);
        }
    }

    #[test]
    fn oblique_g_shifts_with_the_normal(phi in 0.0..(2.0 * PI), y1 in -2.0..2.0f64, y2 in -2.0..2.0f64, t in -0.5..0.5f64) {
        let p = oblique_instance();
        let x = Vec2::polar(phi);
        let nu = p.source.unit_normal(x).unwrap();
        let y = Vec2::new(y1, y2);
        let g0 = oblique_g(p, x, y, 3.0).unwrap();
        let g1 = oblique_g(p, x, y + nu * t, 3.0).unwrap();
        prop_assert!((g1 - g0 - t).abs() <= 1e-9, "{g0} {g1} {t}");
    }

    #[test]
    fn config_round_trips(n in 8usize..200, m in 8usize..100, tol in 1e-12..1e-4f64, steps in 1usize..20, a in 0.2..3.0f64) {
        let mut c = RunConfig::new(DomainDescriptor::disk(a), DomainDescriptor::ellipse(a, 0.5 * a).rotated(tol * 1e3));
        c.grid.radial = n;
        c.grid.angular = 2 * m;
        c.solver.newton_tol = tol;
        c.continuation.steps = steps;
        prop_assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }
}
