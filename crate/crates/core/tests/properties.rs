use mlrelax::levy::{levy_density, levy_primitive};
use mlrelax::mlfun::*;
use mlrelax::volterra::{solve_closed_cc, VolterraProblem};
use proptest::prelude::*;

const TOL: f64 = 1e-13;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_dispatch_matches_ml_poly(alpha in 0.2f64..1.5, d in -0.5f64..2.0, n in 0u32..8, x in -3.0f64..3.0) {
        let p = MLParams::new(alpha, 1.0 + d, -(n as f64)).unwrap();
        let v = ml3(&p, x, TOL).unwrap();
        // near a root only the size of the terms sets the scale
        let scale: f64 = (0..=n)
            .map(|r| {
                let binom = (0..r).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64);
                binom * x.abs().powi(r as i32) / libm::tgamma(alpha * r as f64 + 1.0 + d)
            })
            .sum();
        prop_assert!((v - ml_poly(alpha, d, n, x)).abs() <= 1e-13 * scale);
    }

    #[test]
    fn polynomial_recurrence(alpha in 0.2f64..1.5, d in -0.5f64..2.0, n in 0u32..8, x in 0.0f64..2.0) {
        let y = x.powf(alpha);
        let lhs = y * ml_poly(alpha, d + alpha, n, y) + ml_poly(alpha, d, n + 1, y);
        let rhs = ml_poly(alpha, d, n, y);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * rhs.abs().max(1.0));
    }

    #[test]
    fn routed_agrees_with_series_where_well_conditioned(
        alpha in 0.5f64..1.2, mu in 0.5f64..2.5, nu in 0.2f64..3.0, x in -1.0f64..1.0,
    ) {
        let p = MLParams::new(alpha, mu, nu).unwrap();
        let s = ml3(&p, x, TOL).unwrap();
        let e = ml3_eval(&p, x, TOL).unwrap();
        prop_assert!(close(s, e, 1e-9), "{s} vs {e}");
    }

    #[test]
    fn one_parameter_decays_on_negative_axis(alpha in 0.2f64..1.0, x in 0.0f64..40.0, dx in 0.01f64..5.0) {
        let p = MLParams::one(alpha).unwrap();
        let a = ml3_eval(&p, -x, TOL).unwrap();
        let b = ml3_eval(&p, -x - dx, TOL).unwrap();
        prop_assert!(a > 0.0 && a <= 1.0 + 1e-12);
        prop_assert!(b < a + 1e-12, "E({}) = {b} > E({}) = {a}", -x - dx, -x);
    }

    #[test]
    fn rational_alpha_round_trip(l in 1u32..12, k in 1u32..12) {
        prop_assume!(gcd(l, k) == 1);
        let r = RationalAlpha::from_alpha(l as f64 / k as f64, RATIONAL_CAP).unwrap();
        prop_assert_eq!((r.l, r.k), (l, k));
    }

    #[test]
    fn levy_density_and_primitive_bounds(alpha in 0.2f64..0.9, u in 0.1f64..3.0, t in 0.05f64..20.0) {
        let d = levy_density(alpha, u, t).unwrap();
        let p1 = levy_primitive(alpha, u, t).unwrap();
        let p2 = levy_primitive(alpha, u, 1.5 * t).unwrap();
        prop_assert!(d >= -1e-12);
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&p1));
        prop_assert!(p2 >= p1 - 1e-9);
    }

    #[test]
    fn cole_cole_relaxes_monotonically(alpha in 0.2f64..1.0, a in 0.0f64..2.0, b in 0.1f64..3.0, t in 0.01f64..20.0) {
        let p = VolterraProblem::cole_cole(alpha, a, b).unwrap();
        let f1 = solve_closed_cc(&p, t).unwrap();
        let f2 = solve_closed_cc(&p, 1.3 * t).unwrap();
        let floor = p.residual_level();
        prop_assert!(f1 <= 1.0 + 1e-12 && f1 >= floor - 1e-9, "f = {f1}, floor {floor}");
        prop_assert!(f2 <= f1 + 1e-10);
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
