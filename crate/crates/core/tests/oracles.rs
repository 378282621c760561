#![allow(clippy::excessive_precision)]

//! Reference values frozen from 50-600 digit mpmath evaluations of the
//! defining series (or of closed forms where one exists).

use approx::assert_relative_eq;
use mlrelax::levy::{h_function, levy_density, levy_primitive, HRoute, LevyQuery};
use mlrelax::mlfun::*;
use mlrelax::volterra::{relaxation_curve, solve_closed_cc, SolveMethod, VolterraProblem};
use num_complex::Complex64;
use std::f64::consts::PI;

const TOL: f64 = 1e-13;

#[test]
fn one_parameter_values() {
    assert_relative_eq!(
        ml1(0.75, -1.0, TOL).unwrap(),
        0.39310830281575406177,
        max_relative = 1e-13
    );
}

#[test]
fn routed_evaluator_reports_its_error() {
    // the plain series keeps only a few digits here; the routed one recovers them
    let cases = [
        ((1.0 / 3.0, 1.0, 1.0), -3.0, 0.20679633503129910738),
        ((0.75, 0.75, 1.0), -2.0 * 10f64.powf(0.75), 0.0019659817505790121441),
    ];
    for ((a, m, n), x, want) in cases {
        let (v, err) = ml3_eval_err(&MLParams::new(a, m, n).unwrap(), x, TOL).unwrap();
        let actual = ((v - want) / want).abs();
        assert!(actual < 1e-8, "{a},{m},{n}: {actual:e}");
        assert!(actual < 3.0 * err, "{a},{m},{n}: actual {actual:e} vs reported {err:e}");
    }
}

#[test]
fn large_negative_arguments() {
    let cases = [
        ((0.5, 1.0, 1.0), -30.0, 0.018795888861416751497),
        ((0.6, 0.8, 1.5), -20.0, -0.00083501461975066055948),
        ((0.9, 1.3, 2.5), -50.0, -3.5874791510763634051e-6),
    ];
    for ((a, m, n), x, want) in cases {
        let got = ml3_eval(&MLParams::new(a, m, n).unwrap(), x, TOL).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-9);
    }
}

#[test]
fn complex_argument() {
    let p = MLParams::new(0.7, 1.1, 0.8).unwrap();
    let v = ml3_complex(&p, Complex64::new(0.5, 1.2), TOL).unwrap();
    assert_relative_eq!(v.re, 0.45666487410464670107, max_relative = 1e-12);
    assert_relative_eq!(v.im, 1.1168446004078958287, max_relative = 1e-12);
}

#[test]
fn prabhakar_values() {
    let p = MLParams::new(0.5, 0.5, 1.0).unwrap();
    assert_relative_eq!(
        prabhakar(&p, -1.0, 1.0).unwrap(),
        0.13660600739194928254,
        max_relative = 1e-12
    );
    assert_relative_eq!(
        prabhakar(&p, -1.0, 2.0).unwrap(),
        0.062738277955091463547,
        max_relative = 1e-12
    );
    let cc = MLParams::new(0.75, 0.75, 1.0).unwrap();
    let want = 0.0019659817505790121441 * 10f64.powf(-0.25);
    assert_relative_eq!(prabhakar(&cc, -2.0, 10.0).unwrap(), want, max_relative = 1e-8);
}

#[test]
fn reflection_value() {
    assert_relative_eq!(
        ml_reflection(0.5, 4.0).unwrap(),
        -0.22596254401848420394,
        max_relative = 1e-13
    );
}

#[test]
fn kummer_form() {
    // E^ν_{1,μ}(x) = 1F1(ν; μ; x) / Γ(μ)
    let p = MLParams::new(1.0, 1.6, 0.7).unwrap();
    assert_relative_eq!(ml3(&p, 2.3, TOL).unwrap(), 3.9310710469787268549, max_relative = 1e-13);
}

#[test]
fn laguerre_forms() {
    // E^{-n}_{1,1+d}(x) = n!/Γ(n+1+d) L_n^{(d)}(x)
    assert_relative_eq!(ml_poly(1.0, 0.0, 5, 1.7), 0.38336608333333327577, max_relative = 1e-13);
    assert_relative_eq!(ml_poly(1.0, 0.5, 4, 2.2), 0.032556544992973052292, max_relative = 1e-13);
}

#[test]
fn hypergeometric_matches_series() {
    for (l, k, d, nu, x) in [(1, 2, 0.0, 1.0, -1.5), (2, 3, 0.3, 0.6, 0.8), (3, 4, -0.2, 2.0, -0.7)] {
        let ra = RationalAlpha::new(l, k).unwrap();
        let direct = ml3(&MLParams::new(ra.value(), 1.0 + d, nu).unwrap(), x, TOL).unwrap();
        let hyp = ml_hypergeom(ra, d, nu, x, TOL).unwrap();
        assert_relative_eq!(hyp, direct, max_relative = 1e-11);
    }
}

fn smirnov(u: f64, t: f64) -> f64 {
    u * (-u * u / (4.0 * t)).exp() / (2.0 * PI.sqrt() * t.powf(1.5))
}

#[test]
fn levy_smirnov_density_and_primitive() {
    for (u, t) in [(1.0, 0.05), (1.0, 1.0), (0.3, 2.0), (2.0, 0.7), (1.0, 40.0)] {
        assert_relative_eq!(levy_density(0.5, u, t).unwrap(), smirnov(u, t), max_relative = 1e-9);
        // primitive is erfc(u / (2√t))
        let want = libm::erfc(u / (2.0 * t.sqrt()));
        assert_relative_eq!(levy_primitive(0.5, u, t).unwrap(), want, max_relative = 1e-9);
    }
}

#[test]
fn h_routes_at_half_order() {
    let q = LevyQuery::new(0.5, 1.0, 1.0, 0.0).unwrap();
    let want = smirnov(1.0, 1.0);
    for route in [HRoute::Series, HRoute::Hypergeometric, HRoute::Inversion] {
        assert_relative_eq!(h_function(&q, route).unwrap(), want, max_relative = 1e-10);
    }
}

#[test]
fn decoupled_cole_cole_relaxation() {
    // a = 0: f(t) = E_α(-B t^α)
    let p = VolterraProblem::cole_cole(0.6, 0.0, 2.0).unwrap();
    let want = 0.1237396858265856514;
    assert_relative_eq!(solve_closed_cc(&p, 3.0).unwrap(), want, max_relative = 1e-10);
    for method in [SolveMethod::Series, SolveMethod::Laplace, SolveMethod::Integral] {
        let curve = relaxation_curve(&p, &[3.0], method).unwrap();
        assert_relative_eq!(curve.values[0], want, max_relative = 1e-6);
    }
}
