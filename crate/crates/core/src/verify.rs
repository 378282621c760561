//! Cross-route agreement suite. Each criterion runs a fixed set of
//! comparisons and reports pass/fail with its worst deviation and runtime.
//! Shared by the acceptance test target and `mlrelax verify`.

use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::laplace::{forward_laplace, ml_poly_moment, ml_poly_moment_factored, ForwardOptions, PrabhakarKernel};
use crate::levy::{h_function, levy_mass, levy_primitive, ml_integral_rep, HRoute, LevyQuery};
use crate::mlfun::{
    ml3_eval, ml_poly, ml_poly_derivative, ml_reflection_forms, prabhakar, prabhakar_derivative, MLParams,
};
use crate::quad::QuadOptions;
use crate::spectral::{default_omega_grid, jonscher_exponents, spectrum};
use crate::volterra::{
    caputo_derivative_with, solve_closed_cc, solve_integral_eq1, solve_integral_rep, solve_laplace_numeric,
    solve_series_f1, solve_series_f2, FracOptions, VolterraProblem, DEFAULT_MAX_TERMS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub checks: usize,
    /// Largest deviation relative to its tolerance (≤ 1 passes).
    pub worst_ratio: f64,
    pub detail: String,
    pub elapsed: Duration,
    pub time_budget: Option<Duration>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} checks, worst {:.3e} of tolerance, {:.2}s ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checks,
            self.worst_ratio,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Accumulates comparisons for one criterion.
#[derive(Debug, Default)]
struct Tally {
    checks: usize,
    worst: f64,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    /// Records |deviation| against `tol`.
    fn check(&mut self, label: impl FnOnce() -> String, deviation: f64, tol: f64) {
        self.checks += 1;
        let ratio = if deviation.is_nan() {
            f64::INFINITY
        } else {
            deviation.abs() / tol
        };
        self.worst = self.worst.max(ratio);
        if !(ratio <= 1.0) {
            self.failures
                .push(format!("{}: {:.3e} > {:.0e}", label(), deviation.abs(), tol));
        }
    }

    fn rel(&mut self, label: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        let dev = if want == 0.0 { got - want } else { (got - want) / want };
        self.check(label, dev, tol);
    }

    fn require(&mut self, label: impl FnOnce() -> String, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures.push(label());
        }
    }

    fn error(&mut self, label: impl FnOnce() -> String, e: crate::Error) {
        self.checks += 1;
        self.worst = f64::INFINITY;
        self.failures.push(format!("{}: {e}", label()));
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn finish(self, id: u32, name: &'static str, elapsed: Duration, time_budget: Option<Duration>) -> CriterionResult {
        let in_time = time_budget.is_none_or(|b| elapsed <= b);
        let passed = in_time && self.checks > 0 && self.failures.is_empty();
        let mut parts = self.notes;
        if !in_time {
            parts.push(format!("over time budget {:.0}s", time_budget.unwrap().as_secs_f64()));
        }
        if !self.failures.is_empty() {
            parts.push(format!("{} failed", self.failures.len()));
            parts.extend(self.failures.into_iter().take(3));
        }
        CriterionResult {
            id,
            name,
            passed,
            checks: self.checks,
            worst_ratio: self.worst,
            detail: if parts.is_empty() {
                "ok".into()
            } else {
                parts.join("; ")
            },
            elapsed,
            time_budget,
        }
    }
}

fn timed(id: u32, name: &'static str, budget: Option<f64>, body: impl FnOnce(&mut Tally)) -> CriterionResult {
    let start = Instant::now();
    let mut tally = Tally::default();
    body(&mut tally);
    tally.finish(id, name, start.elapsed(), budget.map(Duration::from_secs_f64))
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (0..n).map(|i| lo * (r * i as f64 / (n - 1) as f64).exp()).collect()
}

fn cc(alpha: f64, a: f64, b: f64) -> VolterraProblem {
    VolterraProblem::cole_cole(alpha, a, b).expect("valid Cole-Cole configuration")
}

/// Cole-Cole configurations of the closed-form comparisons.
fn cole_cole_grid() -> Vec<VolterraProblem> {
    let mut out = Vec::new();
    for alpha in [0.5, 0.75] {
        for a in [0.0, 3.0] {
            for b in [0.25, 1.25] {
                out.push(cc(alpha, a, b));
            }
        }
    }
    out
}

fn label(p: &VolterraProblem) -> String {
    let k = p.kernel;
    format!("α={} ν={} μ={} a={} B={}", k.alpha, k.nu, k.mu, k.a, p.b)
}

/// f1 against the closed form from t = 0.01 up to the first t where f1 stops
/// converging.
pub fn criterion_1() -> CriterionResult {
    timed(1, "series f1 vs closed form", Some(1.0), |tally| {
        let mut shortest = f64::INFINITY;
        for p in cole_cole_grid() {
            let mut t_conv = 0.0;
            for t in log_points(0.01, 100.0, 61) {
                match solve_series_f1(&p, t, DEFAULT_MAX_TERMS) {
                    Ok(s) => {
                        t_conv = t;
                        match solve_closed_cc(&p, t) {
                            Ok(c) => tally.rel(|| format!("{} t={t}", label(&p)), s.value, c, 1e-8),
                            Err(e) => tally.error(|| label(&p), e),
                        }
                    }
                    Err(_) => break,
                }
            }
            tally.require(|| format!("{}: f1 fails already at t=0.01", label(&p)), t_conv > 0.0);
            shortest = shortest.min(t_conv);
        }
        tally.note(format!("smallest t_conv {shortest:.3}"));
    })
}

/// Talbot inversion of the solution image against the closed form.
pub fn criterion_2() -> CriterionResult {
    timed(2, "laplace route vs closed form", Some(5.0), |tally| {
        let grid = log_points(0.01, 20.0, 50);
        for p in cole_cole_grid() {
            let rows: Vec<_> = grid
                .par_iter()
                .map(|&t| (t, solve_laplace_numeric(&p, t), solve_closed_cc(&p, t)))
                .collect();
            for (t, got, want) in rows {
                match (got, want) {
                    (Ok(g), Ok(w)) => tally.rel(|| format!("{} t={t}", label(&p)), g, w, 1e-6),
                    (Err(e), _) | (_, Err(e)) => tally.error(|| format!("{} t={t}", label(&p)), e),
                }
            }
        }
    })
}

/// Subordination integral against f1, or against the Laplace route where f1
/// does not converge.
pub fn criterion_3() -> CriterionResult {
    timed(3, "integral representation vs series", Some(30.0), |tally| {
        let mut fallback = 0;
        for (alpha, nu) in [(0.5, 0.5), (0.75, 2.0 / 3.0)] {
            for a in [0.0, 1.0] {
                let k = PrabhakarKernel::new(alpha, nu, alpha * nu, a).expect("valid kernel");
                let p = VolterraProblem::new(k, 1.0).expect("valid problem");
                for t in [0.1, 1.0, 5.0] {
                    let want = match solve_series_f1(&p, t, DEFAULT_MAX_TERMS) {
                        Ok(s) => Ok(s.value),
                        Err(_) => {
                            fallback += 1;
                            solve_laplace_numeric(&p, t)
                        }
                    };
                    match (solve_integral_rep(&p, t), want) {
                        (Ok(g), Ok(w)) => tally.rel(|| format!("{} t={t}", label(&p)), g, w, 1e-5),
                        (Err(e), _) | (_, Err(e)) => tally.error(|| format!("{} t={t}", label(&p)), e),
                    }
                }
            }
        }
        tally.note(format!(
            "{fallback} points compared with the laplace route (f1 not convergent)"
        ));
    })
}

pub const FIG1_TAUS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
pub const FIG1_ALPHA: f64 = 0.75;
pub const FIG1_A: f64 = 3.0;

/// Closed-form curves for α = 3/4, a = 3, B = 1/(4τ), one per τ in
/// `FIG1_TAUS`. Returned as rows (t, f_τ1, ..., f_τ5).
pub fn fig1(t_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    let problems: Vec<VolterraProblem> = FIG1_TAUS
        .iter()
        .map(|tau| VolterraProblem::cole_cole(FIG1_ALPHA, FIG1_A, 1.0 / (4.0 * tau)))
        .collect::<Result<_>>()?;
    t_grid
        .par_iter()
        .map(|&t| {
            let mut row = vec![t];
            for p in &problems {
                row.push(solve_closed_cc(p, t)?);
            }
            Ok(row)
        })
        .collect()
}

pub fn fig1_default_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 * 0.05).collect()
}

pub fn criterion_4() -> CriterionResult {
    timed(4, "fig1 reproduction", None, |tally| {
        let rows = match fig1(&fig1_default_grid()) {
            Ok(r) => r,
            Err(e) => return tally.error(|| "fig1".into(), e),
        };
        for (j, tau) in FIG1_TAUS.iter().enumerate() {
            let col: Vec<f64> = rows.iter().map(|r| r[j + 1]).collect();
            let b = 1.0 / (4.0 * tau);
            tally.check(|| format!("τ={tau} f(0)"), col[0] - 1.0, 1e-6);
            let end = *col.last().unwrap();
            tally.check(|| format!("τ={tau} f(10) vs 3/(B+3)"), end - 3.0 / (b + 3.0), 0.05);
            tally.require(
                || format!("τ={tau} not monotone decreasing"),
                col.windows(2).all(|w| w[1] < w[0]),
            );
        }
    })
}

/// 4th-order central difference with h = max(1e-4, 1e-4 t).
fn central_difference(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    let h = (1e-4f64).max(1e-4 * t);
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

pub fn criterion_5() -> CriterionResult {
    timed(5, "transform pairs and function identities", Some(60.0), |tally| {
        let opts = ForwardOptions::default();
        // transform pair: ∫ e^{-st} t^{μ-1} E^ν_{α,μ}(a t^α) dt = s^{αν-μ}(s^α - a)^{-ν}
        for &(alpha, mu, nu, a, s) in &[
            (0.5f64, 0.5f64, 1.0f64, -1.0f64, 1.0f64),
            (0.75, 1.0, 0.5, -2.0, 2.0),
            (0.6, 1.4, 2.0, 0.5, 3.0),
            (1.0, 1.0, 1.0, -1.0, 0.7),
            (0.3, 0.8, 0.7, -0.4, 1.5),
        ] {
            let p = MLParams::new(alpha, mu, nu).expect("valid params");
            let f = |t: f64| prabhakar(&p, a, t).unwrap_or(f64::NAN);
            let fo = ForwardOptions {
                endpoint_exponent: mu.min(1.0),
                ..opts
            };
            let want = s.powf(alpha * nu - mu) * (s.powf(alpha) - a).powf(-nu);
            match forward_laplace(f, Complex64::new(s, 0.0), &fo) {
                Ok(v) => tally.rel(|| format!("transform pair {alpha},{mu},{nu},{a},{s}"), v.re, want, 1e-6),
                Err(e) => tally.error(|| "transform pair".into(), e),
            }
        }
        // Caputo eigenfunction: D^α E_α(a t^α) = a E_α(a t^α)
        for &(alpha, a, t) in &[
            (0.5, -1.0, 1.0),
            (0.75, -0.5, 2.0),
            (0.3, 0.7, 0.8),
            (0.9, -2.0, 1.5),
            (0.6, 1.2, 0.5),
        ] {
            let fp = MLParams::new(alpha, 0.0, 1.0).expect("valid params");
            let fo = FracOptions {
                origin_exponent: alpha,
                ..FracOptions::default()
            };
            let d = caputo_derivative_with(|x| prabhakar(&fp, a, x).unwrap_or(f64::NAN), alpha, t, &fo);
            let f = ml3_eval(&MLParams::one(alpha).expect("valid params"), a * t.powf(alpha), 1e-13);
            match (d, f) {
                (Ok(d), Ok(f)) => tally.check(|| format!("caputo eigenfunction {alpha},{a},{t}"), d - a * f, 1e-4),
                (Err(e), _) | (_, Err(e)) => tally.error(|| "caputo eigenfunction".into(), e),
            }
        }
        // derivative by parameter shift vs finite differences
        for &(alpha, mu, nu, a, t, n) in &[
            (0.5, 2.5, 1.0, -1.0, 1.0, 1u32),
            (0.75, 3.2, 0.5, -0.3, 2.0, 2),
            (1.0, 2.0, 1.0, 1.0, 0.7, 1),
            (0.6, 1.8, 2.0, 0.4, 1.5, 1),
            (0.3, 2.7, 0.7, -2.0, 0.9, 1),
        ] {
            let p = MLParams::new(alpha, mu, nu).expect("valid params");
            let fd = if n == 1 {
                central_difference(|x| prabhakar(&p, a, x).unwrap_or(f64::NAN), t)
            } else {
                let q = MLParams::new(alpha, mu - 1.0, nu).expect("valid params");
                central_difference(|x| prabhakar(&q, a, x).unwrap_or(f64::NAN), t)
            };
            match prabhakar_derivative(&p, a, t, n) {
                Ok(v) => tally.rel(
                    || format!("shift derivative {alpha},{mu},{nu},{a},{t},{n}"),
                    v,
                    fd,
                    1e-6,
                ),
                Err(e) => tally.error(|| "shift derivative".into(), e),
            }
        }
        for &(alpha, d, n, x) in &[
            (0.5, 0.0, 3u32, 1.3),
            (0.75, 0.5, 2, 0.4),
            (1.0, 1.0, 4, 2.0),
            (0.3, -0.5, 5, 0.9),
            (0.6, 2.0, 1, 1.7),
        ] {
            let fd = central_difference(|y| ml_poly(alpha, d, n, y.powf(alpha)), x);
            tally.rel(
                || format!("polynomial derivative {alpha},{d},{n},{x}"),
                ml_poly_derivative(alpha, d, n, x),
                fd,
                1e-6,
            );
        }
        // x d/dx E^{-n}(x^α) = nα [E^{-n}(x^α) - E^{1-n}(x^α)]
        for &(alpha, d, n, x) in &[
            (0.5f64, 0.0f64, 3u32, 1.3f64),
            (0.75, 0.5, 2, 0.4),
            (1.0, 1.0, 4, 2.0),
            (0.3, -0.5, 5, 0.9),
            (0.6, 2.0, 1, 1.7),
        ] {
            let y = x.powf(alpha);
            let lhs = x * ml_poly_derivative(alpha, d, n, x);
            let rhs = n as f64 * alpha * (ml_poly(alpha, d, n, y) - ml_poly(alpha, d, n - 1, y));
            tally.check(
                || format!("derivative identity {alpha},{d},{n},{x}"),
                (lhs - rhs) / rhs.abs().max(1.0),
                1e-12,
            );
        }
        // reflection: the two right-hand forms agree
        for &(alpha, x) in &[(0.5, 4.0), (1.0, 2.0), (0.75, -3.0), (0.3, 0.5), (2.0, 1.5)] {
            match ml_reflection_forms(alpha, x) {
                Ok((u, v)) => tally.rel(|| format!("reflection {alpha},{x}"), u, v, 1e-12),
                Err(e) => tally.error(|| "reflection".into(), e),
            }
        }
        // integral representation through the Lévy primitive
        for &(alpha, beta, gamma, a, t) in &[
            (0.5f64, 1.0f64, 1.0f64, 1.0f64, 1.0f64),
            (0.75, 1.0, 0.5, 2.0, 0.5),
            (0.6, 1.2, 2.0, 0.5, 2.0),
            (0.3, 1.0, 1.0, 1.0, 1.5),
            (0.8, 0.9, 1.5, 0.3, 3.0),
        ] {
            let direct = ml3_eval(
                &MLParams::new(alpha, beta, gamma).expect("valid params"),
                -a * t.powf(alpha),
                1e-13,
            );
            match (ml_integral_rep(alpha, beta, gamma, a, t), direct) {
                (Ok(g), Ok(w)) => tally.rel(|| format!("integral rep {alpha},{beta},{gamma},{a},{t}"), g, w, 1e-5),
                (Err(e), _) | (_, Err(e)) => tally.error(|| "integral rep".into(), e),
            }
        }
        // polynomial moments: closed forms, Gamma sums and quadrature
        for &(alpha, d, n, a, b) in &[
            (0.5, 0.0, 2u32, 2.0, 1.0),
            (0.75, 0.5, 3, 1.5, 0.7),
            (1.0, 1.0, 1, 3.0, 1.2),
            (0.3, -0.5, 4, 1.0, 0.4),
            (0.6, 2.0, 2, 2.5, 1.1),
        ] {
            for m in [0u32, 1] {
                let sum = ml_poly_moment(alpha, d, n, a, b, m);
                match ml_poly_moment_factored(alpha, d, n, a, b, m) {
                    Ok(v) => tally.rel(|| format!("moment form {alpha},{d},{n},{a},{b},{m}"), v, sum, 1e-8),
                    Err(e) => tally.error(|| "moment form".into(), e),
                }
                let f = |x: f64| x.powf(d + m as f64) * ml_poly(alpha, d, n, (b * x).powf(alpha));
                let fo = ForwardOptions {
                    endpoint_exponent: 1.0 + d + m as f64,
                    quad: QuadOptions::new(1e-13, 1e-12, 400),
                };
                match forward_laplace(f, Complex64::new(a, 0.0), &fo) {
                    Ok(v) => tally.rel(
                        || format!("moment quadrature {alpha},{d},{n},{a},{b},{m}"),
                        v.re,
                        sum,
                        1e-8,
                    ),
                    Err(e) => tally.error(|| "moment quadrature".into(), e),
                }
            }
            // the m = 1 moment vanishes at a(1+d) = b^α a^{1-α}(1+d+αn)
            if n >= 1 {
                let root = (a.powf(alpha) * (1.0 + d) / (1.0 + d + alpha * n as f64)).powf(1.0 / alpha);
                let scale = ml_poly_moment(alpha, d, n, a, 0.0, 1).abs();
                let v = ml_poly_moment(alpha, d, n, a, root, 1);
                tally.check(|| format!("moment root {alpha},{d},{n},{a}"), v / scale, 1e-10);
            }
            // vanishing at a = b: m = 0 for n ≥ 1, m = 1 for n ≥ 2
            for m in [0u32, 1] {
                if n > m {
                    let v = ml_poly_moment(alpha, d, n, b, b, m);
                    tally.check(|| format!("moment at a=b {alpha},{d},{n},{b},{m}"), v, 1e-10);
                }
            }
        }
        // recurrence x^α E^{-n}_{α,1+d+α}(x^α) + E^{-(n+1)}_{α,1+d}(x^α) = E^{-n}_{α,1+d}(x^α)
        for &(alpha, d, x) in &[
            (0.5f64, 0.0f64, 1.3f64),
            (0.75, 0.5, 0.4),
            (1.0, 1.0, 2.0),
            (0.3, -0.5, 0.9),
            (0.6, 2.0, 1.7),
        ] {
            let y = x.powf(alpha);
            for n in 0..=8u32 {
                let lhs = y * ml_poly(alpha, d + alpha, n, y) + ml_poly(alpha, d, n + 1, y);
                let rhs = ml_poly(alpha, d, n, y);
                let scale = rhs.abs().max(lhs.abs()).max(1.0);
                tally.check(|| format!("recurrence {alpha},{d},{x},{n}"), (lhs - rhs) / scale, 1e-12);
            }
        }
    })
}

pub fn criterion_6() -> CriterionResult {
    timed(6, "levy densities and h-function routes", None, |tally| {
        for alpha in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
            for lambda in [0.0, 1.0] {
                for &(u, t) in &[(1.0, 0.5), (1.0, 1.0), (0.5, 2.0), (2.0, 3.0)] {
                    let q = LevyQuery::new(alpha, u, t, lambda).expect("valid query");
                    match (h_function(&q, HRoute::Series), h_function(&q, HRoute::Inversion)) {
                        (Ok(s), Ok(i)) => tally.rel(|| format!("h α={alpha:.4} λ={lambda} u={u} t={t}"), s, i, 1e-6),
                        (Err(e), _) | (_, Err(e)) => {
                            tally.error(|| format!("h α={alpha:.4} λ={lambda} u={u} t={t}"), e)
                        }
                    }
                }
            }
        }
        for &(u, t, want) in &[(0.5, 1.0, 1.0), (2.0, 1.0, 0.0), (1.0, 0.999, 0.0), (1.0, 1.001, 1.0)] {
            match levy_primitive(1.0, u, t) {
                Ok(v) => tally.require(|| format!("step u={u} t={t}: {v} != {want}"), v == want),
                Err(e) => tally.error(|| "step".into(), e),
            }
        }
        for alpha in [1.0 / 3.0, 0.5, 2.0 / 3.0] {
            match levy_mass(alpha, 1.0, &QuadOptions::new(1e-12, 1e-11, 400)) {
                Ok(m) => tally.check(|| format!("mass α={alpha:.4}"), m - 1.0, 1e-6),
                Err(e) => tally.error(|| "mass".into(), e),
            }
        }
    })
}

pub fn criterion_7() -> CriterionResult {
    timed(7, "integral equation vs closed form", None, |tally| {
        let p = cc(0.75, 3.0, 1.25);
        let grid: Vec<f64> = (1..=200).map(|i| i as f64 * 0.05).collect();
        match solve_integral_eq1(&p, &grid) {
            Ok(curve) => {
                for (t, v) in curve.t_grid.iter().zip(&curve.values) {
                    match solve_closed_cc(&p, *t) {
                        Ok(c) => tally.check(|| format!("t={t}"), v - c, 1e-4),
                        Err(e) => tally.error(|| format!("t={t}"), e),
                    }
                }
            }
            Err(e) => tally.error(|| "eq1".into(), e),
        }
    })
}

pub fn criterion_8() -> CriterionResult {
    timed(8, "jonscher exponents", None, |tally| {
        let tau = 1.0;
        let grid = default_omega_grid(tau).expect("valid grid");
        // (kernel, expected 1-n, expected m); with a = 0 the kernel is s^{μ-1}
        // and the low-frequency slope is μ itself
        let cases = [
            (PrabhakarKernel::cole_cole(0.75, 0.0), 0.75, 0.75),
            (PrabhakarKernel::new(0.5, 1.0, 0.9, 1.0), 0.9, 0.4),
        ];
        for (k, one_n, m) in cases {
            let k = k.expect("valid kernel");
            match spectrum(&k, 1.0, &grid).and_then(|s| jonscher_exponents(&s, tau)) {
                Ok((fm, fn_)) => {
                    tally.check(|| format!("1-n for μ={}", k.mu), fn_ - one_n, 0.02);
                    tally.check(|| format!("m for μ={}", k.mu), fm - m, 0.02);
                }
                Err(e) => tally.error(|| "jonscher".into(), e),
            }
        }
    })
}

/// Configurations for the f1/f2 comparison; f2 needs a^ν < B.
pub fn criterion_9_configs() -> Vec<VolterraProblem> {
    let general = PrabhakarKernel::new(0.75, 0.5, 0.375, 0.25).expect("valid kernel");
    vec![
        cc(0.75, 0.5, 1.0),
        cc(0.5, 0.25, 1.25),
        VolterraProblem::new(general, 1.0).expect("valid problem"),
    ]
}

pub fn criterion_9() -> CriterionResult {
    timed(9, "f1/f2 equality", None, |tally| {
        let grid = log_points(0.5, 200.0, 24);
        let mut overlap = 0;
        let mut single = 0;
        for p in criterion_9_configs() {
            let mut covered = 0;
            for &t in &grid {
                let f1 = solve_series_f1(&p, t, DEFAULT_MAX_TERMS).ok();
                let f2 = solve_series_f2(&p, t, DEFAULT_MAX_TERMS).ok();
                match (f1, f2) {
                    (Some(a), Some(b)) => {
                        overlap += 1;
                        covered += 1;
                        tally.check(|| format!("{} t={t:.3} f1-f2", label(&p)), a.value - b.value, 1e-8);
                    }
                    (Some(s), None) | (None, Some(s)) => {
                        single += 1;
                        covered += 1;
                        match solve_laplace_numeric(&p, t) {
                            Ok(o) => tally.rel(|| format!("{} t={t:.3} vs laplace", label(&p)), s.value, o, 1e-5),
                            Err(e) => tally.error(|| format!("{} t={t:.3}", label(&p)), e),
                        }
                    }
                    (None, None) => {}
                }
            }
            tally.require(|| format!("{}: only {covered} t covered", label(&p)), covered >= 3);
        }
        tally.note(format!("{overlap} points with both series, {single} with one"));
    })
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}
