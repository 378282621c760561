//! Relaxation solvers for the memory equation
//!
//!   ∫_0^t k(t-ξ) f'(ξ) dξ + B f(t) = 0,   f(0) = f0,
//!
//! with a Prabhakar kernel k, and for its integral form
//! f(t) = f0 - B ∫_0^t κ(t-ξ) f(ξ) dξ. Also the Caputo derivative and the
//! Riemann-Liouville integral used to check the solutions.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laplace::{
    inverse_laplace, inverse_laplace_checked, kernel_image_unchecked, talbot, InversionConfig, InversionMethod,
    LaplaceImage, PrabhakarKernel, DEFAULT_TALBOT_NODES,
};
use crate::levy::levy_primitive;
use crate::mlfun::{ml3_eval, ml3_eval_err, prabhakar, MLParams};
use crate::quad::{integrate, integrate_power_origin, QuadOptions};
use crate::series::{SeriesSum, DEFAULT_TOL};
use crate::special::rgamma;

/// f1 is reported non-convergent once max|term| / |sum| exceeds this.
pub const F1_CANCELLATION_LIMIT: f64 = 1e6;
/// f1 is rejected once the summed error of its terms exceeds this fraction of |f0|.
pub const F1_PRECISION: f64 = 1e-9;
/// f2 is accepted when its smallest term is below this fraction of the sum.
pub const F2_ACCEPT: f64 = 1e-10;
pub const DEFAULT_MAX_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolterraProblem {
    pub kernel: PrabhakarKernel,
    pub b: f64,
    pub f0: f64,
}

impl VolterraProblem {
    /// B >= 0; B = 0 decouples the kernel and leaves f ≡ f0.
    pub fn new(kernel: PrabhakarKernel, b: f64) -> Result<Self> {
        if !(b >= 0.0) || !b.is_finite() {
            return Err(Error::invalid(format!("coupling B = {b} must be finite and >= 0")));
        }
        Ok(VolterraProblem { kernel, b, f0: 1.0 })
    }

    pub fn with_f0(mut self, f0: f64) -> Result<Self> {
        if !f0.is_finite() {
            return Err(Error::invalid("f0 must be finite"));
        }
        self.f0 = f0;
        Ok(self)
    }

    /// ν = 1, μ = α.
    pub fn cole_cole(alpha: f64, a: f64, b: f64) -> Result<Self> {
        Self::new(PrabhakarKernel::cole_cole(alpha, a)?, b)
    }

    /// Long-time limit a/(B+a)·f0 of the Cole-Cole shaped problem.
    pub fn residual_level(&self) -> f64 {
        let a = self.kernel.a;
        if a + self.b == 0.0 {
            self.f0
        } else {
            a / (self.b + a) * self.f0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SeriesF1,
    SeriesF2,
    ClosedCc,
    IntegralRep,
    LaplaceNumeric,
    IntegralEq1,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::SeriesF1 => "series_f1",
            Method::SeriesF2 => "series_f2",
            Method::ClosedCc => "closed_cc",
            Method::IntegralRep => "integral_rep",
            Method::LaplaceNumeric => "laplace_numeric",
            Method::IntegralEq1 => "integral_eq1",
        })
    }
}

/// Route requested for a whole curve. `Series` picks f1 or f2 per point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Series,
    Closed,
    Integral,
    Laplace,
    Eq1,
}

impl FromStr for SolveMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(SolveMethod::Series),
            "closed" => Ok(SolveMethod::Closed),
            "integral" => Ok(SolveMethod::Integral),
            "laplace" => Ok(SolveMethod::Laplace),
            "eq1" => Ok(SolveMethod::Eq1),
            other => Err(Error::invalid(format!("unknown solve method {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationCurve {
    pub t_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Route that produced each value.
    pub methods: Vec<Method>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSolution {
    pub value: f64,
    /// Last term added, plus the accumulated error of the terms for f1.
    pub error_estimate: f64,
    pub terms: usize,
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("time t = {t} must be finite and >= 0")));
    }
    Ok(())
}

fn unavailable(op: &'static str, r: usize, reason: String) -> Error {
    Error::NonConvergent { op, terms: r, reason }
}

fn eval_term<F: Fn(usize) -> Result<f64>>(op: &'static str, term: &F, r: usize) -> Result<f64> {
    let v = term(r).map_err(|e| unavailable(op, r, format!("term {r} unavailable: {e}")))?;
    if !v.is_finite() {
        return Err(unavailable(op, r, format!("term {r} overflowed")));
    }
    Ok(v)
}

/// Sums a convergent series whose terms come with an absolute error estimate.
/// Rejects sums that cancel too much or whose accumulated term error exceeds
/// `F1_PRECISION * scale`.
fn sum_terms<F: Fn(usize) -> Result<(f64, f64)>>(
    op: &'static str,
    max_terms: usize,
    scale: f64,
    term: F,
) -> Result<SeriesSolution> {
    if max_terms == 0 {
        return Err(Error::invalid("max_terms must be >= 1"));
    }
    let mut acc = SeriesSum::new(DEFAULT_TOL);
    let mut err = 0.0;
    for r in 0..max_terms {
        let (v, e) = term(r).map_err(|e| unavailable(op, r, format!("term {r} unavailable: {e}")))?;
        if !v.is_finite() {
            return Err(unavailable(op, r, format!("term {r} overflowed")));
        }
        err += e;
        if err > F1_PRECISION * scale {
            return Err(unavailable(
                op,
                r + 1,
                format!("term error {err:.3e} exceeds {F1_PRECISION:.0e} x {scale:.3e}"),
            ));
        }
        if acc.push(Complex64::new(v, 0.0)) {
            let s = acc.finish();
            if s.cancellation() > F1_CANCELLATION_LIMIT {
                return Err(unavailable(
                    op,
                    s.terms,
                    format!("max |term| / |sum| = {:.3e}", s.cancellation()),
                ));
            }
            return Ok(SeriesSolution {
                value: s.value.re,
                error_estimate: s.last_term + err,
                terms: s.terms,
            });
        }
    }
    Err(acc.non_convergent(op))
}

/// Sums an asymptotic series up to its smallest term. Accepted when that
/// term is below `F2_ACCEPT` times the sum.
fn sum_asymptotic<F: Fn(usize) -> Result<f64>>(op: &'static str, max_terms: usize, term: F) -> Result<SeriesSolution> {
    if max_terms == 0 {
        return Err(Error::invalid("max_terms must be >= 1"));
    }
    let mut sum = 0.0;
    let mut max_term = 0.0f64;
    let mut prev = f64::INFINITY;
    let mut terms = 0;
    for r in 0..max_terms {
        let v = eval_term(op, &term, r)?;
        if v == 0.0 {
            // Γ-pole terms carry no information about the remainder
            continue;
        }
        if v.abs() > prev && r > 1 {
            break;
        }
        sum += v;
        terms = r + 1;
        max_term = max_term.max(v.abs());
        prev = v.abs();
        if v.abs() <= DEFAULT_TOL * sum.abs() {
            break;
        }
    }
    if !(prev <= F2_ACCEPT * sum.abs()) {
        return Err(unavailable(
            op,
            terms,
            format!("smallest term {prev:.3e} against |sum| {:.3e}", sum.abs()),
        ));
    }
    if max_term > F1_CANCELLATION_LIMIT * sum.abs() {
        return Err(unavailable(op, terms, format!("max |term| {max_term:.3e} cancels")));
    }
    Ok(SeriesSolution {
        value: sum,
        error_estimate: prev,
        terms,
    })
}

/// Small-time series f1 = Σ_r (-B)^r t^{μr} E^{νr}_{α,1+μr}(-a t^α) f0.
pub fn solve_series_f1(p: &VolterraProblem, t: f64, max_terms: usize) -> Result<SeriesSolution> {
    check_t(t)?;
    if t == 0.0 || p.b == 0.0 {
        return Ok(SeriesSolution {
            value: p.f0,
            error_estimate: 0.0,
            terms: 1,
        });
    }
    let k = p.kernel;
    let x = -k.a * t.powf(k.alpha);
    sum_terms("series_f1", max_terms, p.f0.abs(), |r| {
        let rf = r as f64;
        let (e, rel) = ml3_eval_err(&MLParams::new(k.alpha, 1.0 + k.mu * rf, k.nu * rf)?, x, DEFAULT_TOL)?;
        let v = (-p.b).powi(r as i32) * t.powf(k.mu * rf) * e * p.f0;
        Ok((v, v.abs() * rel))
    })
}

/// Large-time series
/// f2 = -Σ_r (-B)^{-1-r} t^{-μ(1+r)} E^{-ν(1+r)}_{α,1-μ(1+r)}(-a t^α) f0.
///
/// The series is asymptotic in t: 1/Γ(1-μ(1+r)-...) grows factorially, so
/// it is summed to its smallest term. For a > 0 the leading part of each
/// term is (a^ν/B)^{r+1} t^{(αν-μ)(r+1)}, so with μ = αν it needs a^ν < B.
pub fn solve_series_f2(p: &VolterraProblem, t: f64, max_terms: usize) -> Result<SeriesSolution> {
    check_t(t)?;
    if !(t > 0.0) || p.b == 0.0 {
        return Err(Error::NonConvergent {
            op: "series_f2",
            terms: 0,
            reason: "f2 needs t > 0 and B > 0".into(),
        });
    }
    let k = p.kernel;
    sum_asymptotic("series_f2", max_terms, |r| {
        let n = (r + 1) as f64;
        let e = prabhakar(&MLParams::new(k.alpha, 1.0 - k.mu * n, -k.nu * n)?, -k.a, t)?;
        Ok(-(-p.b).powi(-(r as i32) - 1) * e * p.f0)
    })
}

/// f1 where it converges, otherwise f2.
pub fn solve_series(p: &VolterraProblem, t: f64, max_terms: usize) -> Result<(SeriesSolution, Method)> {
    match solve_series_f1(p, t, max_terms) {
        Ok(s) => Ok((s, Method::SeriesF1)),
        Err(Error::NonConvergent { .. }) => Ok((solve_series_f2(p, t, max_terms)?, Method::SeriesF2)),
        Err(e) => Err(e),
    }
}

fn require_cole_cole(p: &VolterraProblem) -> Result<()> {
    if !p.kernel.is_cole_cole() {
        return Err(Error::invalid(format!(
            "closed form needs nu = 1 and mu = alpha, got nu = {}, mu = {}, alpha = {}",
            p.kernel.nu, p.kernel.mu, p.kernel.alpha
        )));
    }
    Ok(())
}

/// f = B/(B+a)·(E_α(-(B+a) t^α) - 1)·f0 + f0 for the ν = 1, μ = α kernel.
pub fn solve_closed_cc(p: &VolterraProblem, t: f64) -> Result<f64> {
    require_cole_cole(p)?;
    check_t(t)?;
    let c = p.b + p.kernel.a;
    if t == 0.0 || c == 0.0 {
        return Ok(p.f0);
    }
    let alpha = p.kernel.alpha;
    let e = ml3_eval(&MLParams::one(alpha)?, -c * t.powf(alpha), DEFAULT_TOL)?;
    Ok(p.b / c * (e - 1.0) * p.f0 + p.f0)
}

/// Time derivative of [`solve_closed_cc`]: -B t^{α-1} E_{α,α}(-(B+a) t^α) f0.
pub fn closed_cc_derivative(p: &VolterraProblem, t: f64) -> Result<f64> {
    require_cole_cole(p)?;
    if !(t > 0.0) {
        return Err(Error::invalid("derivative needs t > 0"));
    }
    let alpha = p.kernel.alpha;
    let c = p.b + p.kernel.a;
    let e = prabhakar(&MLParams::two(alpha, alpha)?, -c, t)?;
    Ok(-p.b * e * p.f0)
}

/// Past this argument the stable-law primitive Φ_α(ξ, t) is below e^{-40}.
fn xi_cutoff(alpha: f64, t: f64) -> f64 {
    if alpha == 1.0 {
        return t;
    }
    let c = (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha));
    let z = (c / 40.0).powf((1.0 - alpha) / alpha);
    (t / z).powf(alpha)
}

/// f0 + f0 ∫_0^∞ e^{-aξ} ξ^{-1} E_{ν,0}(-B ξ^ν) Φ_α(ξ, t) dξ, valid for μ = αν.
pub fn solve_integral_rep(p: &VolterraProblem, t: f64) -> Result<f64> {
    let k = p.kernel;
    if (k.mu - k.alpha * k.nu).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "integral representation needs mu = alpha*nu, got mu = {}, alpha*nu = {}",
            k.mu,
            k.alpha * k.nu
        )));
    }
    check_t(t)?;
    if t == 0.0 || p.b == 0.0 {
        return Ok(p.f0);
    }
    let en = MLParams::two(k.nu, k.nu)?;
    let mut upper = xi_cutoff(k.alpha, t);
    if k.a > 0.0 {
        upper = upper.min(40.0 / k.a);
    }
    let mut failure = None;
    // ξ^{-1} E_{ν,0}(-Bξ^ν) = -B ξ^{ν-1} E_{ν,ν}(-Bξ^ν)
    let mut f = |xi: f64| -> f64 {
        if xi <= 0.0 || xi >= upper {
            return 0.0;
        }
        let v = (|| -> Result<f64> {
            let e = ml3_eval(&en, -p.b * xi.powf(k.nu), DEFAULT_TOL)?;
            let phi = levy_primitive(k.alpha, xi, t)?;
            Ok(-(-k.a * xi).exp() * p.b * xi.powf(k.nu - 1.0) * e * phi)
        })();
        v.unwrap_or_else(|e| {
            failure.get_or_insert(e);
            0.0
        })
    };
    let opts = QuadOptions::new(1e-12, 1e-10, 400);
    let split = t.powf(k.alpha).min(upper);
    let head = integrate_power_origin(&mut f, split, k.nu, &opts)?;
    let body = integrate(&mut f, split, upper, &opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(p.f0 * (1.0 + head.value + body.value))
}

/// Laplace image f̂(s) = k̂(s) f0 / (s k̂(s) + B).
pub fn solution_image(p: &VolterraProblem) -> LaplaceImage {
    let (k, b, f0) = (p.kernel, p.b, p.f0);
    LaplaceImage::new(
        format!(
            "relaxation image alpha={} nu={} mu={} a={} B={b} f0={f0}",
            k.alpha, k.nu, k.mu, k.a
        ),
        move |s| {
            let kh = kernel_image_unchecked(&k, s);
            kh * f0 / (s * kh + b)
        },
    )
}

/// Talbot inversion of the solution image.
pub fn solve_laplace_numeric(p: &VolterraProblem, t: f64) -> Result<f64> {
    solve_laplace_with(p, t, InversionMethod::Talbot, DEFAULT_TALBOT_NODES)
}

pub fn solve_laplace_with(p: &VolterraProblem, t: f64, method: InversionMethod, nodes: usize) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(p.f0);
    }
    inverse_laplace(&solution_image(p), t, method, nodes)
}

/// Talbot value, refused when Stehfest disagrees beyond the gate.
pub fn solve_laplace_checked(p: &VolterraProblem, t: f64, cfg: &InversionConfig) -> Result<f64> {
    check_t(t)?;
    if t == 0.0 {
        return Ok(p.f0);
    }
    inverse_laplace_checked(&solution_image(p), t, cfg)
}

/// f'(t) from the image s f̂ - f0 = -B f0 / (s k̂ + B).
pub fn solve_laplace_derivative(p: &VolterraProblem, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid("derivative needs t > 0"));
    }
    let (k, b, f0) = (p.kernel, p.b, p.f0);
    let v = talbot(
        |s| -b * f0 / (s * kernel_image_unchecked(&k, s) + b),
        t,
        DEFAULT_TALBOT_NODES,
        0.0,
    );
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NumericalOverflow("solve_laplace_derivative"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eq1Options {
    pub initial_steps: usize,
    pub max_steps: usize,
    /// Accept once halving the step changes no output value by more than this.
    pub tol: f64,
}

impl Default for Eq1Options {
    fn default() -> Self {
        Eq1Options {
            initial_steps: 256,
            max_steps: 1 << 15,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eq1Report {
    pub steps: usize,
    pub change: f64,
}

/// Integrals of κ(τ) = τ^{μ-1} E^ν_{α,μ}(-a τ^α): K1 = ∫_0^τ κ, K2 = ∫_0^τ K1.
struct KappaMoments {
    k1: MLParams,
    k2: MLParams,
    a: f64,
}

impl KappaMoments {
    fn new(k: &PrabhakarKernel) -> Result<Self> {
        Ok(KappaMoments {
            k1: MLParams::new(k.alpha, k.mu + 1.0, k.nu)?,
            k2: MLParams::new(k.alpha, k.mu + 2.0, k.nu)?,
            a: k.a,
        })
    }

    fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        Ok((prabhakar(&self.k1, -self.a, tau)?, prabhakar(&self.k2, -self.a, tau)?))
    }

    /// Weights of f at the left and right ends of an interval whose far
    /// and near distances from the evaluation time are `far` and `near`.
    fn weights(&self, near: (f64, f64), far: (f64, f64), h: f64) -> (f64, f64) {
        let w_left = (h * far.0 - far.1 + near.1) / h;
        let w_right = far.0 - near.0 - w_left;
        (w_left, w_right)
    }
}

/// Product-integration solution on the uniform mesh t_i = i h, i = 0..=n.
fn eq1_mesh(p: &VolterraProblem, moments: &KappaMoments, h: f64, n: usize) -> Result<Vec<f64>> {
    let k: Vec<(f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|m| moments.eval(m as f64 * h))
        .collect::<Result<_>>()?;
    let (w0, w1): (Vec<f64>, Vec<f64>) = (0..n).map(|m| moments.weights(k[m], k[m + 1], h)).unzip();
    // coefficient of f_j in the history sum at distance d = i - j >= 1
    let mut c = vec![0.0; n + 1];
    for d in 1..n {
        c[d] = w0[d - 1] + w1[d];
    }
    let denom = 1.0 + p.b * w1[0];
    let mut f = vec![p.f0; n + 1];
    for i in 1..=n {
        let mut hist = w0[i - 1] * f[0];
        for j in 1..i {
            hist += c[i - j] * f[j];
        }
        f[i] = (p.f0 - p.b * hist) / denom;
    }
    Ok(f)
}

/// Value at an off-mesh time t from the mesh solution, by the same product
/// rule with a final partial interval.
fn eq1_at(p: &VolterraProblem, moments: &KappaMoments, f: &[f64], h: f64, t: f64) -> Result<f64> {
    let n = ((t / h).floor() as usize).min(f.len() - 1);
    let k: Vec<(f64, f64)> = (0..=n).map(|j| moments.eval(t - j as f64 * h)).collect::<Result<_>>()?;
    let mut hist = 0.0;
    for j in 0..n {
        let (wl, wr) = moments.weights(k[j + 1], k[j], h);
        hist += wl * f[j] + wr * f[j + 1];
    }
    let hp = t - n as f64 * h;
    let (wl, wr) = moments.weights((0.0, 0.0), k[n], hp);
    hist += wl * f[n];
    Ok((p.f0 - p.b * hist) / (1.0 + p.b * wr))
}

fn eq1_on_grid(p: &VolterraProblem, moments: &KappaMoments, grid: &[f64], t_max: f64, n: usize) -> Result<Vec<f64>> {
    let h = t_max / n as f64;
    let f = eq1_mesh(p, moments, h, n)?;
    grid.par_iter()
        .map(|&t| {
            if t == 0.0 {
                return Ok(p.f0);
            }
            let x = t / h;
            let i = x.round();
            if (x - i).abs() <= 1e-9 * x.max(1.0) {
                Ok(f[i as usize])
            } else {
                eq1_at(p, moments, &f, h, t)
            }
        })
        .collect()
}

/// Mesh size that puts every point of a uniform grid starting at a
/// multiple of its spacing on a mesh node.
fn aligned_steps(grid: &[f64], t_max: f64, minimum: usize) -> usize {
    if grid.len() >= 2 {
        let d = grid[1] - grid[0];
        let aligned = d > 0.0
            && grid.iter().all(|&t| {
                let x = t / d;
                (x - x.round()).abs() < 1e-9 * x.max(1.0)
            });
        if aligned {
            let cells = (t_max / d).round() as usize;
            if cells >= 1 {
                return cells * minimum.div_ceil(cells);
            }
        }
    }
    minimum
}

/// Solves f(t) = f0 - B ∫_0^t κ(t-ξ) f(ξ) dξ on `grid` with κ the inverse
/// transform of 1/(s k̂(s)).
pub fn solve_integral_eq1(p: &VolterraProblem, grid: &[f64]) -> Result<RelaxationCurve> {
    Ok(solve_integral_eq1_with(p, grid, &Eq1Options::default())?.0)
}

pub fn solve_integral_eq1_with(
    p: &VolterraProblem,
    grid: &[f64],
    opts: &Eq1Options,
) -> Result<(RelaxationCurve, Eq1Report)> {
    if grid.is_empty() {
        return Err(Error::invalid("empty time grid"));
    }
    if grid.iter().any(|t| !(*t >= 0.0) || !t.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time grid must be finite, >= 0 and strictly ascending"));
    }
    if opts.initial_steps < 2 || opts.max_steps < opts.initial_steps {
        return Err(Error::invalid("eq1 step limits are inconsistent"));
    }
    let t_max = *grid.last().unwrap();
    let curve = |values: Vec<f64>| RelaxationCurve {
        t_grid: grid.to_vec(),
        methods: vec![Method::IntegralEq1; values.len()],
        values,
    };
    if t_max == 0.0 || p.b == 0.0 {
        let v = vec![p.f0; grid.len()];
        return Ok((curve(v), Eq1Report { steps: 0, change: 0.0 }));
    }
    let moments = KappaMoments::new(&p.kernel)?;
    let mut n = aligned_steps(grid, t_max, opts.initial_steps);
    let mut coarse = eq1_on_grid(p, &moments, grid, t_max, n)?;
    loop {
        let fine_n = 2 * n;
        let fine = eq1_on_grid(p, &moments, grid, t_max, fine_n)?;
        let change = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if change <= opts.tol {
            return Ok((curve(fine), Eq1Report { steps: fine_n, change }));
        }
        if 2 * fine_n > opts.max_steps {
            return Err(Error::GridTooCoarse {
                change,
                tol: opts.tol,
                steps: fine_n,
            });
        }
        n = fine_n;
        coarse = fine;
    }
}

/// Solution of `p` on `grid` by the requested route.
pub fn relaxation_curve(p: &VolterraProblem, grid: &[f64], method: SolveMethod) -> Result<RelaxationCurve> {
    if method == SolveMethod::Eq1 {
        return solve_integral_eq1(p, grid);
    }
    let points: Vec<(f64, Method)> = grid
        .par_iter()
        .map(|&t| match method {
            SolveMethod::Series => solve_series(p, t, DEFAULT_MAX_TERMS).map(|(s, m)| (s.value, m)),
            SolveMethod::Closed => solve_closed_cc(p, t).map(|v| (v, Method::ClosedCc)),
            SolveMethod::Integral => solve_integral_rep(p, t).map(|v| (v, Method::IntegralRep)),
            SolveMethod::Laplace => solve_laplace_numeric(p, t).map(|v| (v, Method::LaplaceNumeric)),
            SolveMethod::Eq1 => unreachable!(),
        })
        .collect::<Result<_>>()?;
    let (values, methods) = points.into_iter().unzip();
    Ok(RelaxationCurve {
        t_grid: grid.to_vec(),
        values,
        methods,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOptions {
    /// The integrand behaves like ξ^{p-1} near ξ = 0.
    pub origin_exponent: f64,
    pub quad: QuadOptions,
}

impl Default for FracOptions {
    fn default() -> Self {
        FracOptions {
            origin_exponent: 1.0,
            quad: QuadOptions::new(1e-12, 1e-10, 200),
        }
    }
}

/// ∫_0^t (t-ξ)^{e-1} g(ξ) dξ, e > 0. The half next to ξ = t is integrated
/// in w = (t-ξ)^e, which turns the weight into dw/e.
pub fn abel_integral<G: Fn(f64) -> f64>(g: G, e: f64, t: f64, opts: &FracOptions) -> Result<f64> {
    if !(e > 0.0) {
        return Err(Error::invalid(format!("abel exponent {e} must be > 0")));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("abel integral needs t > 0, got {t}")));
    }
    if !(opts.origin_exponent > 0.0) {
        return Err(Error::invalid("origin exponent must be > 0"));
    }
    let mid = 0.5 * t;
    let near = integrate(|w: f64| g(t - w.powf(1.0 / e)) / e, 0.0, mid.powf(e), &opts.quad)?;
    let far = integrate_power_origin(
        |xi: f64| (t - xi).powf(e - 1.0) * g(xi),
        mid,
        opts.origin_exponent,
        &opts.quad,
    )?;
    Ok(near.value + far.value)
}

/// Caputo derivative (1/Γ(1-α)) ∫_0^t (t-ξ)^{-α} f'(ξ) dξ, given f'.
pub fn caputo_derivative<F: Fn(f64) -> f64>(f_prime: F, alpha: f64, t: f64) -> Result<f64> {
    caputo_derivative_with(f_prime, alpha, t, &FracOptions::default())
}

pub fn caputo_derivative_with<F: Fn(f64) -> f64>(f_prime: F, alpha: f64, t: f64, opts: &FracOptions) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("caputo order {alpha} outside (0, 1)")));
    }
    Ok(abel_integral(f_prime, 1.0 - alpha, t, opts)? * rgamma(1.0 - alpha))
}

/// Riemann-Liouville integral (1/Γ(η)) ∫_0^t (t-ξ)^{η-1} f(ξ) dξ.
pub fn rl_fractional_integral<F: Fn(f64) -> f64>(f: F, eta: f64, t: f64) -> Result<f64> {
    rl_fractional_integral_with(f, eta, t, &FracOptions::default())
}

pub fn rl_fractional_integral_with<F: Fn(f64) -> f64>(f: F, eta: f64, t: f64, opts: &FracOptions) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("integral order {eta} outside (0, 1)")));
    }
    Ok(abel_integral(f, eta, t, opts)? * rgamma(eta))
}

/// ᶜD^α f + (B+a) f - a f0 along the closed Cole-Cole solution.
pub fn cole_cole_residual(p: &VolterraProblem, t: f64) -> Result<f64> {
    require_cole_cole(p)?;
    let alpha = p.kernel.alpha;
    let opts = FracOptions {
        origin_exponent: alpha,
        ..FracOptions::default()
    };
    let failure = std::sync::Mutex::new(None);
    let d = caputo_derivative_with(
        |xi| {
            closed_cc_derivative(p, xi).unwrap_or_else(|e| {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            })
        },
        alpha,
        t,
        &opts,
    );
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let f = solve_closed_cc(p, t)?;
    Ok(d? + (p.b + p.kernel.a) * f - p.kernel.a * p.f0)
}

/// ∫_0^t k(t-ξ) f'(ξ) dξ + B f(t) along the Laplace-route solution.
pub fn memory_equation_residual(p: &VolterraProblem, t: f64) -> Result<f64> {
    let k = p.kernel;
    let kp = MLParams::new(k.alpha, 1.0 - k.mu, -k.nu)?;
    let opts = FracOptions {
        origin_exponent: k.mu,
        ..FracOptions::default()
    };
    // k(τ) = τ^{-μ} E^{-ν}_{α,1-μ}(-a τ^α); the τ^{-μ} goes into the Abel weight
    let failure = std::sync::Mutex::new(None);
    let conv = abel_integral(
        |xi| {
            let v = (|| -> Result<f64> {
                let e = ml3_eval(&kp, -k.a * (t - xi).powf(k.alpha), DEFAULT_TOL)?;
                Ok(e * solve_laplace_derivative(p, xi)?)
            })();
            v.unwrap_or_else(|e| {
                failure.lock().unwrap().get_or_insert(e);
                0.0
            })
        },
        1.0 - k.mu,
        t,
        &opts,
    );
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(conv? + p.b * solve_laplace_numeric(p, t)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cc(alpha: f64, a: f64, b: f64) -> VolterraProblem {
        VolterraProblem::cole_cole(alpha, a, b).unwrap()
    }

    #[test]
    fn series_f1_matches_closed_form() {
        let p = cc(0.75, 3.0, 1.25);
        for t in [0.01, 0.1, 0.5, 1.0] {
            let s = solve_series_f1(&p, t, 200).unwrap();
            assert_relative_eq!(s.value, solve_closed_cc(&p, t).unwrap(), max_relative = 1e-10);
        }
    }

    #[test]
    fn boundary_values() {
        let p = cc(0.75, 3.0, 1.25);
        assert_eq!(solve_closed_cc(&p, 0.0).unwrap(), 1.0);
        assert_eq!(solve_series_f1(&p, 0.0, 10).unwrap().value, 1.0);
        let far = solve_closed_cc(&p, 1e6).unwrap();
        assert!((far - 3.0 / 4.25).abs() < 1e-3);
    }

    #[test]
    fn f2_converges_only_below_the_coupling() {
        let p = cc(0.75, 0.5, 1.0);
        for t in [20.0, 50.0, 100.0] {
            let s = solve_series_f2(&p, t, 200).unwrap();
            assert_relative_eq!(s.value, solve_closed_cc(&p, t).unwrap(), max_relative = 1e-10);
        }
        // asymptotic in t: too early to reach its accuracy
        assert!(matches!(
            solve_series_f2(&p, 5.0, 200),
            Err(Error::NonConvergent { .. })
        ));
        let q = cc(0.75, 3.0, 1.25);
        assert!(matches!(
            solve_series_f2(&q, 10.0, 200),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn laplace_route_matches_closed_form() {
        let p = cc(0.5, 3.0, 0.25);
        for t in [0.01, 0.3, 2.0, 20.0] {
            assert_relative_eq!(
                solve_laplace_numeric(&p, t).unwrap(),
                solve_closed_cc(&p, t).unwrap(),
                max_relative = 1e-7
            );
        }
    }

    #[test]
    fn pure_cole_cole_response() {
        let k = PrabhakarKernel::new(0.9, 0.5, 0.45, 0.0).unwrap();
        let p = VolterraProblem::new(k, 1.0).unwrap();
        for t in [0.1f64, 1.0, 5.0] {
            let e = ml3_eval(&MLParams::one(0.45).unwrap(), -t.powf(0.45), DEFAULT_TOL).unwrap();
            assert_relative_eq!(solve_laplace_numeric(&p, t).unwrap(), e, max_relative = 1e-7);
        }
    }

    #[test]
    fn integral_rep_matches_series() {
        let k = PrabhakarKernel::new(0.5, 0.5, 0.25, 1.0).unwrap();
        let p = VolterraProblem::new(k, 1.0).unwrap();
        for t in [0.1, 1.0] {
            let s = solve_series_f1(&p, t, 200).unwrap().value;
            assert_relative_eq!(solve_integral_rep(&p, t).unwrap(), s, max_relative = 1e-6);
        }
    }

    #[test]
    fn integral_rep_step_case() {
        let k = PrabhakarKernel::new(1.0, 0.5, 0.5, 0.0).unwrap();
        let p = VolterraProblem::new(k, 1.0).unwrap();
        let e = ml3_eval(&MLParams::one(0.5).unwrap(), -(2.0f64).sqrt(), DEFAULT_TOL).unwrap();
        assert_relative_eq!(solve_integral_rep(&p, 2.0).unwrap(), e, max_relative = 1e-7);
    }

    #[test]
    fn eq1_matches_closed_form() {
        let p = cc(0.75, 3.0, 1.25);
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let (c, rep) = solve_integral_eq1_with(&p, &grid, &Eq1Options::default()).unwrap();
        assert!(rep.change <= 1e-4);
        for (t, v) in c.t_grid.iter().zip(&c.values) {
            assert!((v - solve_closed_cc(&p, *t).unwrap()).abs() < 1e-4, "t = {t}");
        }
    }

    #[test]
    fn eq1_off_mesh_points() {
        let k = PrabhakarKernel::new(1.0, 1.0, 0.6, 0.0).unwrap();
        let p = VolterraProblem::new(k, 1.0).unwrap();
        let grid = [0.013f64, 0.4, 1.7, 3.1];
        let c = solve_integral_eq1(&p, &grid).unwrap();
        for (t, v) in grid.iter().zip(&c.values) {
            let e = ml3_eval(&MLParams::one(0.6).unwrap(), -t.powf(0.6), DEFAULT_TOL).unwrap();
            assert!((v - e).abs() < 1e-4, "t = {t}: {v} vs {e}");
        }
    }

    #[test]
    fn eq1_decoupled() {
        let p = VolterraProblem::new(PrabhakarKernel::cole_cole(0.5, 1.0).unwrap(), 0.0).unwrap();
        let c = solve_integral_eq1(&p, &[0.0, 1.0, 2.0]).unwrap();
        assert!(c.values.iter().all(|v| *v == 1.0));
    }

    #[test]
    fn fractional_operators_on_powers() {
        let (alpha, t) = (0.4, 1.7);
        let c = caputo_derivative(|_| 1.0, alpha, t).unwrap();
        assert_relative_eq!(c, t.powf(1.0 - alpha) * rgamma(2.0 - alpha), max_relative = 1e-10);
        assert_eq!(caputo_derivative(|_| 0.0, alpha, t).unwrap(), 0.0);
        let r = rl_fractional_integral(|_| 1.0, 0.3, t).unwrap();
        assert_relative_eq!(r, t.powf(0.3) * rgamma(1.3), max_relative = 1e-10);
        let r = rl_fractional_integral(|x| x, 0.3, t).unwrap();
        assert_relative_eq!(r, t.powf(1.3) * rgamma(2.3), max_relative = 1e-10);
    }

    #[test]
    fn residuals_vanish() {
        let p = cc(0.75, 3.0, 1.25);
        for t in [0.2, 1.0, 4.0] {
            assert!(cole_cole_residual(&p, t).unwrap().abs() < 1e-6);
        }
        let k = PrabhakarKernel::new(0.7, 0.6, 0.5, 1.0).unwrap();
        let q = VolterraProblem::new(k, 1.0).unwrap();
        for t in [0.5, 2.0] {
            assert!(memory_equation_residual(&q, t).unwrap().abs() < 1e-5);
        }
    }
}
