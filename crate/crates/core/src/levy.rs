//! One-sided Lévy stable densities and the h/g functions built on them.
//!
//! h_{α,λ}(u, t) is the inverse Laplace transform of s^{-λ} e^{-u s^α}.
//! It scales as h_{α,λ}(u, t) = u^{(λ-1)/α} H(z) with z = t u^{-1/α}, so
//! every route below works on H(z) = h_{α,λ}(1, z).

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mlfun::{RationalAlpha, RATIONAL_CAP};
use crate::quad::{integrate, integrate_power_origin, integrate_to_infinity, QuadOptions};
use crate::series::{SeriesSum, SeriesValue, DEFAULT_TOL, MAX_TERMS};
use crate::special::{ln_gamma_signed, pfq, rgamma};

/// The series routes are refused once max|term| exceeds this multiple of |sum|.
pub const SERIES_CANCELLATION_LIMIT: f64 = 1e12;
/// Long sums also accumulate rounding per term; max|term| · terms is capped here.
const SERIES_ROUNDING_LIMIT: f64 = 1e15;

fn cancels(v: &SeriesValue) -> bool {
    let c = v.cancellation();
    c > SERIES_CANCELLATION_LIMIT || c * v.terms as f64 > SERIES_ROUNDING_LIMIT
}
const WELL_CONDITIONED: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyQuery {
    pub alpha: f64,
    pub u: f64,
    pub t: f64,
    pub lambda: f64,
}

impl LevyQuery {
    pub fn new(alpha: f64, u: f64, t: f64, lambda: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1]")));
        }
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::invalid(format!("u = {u} must be > 0")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("t = {t} must be > 0")));
        }
        if !lambda.is_finite() {
            return Err(Error::invalid("lambda must be finite"));
        }
        Ok(LevyQuery { alpha, u, t, lambda })
    }

    /// Scaled time z = t u^{-1/α}.
    pub fn z(&self) -> f64 {
        self.t * self.u.powf(-1.0 / self.alpha)
    }

    fn prefactor(&self) -> f64 {
        self.u.powf((self.lambda - 1.0) / self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HRoute {
    Series,
    Hypergeometric,
    Inversion,
}

impl FromStr for HRoute {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(HRoute::Series),
            "hypergeometric" => Ok(HRoute::Hypergeometric),
            "inversion" => Ok(HRoute::Inversion),
            other => Err(Error::invalid(format!("unknown route {other}"))),
        }
    }
}

impl fmt::Display for HRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HRoute::Series => "series",
            HRoute::Hypergeometric => "hypergeometric",
            HRoute::Inversion => "inversion",
        })
    }
}

/// α = 1: h is the shifted power (t-u)_+^{λ-1}/Γ(λ). λ = 1 is the unit step
/// with value 1/2 at t = u.
fn shifted_power(q: &LevyQuery) -> Result<f64> {
    let d = q.t - q.u;
    if q.lambda == 1.0 {
        return Ok(if d > 0.0 {
            1.0
        } else if d < 0.0 {
            0.0
        } else {
            0.5
        });
    }
    if d < 0.0 {
        return Ok(0.0);
    }
    if d == 0.0 {
        return if q.lambda > 1.0 {
            Ok(0.0)
        } else {
            Err(Error::RouteUnavailable(format!(
                "h_1,{} is singular at t = u",
                q.lambda
            )))
        };
    }
    Ok(d.powf(q.lambda - 1.0) * rgamma(q.lambda))
}

fn series_h(alpha: f64, lambda: f64, z: f64, tol: f64) -> Result<SeriesValue> {
    let lz = z.ln();
    let mut acc = SeriesSum::new(tol);
    for r in 0..MAX_TERMS {
        let rf = r as f64;
        let (lg, sg) = ln_gamma_signed(lambda - alpha * rf);
        let term = if sg == 0.0 {
            0.0
        } else {
            let parity = if r % 2 == 0 { 1.0 } else { -1.0 };
            let mag = ((lambda - 1.0 - alpha * rf) * lz - ln_gamma_signed(rf + 1.0).0 - lg).exp();
            parity * sg * mag
        };
        if !term.is_finite() {
            return Err(Error::NumericalOverflow("h_function"));
        }
        if acc.push(Complex64::new(term, 0.0)) {
            let v = acc.finish();
            if cancels(&v) {
                return Err(Error::NonConvergent {
                    op: "h_function",
                    terms: v.terms,
                    reason: format!(
                        "max |term| / |sum| = {:.3e} at z = {z}; use the inversion route",
                        v.cancellation()
                    ),
                });
            }
            return Ok(v);
        }
    }
    Err(acc.non_convergent("h_function"))
}

/// Series grouped by r = k m + j into lF_{k-1} series in
/// w = (-1)^{k+l} l^l z^{-l} / k^k.
fn hypergeometric_h(alpha: RationalAlpha, lambda: f64, z: f64, tol: f64) -> Result<f64> {
    let RationalAlpha { l, k } = alpha;
    let (lf, kf) = (l as f64, k as f64);
    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
    let w = Complex64::new(sign * lf.powf(lf) * z.powf(-lf) / kf.powf(kf), 0.0);
    let mut total = 0.0;
    for j in 0..k {
        let jf = j as f64;
        let c = lambda - lf * jf / kf;
        let rg = rgamma(c);
        if rg == 0.0 {
            // every 1/Γ(c - l m) vanishes
            continue;
        }
        let parity = if j % 2 == 0 { 1.0 } else { -1.0 };
        let lead = parity * z.powf(lambda - 1.0 - lf * jf / kf) * rgamma(jf + 1.0) * rg;
        let upper: Vec<f64> = (1..=l).map(|i| (i as f64 - c) / lf).collect();
        let lower: Vec<f64> = (1..=k).filter(|&i| i != k - j).map(|i| (jf + i as f64) / kf).collect();
        let f = pfq(&upper, &lower, w, tol)?;
        if cancels(&f) {
            return Err(Error::NonConvergent {
                op: "h_function",
                terms: f.terms,
                reason: format!("grouped series cancels at z = {z}"),
            });
        }
        total += lead * f.value.re;
    }
    Ok(total)
}

/// Bromwich integral of s^{-λ} e^{zs - s^α} on a contour that keeps both
/// exponentials decaying: the arc |s| = ρ through the real saddle point
/// ρ = (α/z)^{1/(1-α)}, then rays at arg s = ±φ with π/2 < φ < π/(2α).
/// Talbot's contour reaches arg s near π, where e^{-s^α} grows once α > 1/2.
fn inverted_h(alpha: f64, lambda: f64, z: f64) -> Result<f64> {
    let rho = (alpha / z).powf(1.0 / (1.0 - alpha));
    let phi = 0.5 * (FRAC_PI_2 + PI.min(FRAC_PI_2 / alpha));
    let ln_rho = rho.ln();
    // exponent at the saddle, factored out so that neither piece overflows
    let peak = z * rho - (alpha * ln_rho).exp() - lambda * ln_rho;
    let g = |s: Complex64| {
        let ln_s = s.ln();
        (z * s - (alpha * ln_s).exp() - lambda * ln_s - peak).exp()
    };
    let opts = QuadOptions::new(1e-15, 1e-12, 600);
    let arc = integrate(
        |th: f64| {
            let e = Complex64::from_polar(1.0, th);
            (g(e * rho) * e).re
        },
        0.0,
        phi,
        &opts,
    )?;
    let dir = Complex64::from_polar(1.0, phi);
    // the rays decay on the longer of the two scales ρ and 1/z
    let len = rho.max(1.0 / z);
    let ray = integrate_to_infinity(|x: f64| (g(dir * (rho + len * x)) * dir).im, 0.0, &opts)?;
    let v = (arc.value * rho + ray.value * len) / PI;
    let out = v * peak.exp();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NumericalOverflow("h_function"))
    }
}

/// h_{α,λ}(u, t) by the requested route.
pub fn h_function(q: &LevyQuery, route: HRoute) -> Result<f64> {
    if q.alpha == 1.0 {
        return shifted_power(q);
    }
    let z = q.z();
    let h = match route {
        HRoute::Series => series_h(q.alpha, q.lambda, z, DEFAULT_TOL)?.value.re,
        HRoute::Hypergeometric => {
            let ra = RationalAlpha::from_alpha(q.alpha, RATIONAL_CAP)
                .map_err(|e| Error::RouteUnavailable(format!("hypergeometric route needs rational alpha: {e}")))?;
            hypergeometric_h(ra, q.lambda, z, DEFAULT_TOL)?
        }
        HRoute::Inversion => inverted_h(q.alpha, q.lambda, z)?,
    };
    Ok(q.prefactor() * h)
}

/// Series when it loses at most four digits, otherwise numerical inversion.
/// Below the z where H has decayed past e^{-40} the value is flushed to zero
/// (reported as the inversion route).
pub fn h_function_auto(q: &LevyQuery) -> Result<(f64, HRoute)> {
    if q.alpha == 1.0 {
        return Ok((shifted_power(q)?, HRoute::Series));
    }
    let z = q.z();
    if z < negligible_z(q.alpha) {
        return Ok((0.0, HRoute::Inversion));
    }
    match series_h(q.alpha, q.lambda, z, DEFAULT_TOL) {
        Ok(v) if v.cancellation() <= WELL_CONDITIONED => Ok((q.prefactor() * v.value.re, HRoute::Series)),
        Ok(_) | Err(Error::NonConvergent { .. }) | Err(Error::NumericalOverflow(_)) => {
            Ok((h_function(q, HRoute::Inversion)?, HRoute::Inversion))
        }
        Err(e) => Err(e),
    }
}

/// g^γ_{α,β}(u, t) = u^{γ-β/α} h_{α,β-αγ}(u, t).
pub fn g_function(alpha: f64, beta: f64, gamma: f64, u: f64, t: f64) -> Result<f64> {
    let q = LevyQuery::new(alpha, u, t, beta - alpha * gamma)?;
    Ok(u.powf(gamma - beta / alpha) * h_function_auto(&q)?.0)
}

/// One-sided stable density Φ̃_α(u, t) = h_{α,0}(u, t).
pub fn levy_density(alpha: f64, u: f64, t: f64) -> Result<f64> {
    if !(alpha < 1.0) {
        return Err(Error::invalid(format!("density needs alpha < 1, got {alpha}")));
    }
    Ok(h_function_auto(&LevyQuery::new(alpha, u, t, 0.0)?)?.0)
}

/// Its primitive Φ_α(u, t) = h_{α,1}(u, t).
pub fn levy_primitive(alpha: f64, u: f64, t: f64) -> Result<f64> {
    Ok(h_function_auto(&LevyQuery::new(alpha, u, t, 1.0)?)?.0)
}

/// ∫_0^∞ Φ̃_α(u, t) dt. The algebraic tail t^{-1-α} is flattened by
/// t = T w^{-1/α} beyond T = u^{1/α}.
pub fn levy_mass(alpha: f64, u: f64, opts: &QuadOptions) -> Result<f64> {
    let big_t = u.powf(1.0 / alpha);
    let head = integrate(
        |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                levy_density(alpha, u, t).unwrap_or(f64::NAN)
            }
        },
        0.0,
        big_t,
        opts,
    )?;
    let tail = integrate(
        |w: f64| {
            if w == 0.0 {
                // limit of the flattened integrand: -u/Γ(-α) T^{-α} / α
                return -u * rgamma(-alpha) * big_t.powf(-alpha) / alpha;
            }
            let t = big_t * w.powf(-1.0 / alpha);
            let jac = big_t / alpha * w.powf(-1.0 / alpha - 1.0);
            levy_density(alpha, u, t).unwrap_or(f64::NAN) * jac
        },
        0.0,
        1.0,
        opts,
    )?;
    Ok(head.value + tail.value)
}

/// Past this z the density has decayed below e^{-40}:
/// H(z) ~ exp(-(1-α) α^{α/(1-α)} z^{-α/(1-α)}) as z → 0.
fn negligible_z(alpha: f64) -> f64 {
    let c = (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha));
    (c / 40.0).powf((1.0 - alpha) / alpha)
}

/// E^γ_{α,β}(-a t^α) through its integral over the stable-law h function:
/// t^{1-β}/Γ(γ) ∫_0^∞ e^{-au} u^{γ-1} h_{α,β-αγ}(u, t) du.
pub fn ml_integral_rep(alpha: f64, beta: f64, gamma: f64, a: f64, t: f64) -> Result<f64> {
    check_rep(alpha, beta, gamma, a, t)?;
    let lambda = beta - alpha * gamma;
    rep_integral(alpha, gamma, a, t, |u| {
        h_function_auto(&LevyQuery::new(alpha, u, t, lambda)?).map(|v| v.0)
    })
    .map(|v| t.powf(1.0 - beta) * v)
}

/// The β = αγ case written with the stable density itself.
pub fn ml_integral_rep_levy(alpha: f64, gamma: f64, a: f64, t: f64) -> Result<f64> {
    check_rep(alpha, alpha * gamma, gamma, a, t)?;
    rep_integral(alpha, gamma, a, t, |u| levy_density(alpha, u, t)).map(|v| t.powf(1.0 - alpha * gamma) * v)
}

fn check_rep(alpha: f64, beta: f64, gamma: f64, a: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1)")));
    }
    if !(beta > 0.0) || !(gamma > 0.0) {
        return Err(Error::invalid("beta and gamma must be > 0"));
    }
    if !(a >= 0.0) || !(t > 0.0) {
        return Err(Error::invalid("need a >= 0 and t > 0"));
    }
    Ok(())
}

fn rep_integral<H: Fn(f64) -> Result<f64>>(alpha: f64, gamma: f64, a: f64, t: f64, h: H) -> Result<f64> {
    let opts = QuadOptions::new(1e-13, 1e-11, 400);
    let u_max = (t / negligible_z(alpha)).powf(alpha);
    let u_split = t.powf(alpha).min(u_max);
    let mut failure = None;
    let mut f = |u: f64| -> f64 {
        if u <= 0.0 || u >= u_max {
            return 0.0;
        }
        match h(u) {
            Ok(v) => (-a * u).exp() * u.powf(gamma - 1.0) * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let head = integrate_power_origin(&mut f, u_split, gamma, &opts)?;
    let body = integrate(&mut f, u_split, u_max, &opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((head.value + body.value) * rgamma(gamma))
}
