//! One-, two- and three-parameter Mittag-Leffler functions, the Prabhakar
//! function, Mittag-Leffler polynomials and their hypergeometric forms.
//!
//! `ml3` is the plain power series with the cancellation guard. `ml3_eval`
//! is the evaluator the solvers use: it takes the series when it is
//! well-conditioned and otherwise switches, for real negative arguments, to
//! the algebraic large-argument expansion or to Talbot inversion of the
//! Laplace image s^{αν-μ}(s^α - x)^{-ν}.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laplace::talbot;
use crate::series::{SeriesSum, SeriesValue, DEFAULT_TOL, MAX_TERMS};
use crate::special::{binomial, ln_gamma_signed, pfq, pochhammer, rgamma};

/// Refuse the direct series when max|term| · terms exceeds this multiple of |sum|.
pub const CANCELLATION_LIMIT: f64 = 1e15;
/// `ml3_eval` prefers other routes once the series loses more digits than this.
const MODERATE_CANCELLATION: f64 = 1e8;
const WELL_CONDITIONED: f64 = 1e4;
/// Largest continued-fraction denominator accepted for rational α.
pub const RATIONAL_CAP: u32 = 12;

const RESCALE: f64 = 1e150;

/// Parameters (α, μ, ν) of E^ν_{α,μ}(x). Polynomial forms write μ = 1 + d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub mu: f64,
    pub nu: f64,
}

impl MLParams {
    pub fn new(alpha: f64, mu: f64, nu: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha = {alpha} must be finite and > 0")));
        }
        if !mu.is_finite() || !nu.is_finite() {
            return Err(Error::invalid("mu and nu must be finite"));
        }
        Ok(MLParams { alpha, mu, nu })
    }

    /// Standard one-parameter function E_α.
    pub fn one(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0, 1.0)
    }

    /// Two-parameter (Wiman) function E_{α,β}.
    pub fn two(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0)
    }

    /// d in μ = 1 + d.
    pub fn d(&self) -> f64 {
        self.mu - 1.0
    }

    /// Some(n) when ν = -n for an integer n >= 0.
    pub fn polynomial_degree(&self) -> Option<u32> {
        if self.nu <= 0.0 && self.nu == self.nu.round() && self.nu > -(u32::MAX as f64) {
            Some((-self.nu) as u32)
        } else {
            None
        }
    }

    fn with_mu(&self, mu: f64) -> Self {
        MLParams { mu, ..*self }
    }
}

/// α = l/k in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalAlpha {
    pub l: u32,
    pub k: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl RationalAlpha {
    pub fn new(l: u32, k: u32) -> Result<Self> {
        if l == 0 || k == 0 {
            return Err(Error::invalid("l and k must be positive"));
        }
        if gcd(l, k) != 1 {
            return Err(Error::invalid(format!("{l}/{k} is not in lowest terms")));
        }
        Ok(RationalAlpha { l, k })
    }

    /// Continued-fraction convergent of `alpha` with denominator at most `cap`.
    pub fn from_alpha(alpha: f64, cap: u32) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha = {alpha} must be > 0")));
        }
        let (mut h0, mut h1) = (0u64, 1u64);
        let (mut k0, mut k1) = (1u64, 0u64);
        let mut x = alpha;
        for _ in 0..64 {
            let a = x.floor();
            let h2 = a as u64 * h1 + h0;
            let k2 = a as u64 * k1 + k0;
            if k2 > cap as u64 {
                return Err(Error::DenominatorTooLarge {
                    k: k2.min(u32::MAX as u64) as u32,
                    cap,
                });
            }
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            let approx = h1 as f64 / k1 as f64;
            if (approx - alpha).abs() <= 1e-12 * alpha {
                return RationalAlpha::new(h1 as u32, k1 as u32);
            }
            let frac = x - a;
            if frac == 0.0 {
                break;
            }
            x = 1.0 / frac;
        }
        Err(Error::DenominatorTooLarge { k: cap + 1, cap })
    }

    pub fn value(&self) -> f64 {
        self.l as f64 / self.k as f64
    }
}

/// Δ(n, a) = a/n, (a+1)/n, ..., (a+n-1)/n.
fn delta(n: u32, a: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| (a + i as f64) / n as f64)
}

/// Σ_r c_r x^r / Γ(α r + μ) where c_{r+1} = c_r · ratio(r), c_0 = 1.
///
/// Coefficients are carried with a separate log scale so that neither x^r
/// nor Γ(αr + μ) overflows on its own.
fn gamma_series<R: Fn(f64) -> f64>(
    alpha: f64,
    mu: f64,
    x: Complex64,
    ratio: R,
    tol: f64,
    op: &'static str,
) -> Result<SeriesValue> {
    let mut acc = SeriesSum::new(tol);
    let mut w = Complex64::new(1.0, 0.0);
    let mut scale = 0.0f64;
    for r in 0..MAX_TERMS {
        let rf = r as f64;
        let z = alpha * rf + mu;
        let term = if scale == 0.0 && z < 170.0 {
            w * rgamma(z)
        } else {
            let (lg, sg) = ln_gamma_signed(z);
            if sg == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                w * (sg * (scale - lg).exp())
            }
        };
        if !term.re.is_finite() || !term.im.is_finite() {
            return Err(Error::NonConvergent {
                op,
                terms: r,
                reason: format!("term {r} exceeds the double range; use ml_hypergeom or Laplace inversion"),
            });
        }
        if acc.push(term) {
            return Ok(acc.finish());
        }
        w *= x * ratio(rf);
        if w.norm() == 0.0 {
            return Ok(acc.finish());
        }
        if w.norm() > RESCALE {
            w /= RESCALE;
            scale += RESCALE.ln();
        }
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::NumericalOverflow(op));
        }
    }
    Err(acc.non_convergent(op))
}

fn series_raw(p: &MLParams, x: Complex64, tol: f64) -> Result<SeriesValue> {
    let nu = p.nu;
    gamma_series(p.alpha, p.mu, x, |r| (nu + r) / (r + 1.0), tol, "ml3")
}

// Rounding in the coefficient recurrence grows roughly with the term count,
// so the lost digits are judged on cancellation × terms.
fn guard(v: SeriesValue, op: &'static str) -> Result<SeriesValue> {
    if v.cancellation() * v.terms as f64 > CANCELLATION_LIMIT {
        return Err(Error::NonConvergent {
            op,
            terms: v.terms,
            reason: format!(
                "max |term| {:.3e} exceeds {:.0e} x |sum| {:.3e}; use ml_hypergeom or Laplace inversion",
                v.max_term,
                CANCELLATION_LIMIT,
                v.value.norm()
            ),
        });
    }
    Ok(v)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol} must be > 0")));
    }
    Ok(())
}

/// E^ν_{α,μ}(x) = Σ_r (ν)_r x^r / (r! Γ(αr + μ)) by direct summation.
///
/// ν = -n is dispatched to [`ml_poly`]. Fails with `NonConvergent` when the
/// largest term times the term count exceeds [`CANCELLATION_LIMIT`] times the result.
pub fn ml3(params: &MLParams, x: f64, tol: f64) -> Result<f64> {
    Ok(ml3_complex(params, Complex64::new(x, 0.0), tol)?.re)
}

/// Complex-argument version of [`ml3`].
pub fn ml3_complex(params: &MLParams, x: Complex64, tol: f64) -> Result<Complex64> {
    check_tol(tol)?;
    if let Some(n) = params.polynomial_degree() {
        return Ok(ml_poly_complex(params.alpha, params.d(), n, x));
    }
    if x.norm() == 0.0 {
        return Ok(Complex64::new(rgamma(params.mu), 0.0));
    }
    Ok(guard(series_raw(params, x, tol)?, "ml3")?.value)
}

/// Two-parameter function E_{α,β}(x) = Σ x^r / Γ(αr + β), series only.
pub fn ml2(alpha: f64, beta: f64, x: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    MLParams::two(alpha, beta)?;
    if x == 0.0 {
        return Ok(rgamma(beta));
    }
    let v = gamma_series(alpha, beta, Complex64::new(x, 0.0), |_| 1.0, tol, "ml2")?;
    Ok(guard(v, "ml2")?.value.re)
}

/// One-parameter function E_α(x), series only.
pub fn ml1(alpha: f64, x: f64, tol: f64) -> Result<f64> {
    ml2(alpha, 1.0, x, tol)
}

/// Large-argument expansion of E^ν_{α,μ}(-X), X > 0, 0 < α < 1:
/// Σ_k (ν)_k (-1)^k X^{-ν-k} / (k! Γ(μ - α(ν+k))), summed up to the
/// smallest term. Returns None unless the truncation estimate is below
/// `tol` relative.
fn asymptotic_negative(p: &MLParams, big_x: f64, tol: f64) -> Option<f64> {
    if !(p.alpha > 0.0 && p.alpha < 1.0) || !(big_x > 0.0) {
        return None;
    }
    let lx = big_x.ln();
    let mut c = 1.0f64;
    let mut sum = 0.0f64;
    let mut last = f64::INFINITY;
    let mut max_term = 0.0f64;
    let mut small_run = 0;
    let accept = |sum: f64, max_term: f64| (max_term <= WELL_CONDITIONED * sum.abs()).then_some(sum);
    for k in 0..400 {
        let kf = k as f64;
        let g = p.nu + kf;
        let arg = p.mu - p.alpha * g;
        // rounding can land next to a Γ pole; those terms vanish exactly
        let at_pole = arg <= 0.5 && (arg - arg.round()).abs() < 1e-12 * arg.abs().max(1.0);
        let rg = if at_pole { 0.0 } else { rgamma(arg) };
        if rg != 0.0 && c != 0.0 {
            let term = c * rg * (-g * lx).exp();
            if !term.is_finite() {
                return None;
            }
            if term.abs() > last {
                return None;
            }
            sum += term;
            last = term.abs();
            max_term = max_term.max(last);
            if term.abs() <= tol * sum.abs() {
                small_run += 1;
                if small_run >= 2 {
                    return accept(sum, max_term);
                }
            } else {
                small_run = 0;
            }
        }
        c *= -g / (kf + 1.0);
        if c == 0.0 {
            // ν a non-positive integer: the expansion terminates exactly
            return accept(sum, max_term);
        }
    }
    None
}

/// E^ν_{α,μ}(x) via Talbot inversion of s^{αν-μ}(s^α - x)^{-ν} at t = 1.
/// Accepted when 24 and 32 contour nodes agree to `max_diff`, which also
/// serves as the error estimate.
fn inverted(p: &MLParams, x: f64, max_diff: f64) -> Option<(f64, f64)> {
    if !(p.mu > 0.0) {
        return None;
    }
    let MLParams { alpha, mu, nu } = *p;
    let shift = if x > 0.0 { x.powf(1.0 / alpha) } else { 0.0 };
    let image = |s: Complex64| {
        let ln_s = s.ln();
        ((alpha * nu - mu) * ln_s - nu * ((alpha * ln_s).exp() - x).ln()).exp()
    };
    let coarse = talbot(image, 1.0, 24, shift);
    let fine = talbot(image, 1.0, crate::laplace::DEFAULT_TALBOT_NODES, shift);
    let diff = (fine - coarse).abs() / fine.abs();
    (fine.is_finite() && diff <= max_diff).then_some((fine, diff.max(5e-13)))
}

/// Best-available evaluation of E^ν_{α,μ}(x) for real x.
///
/// Uses the series when it loses at most four digits. Otherwise, for x < 0,
/// the large-argument expansion if it does not cancel either; then Laplace
/// inversion checked against a coarser contour to 1e-9, the series if it
/// loses at most eight digits, inversion checked to 1e-6 and finally the
/// guarded series.
pub fn ml3_eval(params: &MLParams, x: f64, tol: f64) -> Result<f64> {
    ml3_eval_err(params, x, tol).map(|(v, _)| v)
}

/// `ml3_eval` together with an estimate of its relative error.
pub fn ml3_eval_err(params: &MLParams, x: f64, tol: f64) -> Result<(f64, f64)> {
    check_tol(tol)?;
    if let Some(n) = params.polynomial_degree() {
        let d = params.d();
        let mut pow = 1.0f64;
        let mut abs = 0.0;
        for r in 0..=n {
            abs += (binomial(n, r) * rgamma(params.alpha * r as f64 + 1.0 + d) * pow).abs();
            pow *= -x;
        }
        let v = ml_poly(params.alpha, d, n, x);
        return Ok((v, rounding(abs, v, n as usize + 1)));
    }
    if x == 0.0 {
        return Ok((rgamma(params.mu), f64::EPSILON));
    }
    if params.alpha == 1.0 && params.mu == 1.0 && params.nu == 1.0 {
        return Ok((x.exp(), f64::EPSILON));
    }
    let series = series_raw(params, Complex64::new(x, 0.0), tol);
    let from_series = |v: &SeriesValue| (v.value.re, tol.max(rounding(v.max_term, v.value.re, v.terms)));
    if let Ok(v) = &series {
        if v.cancellation() <= WELL_CONDITIONED {
            return Ok(from_series(v));
        }
    }
    if x < 0.0 {
        if let Some(v) = asymptotic_negative(params, -x, tol.max(1e-15)) {
            return Ok((v, tol.max(1e-15) * 10.0));
        }
    }
    if let Some(v) = inverted(params, x, 1e-9) {
        return Ok(v);
    }
    if let Ok(v) = &series {
        if v.cancellation() <= MODERATE_CANCELLATION {
            return Ok(from_series(v));
        }
    }
    if let Some(v) = inverted(params, x, 1e-6) {
        return Ok(v);
    }
    Ok(from_series(&guard(series?, "ml3")?))
}

/// Relative rounding error of a sum of `terms` terms whose largest is `max_term`.
fn rounding(max_term: f64, value: f64, terms: usize) -> f64 {
    if value == 0.0 {
        return if max_term == 0.0 { 0.0 } else { f64::INFINITY };
    }
    f64::EPSILON * (terms as f64).sqrt() * (max_term / value.abs()).max(1.0)
}

/// Mittag-Leffler polynomial E^{-n}_{α,1+d}(x) = Σ_{r≤n} C(n,r)(-x)^r / Γ(αr+1+d).
pub fn ml_poly(alpha: f64, d: f64, n: u32, x: f64) -> f64 {
    ml_poly_complex(alpha, d, n, Complex64::new(x, 0.0)).re
}

pub fn ml_poly_complex(alpha: f64, d: f64, n: u32, x: Complex64) -> Complex64 {
    let mut pow = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for r in 0..=n {
        sum += pow * (binomial(n, r) * rgamma(alpha * r as f64 + 1.0 + d));
        pow *= -x;
    }
    sum
}

/// d/dx E^{-n}_{α,1+d}(x^α) = -nα x^{α-1} E^{1-n}_{α,1+d+α}(x^α), x > 0.
pub fn ml_poly_derivative(alpha: f64, d: f64, n: u32, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    -(n as f64) * alpha * x.powf(alpha - 1.0) * ml_poly(alpha, d + alpha, n - 1, x.powf(alpha))
}

/// E^ν_{l/k,1+d}(x) as the finite sum of 1+k F l+k hypergeometric series.
///
/// For ν = -n the sum stops at j = min(n, k-1). A group whose leading
/// 1/Γ(1+d+lj/k) vanishes is re-indexed to its first non-vanishing term.
pub fn ml_hypergeom(alpha: RationalAlpha, d: f64, nu: f64, x: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let RationalAlpha { l, k } = alpha;
    if k > RATIONAL_CAP {
        return Err(Error::DenominatorTooLarge { k, cap: RATIONAL_CAP });
    }
    if l > k {
        return Err(Error::invalid(format!("alpha = {l}/{k} must lie in (0, 1]")));
    }
    let a = alpha.value();
    let (lf, kf) = (l as f64, k as f64);
    let z = Complex64::new(x.powi(k as i32) / lf.powi(l as i32), 0.0);
    let j_max = match MLParams::new(a, 1.0 + d, nu)?.polynomial_degree() {
        Some(n) => n.min(k - 1),
        None => k - 1,
    };
    let mut total = 0.0;
    for j0 in 0..=j_max {
        // first offset j = j0 + k m0 with 1 + d + a j outside the Γ poles
        let mut j = j0;
        while rgamma(1.0 + d + a * j as f64) == 0.0 {
            j += k;
            if j > j0 + 64 * k {
                return Err(Error::invalid("cannot re-index hypergeometric group"));
            }
        }
        let jf = j as f64;
        let b = 1.0 + d + lf * jf / kf;
        let lead = x.powi(j as i32) * pochhammer(nu, j as usize) * rgamma(jf + 1.0) * rgamma(b);
        if lead == 0.0 {
            continue;
        }
        let upper: Vec<f64> = std::iter::once(1.0).chain(delta(k, nu + jf)).collect();
        let lower: Vec<f64> = delta(k, 1.0 + jf).chain(delta(l, b)).collect();
        let f = pfq(&upper, &lower, z, tol)?;
        if f.cancellation() * f.terms as f64 > CANCELLATION_LIMIT {
            return Err(Error::NonConvergent {
                op: "ml_hypergeom",
                terms: f.terms,
                reason: "inner hypergeometric series cancels".into(),
            });
        }
        total += lead * f.value.re;
    }
    Ok(total)
}

/// Prabhakar function e^ν_{α,μ}(a, t) = t^{μ-1} E^ν_{α,μ}(a t^α).
pub fn prabhakar(params: &MLParams, a: f64, t: f64) -> Result<f64> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::invalid(format!("prabhakar needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        return if params.mu > 1.0 {
            Ok(0.0)
        } else if params.mu == 1.0 {
            Ok(1.0)
        } else {
            Err(Error::invalid("prabhakar is singular at t = 0 for mu < 1"))
        };
    }
    let e = ml3_eval(params, a * t.powf(params.alpha), DEFAULT_TOL)?;
    Ok(t.powf(params.mu - 1.0) * e)
}

/// n-th time derivative of the Prabhakar function through the parameter
/// shift μ → μ - n.
pub fn prabhakar_derivative(params: &MLParams, a: f64, t: f64, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("derivative order must be >= 1"));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("derivative needs t > 0, got {t}")));
    }
    prabhakar(&params.with_mu(params.mu - n as f64), a, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticBranch {
    /// A^{1/α} t ≪ 1
    Small,
    /// A^{1/α} t ≫ 1
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue {
    pub value: f64,
    pub branch: AsymptoticBranch,
    /// A^{1/α} t
    pub regime: f64,
}

/// Two-branch approximation of E_α(-A t^α), branch chosen by A^{1/α} t.
pub fn ml_asymptotic(alpha: f64, big_a: f64, t: f64) -> Result<AsymptoticValue> {
    if !(big_a > 0.0) || !(t >= 0.0) {
        return Err(Error::invalid("ml_asymptotic needs A > 0 and t >= 0"));
    }
    let regime = big_a.powf(1.0 / alpha) * t;
    let branch = if regime <= 1.0 {
        AsymptoticBranch::Small
    } else {
        AsymptoticBranch::Large
    };
    ml_asymptotic_branch(alpha, big_a, t, branch)
}

pub fn ml_asymptotic_branch(alpha: f64, big_a: f64, t: f64, branch: AsymptoticBranch) -> Result<AsymptoticValue> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1)")));
    }
    let at = big_a * t.powf(alpha);
    let value = match branch {
        AsymptoticBranch::Small => 1.0 - at * rgamma(1.0 + alpha),
        AsymptoticBranch::Large => rgamma(1.0 - alpha) / at,
    };
    Ok(AsymptoticValue {
        value,
        branch,
        regime: big_a.powf(1.0 / alpha) * t,
    })
}

/// E_{-α,0}(x) = -E_{α,0}(1/x).
pub fn ml_reflection(alpha: f64, x: f64) -> Result<f64> {
    Ok(ml_reflection_forms(alpha, x)?.0)
}

/// Both right-hand sides -E_{α,0}(1/x) and -x^{-1} E_{α,α}(1/x).
pub fn ml_reflection_forms(alpha: f64, x: f64) -> Result<(f64, f64)> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::invalid("reflection needs finite x != 0"));
    }
    let y = 1.0 / x;
    let first = -ml3_eval(&MLParams::two(alpha, 0.0)?, y, DEFAULT_TOL)?;
    let second = -y * ml3_eval(&MLParams::two(alpha, alpha)?, y, DEFAULT_TOL)?;
    Ok((first, second))
}

/// Closed forms used as references: E_{1/2}(x) = e^{x²} erfc(-x).
pub fn ml_half(x: f64) -> f64 {
    if x < -25.0 {
        // e^{y²} erfc(y) ~ (1/(y√π)) Σ (-1)^n (2n-1)!! / (2y²)^n
        let y = -x;
        let v = 0.5 / (y * y);
        let (mut term, mut sum) = (1.0, 1.0);
        for n in 1..12 {
            term *= -((2 * n - 1) as f64) * v;
            sum += term;
        }
        sum / (y * std::f64::consts::PI.sqrt())
    } else if x < 0.0 {
        let y = -x;
        (y * y).exp() * crate::special::erfc(y)
    } else {
        (x * x).exp() * (1.0 + crate::special::erf(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    const TOL: f64 = DEFAULT_TOL;

    #[test]
    fn exponential_cases() {
        let p = MLParams::new(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(ml3(&p, 1.0, TOL).unwrap(), E, max_relative = 1e-14);
        let p = MLParams::new(1.0, 2.0, 1.0).unwrap();
        assert_relative_eq!(ml3(&p, 1.0, TOL).unwrap(), E - 1.0, max_relative = 1e-14);
    }

    #[test]
    fn value_at_zero() {
        for &(a, m, n) in &[(0.3, 0.7, 2.5), (1.5, 3.2, -0.4), (0.8, 0.5, 1.0)] {
            let p = MLParams::new(a, m, n).unwrap();
            assert_eq!(ml3(&p, 0.0, TOL).unwrap(), rgamma(m));
        }
    }

    #[test]
    fn invalid_inputs() {
        assert!(MLParams::new(0.0, 1.0, 1.0).is_err());
        assert!(MLParams::new(-0.5, 1.0, 1.0).is_err());
        let p = MLParams::one(0.5).unwrap();
        assert!(ml3(&p, 1.0, 0.0).is_err());
    }

    #[test]
    fn large_negative_argument_refused() {
        let p = MLParams::one(0.5).unwrap();
        let r = ml3(&p, -15.0, TOL);
        assert!(matches!(r, Err(Error::NonConvergent { .. })), "{r:?}");
        // the robust evaluator still gets it
        assert_relative_eq!(ml3_eval(&p, -15.0, TOL).unwrap(), ml_half(-15.0), max_relative = 1e-12);
    }

    #[test]
    fn half_order_closed_form() {
        let p = MLParams::one(0.5).unwrap();
        for x in [-3.0, -1.0, -0.2, 0.4, 1.5, 3.0] {
            assert_relative_eq!(ml3(&p, x, TOL).unwrap(), ml_half(x), max_relative = 1e-12);
        }
        for x in [-6.0, -20.0, -150.0] {
            assert_relative_eq!(ml3_eval(&p, x, TOL).unwrap(), ml_half(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn polynomial_dispatch_and_values() {
        let p = MLParams::new(1.0, 1.0, -1.0).unwrap();
        assert_relative_eq!(ml3(&p, 0.3, TOL).unwrap(), 0.7, max_relative = 1e-15);
        assert_relative_eq!(ml_poly(0.7, 0.4, 0, 2.0), rgamma(1.4), max_relative = 1e-15);
        assert_relative_eq!(ml_poly(1.0, 0.0, 1, 0.25), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn rational_alpha_convergents() {
        assert_eq!(
            RationalAlpha::from_alpha(0.75, 12).unwrap(),
            RationalAlpha { l: 3, k: 4 }
        );
        assert_eq!(
            RationalAlpha::from_alpha(1.0 / 3.0, 12).unwrap(),
            RationalAlpha { l: 1, k: 3 }
        );
        assert!(matches!(
            RationalAlpha::from_alpha(std::f64::consts::FRAC_1_SQRT_2, 12),
            Err(Error::DenominatorTooLarge { .. })
        ));
        assert!(RationalAlpha::new(2, 4).is_err());
    }

    #[test]
    fn hypergeometric_items() {
        let half = RationalAlpha::new(1, 2).unwrap();
        let one = RationalAlpha::new(1, 1).unwrap();
        for x in [-1.3, 0.2, 0.9] {
            assert_relative_eq!(
                ml_hypergeom(half, 0.0, 1.0, x, TOL).unwrap(),
                ml_half(x),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                ml_hypergeom(one, -1.0, 1.0, x, TOL).unwrap(),
                x * x.exp(),
                max_relative = 1e-12
            );
            let e_half0 = x / PI.sqrt() + x * x * ml_half(x);
            assert_relative_eq!(
                ml_hypergeom(half, -1.0, 1.0, x, TOL).unwrap(),
                e_half0,
                max_relative = 1e-12
            );
        }
        let cap = RationalAlpha::new(1, 13).unwrap();
        assert!(matches!(
            ml_hypergeom(cap, 0.0, 1.0, 0.5, TOL),
            Err(Error::DenominatorTooLarge { .. })
        ));
    }

    #[test]
    fn prabhakar_basic() {
        let p = MLParams::one(1.0).unwrap();
        for t in [0.1, 1.0, 4.0] {
            assert_relative_eq!(prabhakar(&p, -1.0, t).unwrap(), (-t).exp(), max_relative = 1e-12);
        }
        let p = MLParams::new(0.4, 1.0, 0.7).unwrap();
        assert_eq!(prabhakar(&p, -2.0, 0.0).unwrap(), 1.0);
        assert!(prabhakar(&MLParams::new(0.4, 0.5, 0.7).unwrap(), -2.0, 0.0).is_err());
    }

    #[test]
    fn derivative_shift_exponential() {
        // d/dt [t E_{1,2}(t)] = e^t
        let p = MLParams::new(1.0, 2.0, 1.0).unwrap();
        for t in [0.3, 1.0, 2.0] {
            assert_relative_eq!(
                prabhakar_derivative(&p, 1.0, t, 1).unwrap(),
                t.exp(),
                max_relative = 1e-13
            );
        }
        assert!(prabhakar_derivative(&p, 1.0, 1.0, 0).is_err());
    }

    #[test]
    fn asymptotic_branches() {
        let v = ml_asymptotic(0.5, 1.0, 100.0).unwrap();
        assert_eq!(v.branch, AsymptoticBranch::Large);
        assert_relative_eq!(v.value, 1.0 / (10.0 * PI.sqrt()), max_relative = 1e-14);
        let v = ml_asymptotic(0.5, 1.0, 1e-12).unwrap();
        assert_eq!(v.branch, AsymptoticBranch::Small);
        assert_relative_eq!(v.value, 1.0, max_relative = 1e-5);
    }

    #[test]
    fn reflection_first_power() {
        let (a, b) = ml_reflection_forms(1.0, 2.0).unwrap();
        assert_relative_eq!(a, -0.5 * 0.5f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(b, a, max_relative = 1e-14);
        assert!(ml_reflection(1.0, 0.0).is_err());
    }
}
