//! Gamma-family helpers shared by the series evaluators.
//!
//! `rgamma` is treated as an entire function: it returns exactly zero at the
//! poles of Γ, so series terms that hit a pole drop out without special cases.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::{SeriesSum, SeriesValue};

const GAMMA_MAX_ARG: f64 = 171.0;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// sin(πx) with exact argument reduction, zero at every integer.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        0.0
    } else if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.0 {
        (PI * (1.0 - r)).sin()
    } else if r <= 1.5 {
        -(PI * (r - 1.0)).sin()
    } else {
        -(PI * (2.0 - r)).sin()
    }
}

/// Γ(x) for real x; NaN at the poles.
pub fn gamma(x: f64) -> f64 {
    if x >= 0.5 {
        if x > 171.6 {
            f64::INFINITY
        } else {
            libm::tgamma(x)
        }
    } else if is_nonpositive_integer(x) {
        f64::NAN
    } else {
        PI / (sin_pi(x) * gamma(1.0 - x))
    }
}

/// ln|Γ(x)| together with the sign of Γ(x). The sign is 0 at the poles.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    if x >= 0.5 {
        (libm::lgamma_r(x).0, 1.0)
    } else if is_nonpositive_integer(x) {
        (f64::INFINITY, 0.0)
    } else {
        let s = sin_pi(x);
        (PI.ln() - s.abs().ln() - libm::lgamma_r(1.0 - x).0, s.signum())
    }
}

/// 1/Γ(x) as an entire function (zero at 0, -1, -2, ...).
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x >= 0.5 {
        if x < GAMMA_MAX_ARG {
            1.0 / libm::tgamma(x)
        } else {
            (-libm::lgamma_r(x).0).exp()
        }
    } else if 1.0 - x < GAMMA_MAX_ARG {
        sin_pi(x) * libm::tgamma(1.0 - x) / PI
    } else {
        let s = sin_pi(x);
        s.signum() * (s.abs().ln() + libm::lgamma_r(1.0 - x).0 - PI.ln()).exp()
    }
}

/// Rising factorial (a)_n = a (a+1) ... (a+n-1).
pub fn pochhammer(a: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if is_nonpositive_integer(a) && (n as f64) > -a {
        return 0.0;
    }
    if n <= 256 {
        return (0..n).fold(1.0, |acc, j| acc * (a + j as f64));
    }
    let (lb, sb) = ln_gamma_signed(a + n as f64);
    let (la, sa) = ln_gamma_signed(a);
    sa * sb * (lb - la).exp()
}

/// Binomial coefficient C(n, k) as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Generalized hypergeometric series pFq(upper; lower; z).
///
/// Terminates naturally when an upper parameter is a non-positive integer.
/// Only the entire case p <= q + 1 with |z| < 1 for p = q + 1 is accepted.
pub fn pfq(upper: &[f64], lower: &[f64], z: Complex64, tol: f64) -> Result<SeriesValue> {
    if let Some(b) = lower.iter().find(|b| is_nonpositive_integer(**b)) {
        return Err(Error::invalid(format!(
            "lower hypergeometric parameter {b} is a non-positive integer"
        )));
    }
    if upper.len() > lower.len() + 1 || (upper.len() == lower.len() + 1 && z.norm() >= 1.0) {
        return Err(Error::invalid(format!(
            "{}F{} series diverges at |z| = {}",
            upper.len(),
            lower.len(),
            z.norm()
        )));
    }
    let mut acc = SeriesSum::new(tol);
    let mut term = Complex64::new(1.0, 0.0);
    for m in 0..crate::series::MAX_TERMS {
        if acc.push(term) {
            return Ok(acc.finish());
        }
        let mf = m as f64;
        let num: f64 = upper.iter().map(|a| a + mf).product();
        if num == 0.0 {
            return Ok(acc.finish());
        }
        let den: f64 = lower.iter().map(|b| b + mf).product();
        term *= z * (num / (den * (mf + 1.0)));
    }
    Err(acc.non_convergent("pfq"))
}
