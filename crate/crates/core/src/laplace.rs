//! Laplace images of Prabhakar kernels, numerical inversion (fixed Talbot and
//! Gaver-Stehfest), forward transforms by quadrature and the solvability
//! checks for the relaxation equation.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mlfun::MLParams;
use crate::quad::{integrate_power_origin, integrate_to_infinity, QuadOptions};
use crate::special::binomial;

pub const DEFAULT_TALBOT_NODES: usize = 32;
pub const DEFAULT_STEHFEST_NODES: usize = 16;
pub const DEFAULT_DISAGREEMENT_GATE: f64 = 1e-6;

/// Memory kernel k(t) = t^{-μ} E^{-ν}_{α,1-μ}(-a t^α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrabhakarKernel {
    pub alpha: f64,
    pub nu: f64,
    pub mu: f64,
    pub a: f64,
}

impl PrabhakarKernel {
    pub fn new(alpha: f64, nu: f64, mu: f64, a: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("nu", nu), ("mu", mu)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(format!("kernel {name} = {v} outside (0, 1]")));
            }
        }
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::invalid(format!("kernel a = {a} must be finite and >= 0")));
        }
        Ok(PrabhakarKernel { alpha, nu, mu, a })
    }

    /// Cole-Cole shaped kernel: ν = 1, μ = α.
    pub fn cole_cole(alpha: f64, a: f64) -> Result<Self> {
        Self::new(alpha, 1.0, alpha, a)
    }

    pub fn is_cole_cole(&self) -> bool {
        self.nu == 1.0 && (self.mu - self.alpha).abs() < 1e-15
    }

    /// k(t) itself, evaluated through the Mittag-Leffler function.
    pub fn eval(&self, t: f64) -> Result<f64> {
        crate::mlfun::prabhakar(&MLParams::new(self.alpha, 1.0 - self.mu, -self.nu)?, -self.a, t)
    }

    pub fn image(&self, s: Complex64) -> Result<Complex64> {
        kernel_image(self, s)
    }
}

/// k̂(s) = s^{-1+μ-αν} (s^α + a)^ν on the principal branch.
pub fn kernel_image(kernel: &PrabhakarKernel, s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::invalid(format!("kernel image needs Re s > 0, got {s}")));
    }
    Ok(kernel_image_unchecked(kernel, s))
}

pub(crate) fn kernel_image_unchecked(k: &PrabhakarKernel, s: Complex64) -> Complex64 {
    let ln_s = s.ln();
    let base = (k.alpha * ln_s).exp() + k.a;
    ((k.mu - k.alpha * k.nu - 1.0) * ln_s + k.nu * base.ln()).exp()
}

/// Evaluator for a Laplace-domain function.
#[derive(Clone)]
pub struct LaplaceImage {
    evaluator: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
    description: String,
    abscissa: f64,
}

impl fmt::Debug for LaplaceImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LaplaceImage")
            .field("description", &self.description)
            .field("abscissa", &self.abscissa)
            .finish()
    }
}

impl LaplaceImage {
    pub fn new<F>(description: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        LaplaceImage {
            evaluator: Arc::new(f),
            description: description.into(),
            abscissa: 0.0,
        }
    }

    /// Declares the real part of the rightmost singularity. Inversion shifts
    /// the contour past it.
    pub fn with_abscissa(mut self, abscissa: f64) -> Self {
        self.abscissa = abscissa.max(0.0);
        self
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        (self.evaluator)(s)
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    /// Image of k(t).
    pub fn of_kernel(kernel: PrabhakarKernel) -> Self {
        LaplaceImage::new(
            format!(
                "kernel k̂(s) alpha={} nu={} mu={} a={}",
                kernel.alpha, kernel.nu, kernel.mu, kernel.a
            ),
            move |s| kernel_image_unchecked(&kernel, s),
        )
    }

    /// Image s^{αν-μ} (s^α - a)^{-ν} of the Prabhakar function
    /// t^{μ-1} E^ν_{α,μ}(a t^α).
    pub fn of_prabhakar(params: MLParams, a: f64) -> Self {
        let MLParams { alpha, mu, nu } = params;
        let img = LaplaceImage::new(
            format!("prabhakar alpha={alpha} mu={mu} nu={nu} a={a}"),
            move |s: Complex64| {
                let ln_s = s.ln();
                let base = (alpha * ln_s).exp() - a;
                ((alpha * nu - mu) * ln_s - nu * base.ln()).exp()
            },
        );
        if a > 0.0 {
            img.with_abscissa(a.powf(1.0 / alpha))
        } else {
            img
        }
    }
}

/// Whether the unshifted Talbot contour for order `n` at time `t` stays in
/// |s| > a^{1/α}, the region where the Prabhakar transform pair holds.
/// Configurations failing this are inverted on a shifted contour instead.
pub fn talbot_contour_clears(alpha: f64, a: f64, t: f64, n: usize) -> bool {
    if a <= 0.0 {
        return true;
    }
    let r = 2.0 * n as f64 / (5.0 * t);
    r > a.powf(1.0 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionMethod {
    Talbot,
    Stehfest,
}

impl std::str::FromStr for InversionMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "talbot" => Ok(InversionMethod::Talbot),
            "stehfest" => Ok(InversionMethod::Stehfest),
            other => Err(Error::invalid(format!("unknown inversion method {other}"))),
        }
    }
}

/// Fixed-Talbot inversion (Abate-Valkó contour) of `f` at time `t`, with the
/// contour shifted right by `shift`.
pub(crate) fn talbot<F: Fn(Complex64) -> Complex64>(f: F, t: f64, m: usize, shift: f64) -> f64 {
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let sigma = Complex64::new(shift, 0.0);
    let mut acc = 0.5 * (f(Complex64::new(r, 0.0) + sigma) * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * PI / mf;
        let cot = theta.cos() / theta.sin();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sig = theta + (theta * cot - 1.0) * cot;
        let term = (s * t).exp() * f(s + sigma) * Complex64::new(1.0, sig);
        acc += term.re;
    }
    (shift * t).exp() * r / mf * acc
}

fn stehfest_weights(n: usize) -> Vec<f64> {
    let half = n / 2;
    let fact = |k: usize| (1..=k).fold(1.0f64, |a, j| a * j as f64);
    (1..=n)
        .map(|k| {
            let lo = k.div_ceil(2);
            let hi = k.min(half);
            let sum: f64 = (lo..=hi)
                .map(|j| {
                    (j as f64).powi(half as i32) * fact(2 * j)
                        / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
                })
                .sum();
            if (k + half).is_multiple_of(2) {
                sum
            } else {
                -sum
            }
        })
        .collect()
}

pub(crate) fn stehfest<F: Fn(Complex64) -> Complex64>(f: F, t: f64, n: usize, shift: f64) -> f64 {
    let w = stehfest_weights(n);
    let h = LN_2 / t;
    let acc: f64 = w
        .iter()
        .enumerate()
        .map(|(i, wk)| wk * f(Complex64::new(shift + h * (i + 1) as f64, 0.0)).re)
        .sum();
    (shift * t).exp() * h * acc
}

/// Numerical inverse Laplace transform of `image` at time `t`.
pub fn inverse_laplace(image: &LaplaceImage, t: f64, method: InversionMethod, n_nodes: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("inversion time t = {t} must be > 0")));
    }
    let value = match method {
        InversionMethod::Talbot => {
            if n_nodes < 2 {
                return Err(Error::invalid("talbot needs at least 2 nodes"));
            }
            talbot(|s| image.eval(s), t, n_nodes, image.abscissa)
        }
        InversionMethod::Stehfest => {
            if n_nodes < 2 || !n_nodes.is_multiple_of(2) || n_nodes > 30 {
                return Err(Error::invalid(format!(
                    "stehfest needs an even node count in [2, 30], got {n_nodes}"
                )));
            }
            stehfest(|s| image.eval(s), t, n_nodes, image.abscissa)
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NumericalOverflow("inverse_laplace"))
    }
}

/// Settings for a dual-method inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionConfig {
    pub talbot_nodes: usize,
    pub stehfest_nodes: usize,
    /// Maximum relative Talbot/Stehfest difference before reporting
    /// `MethodDisagreement`.
    pub gate: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            talbot_nodes: DEFAULT_TALBOT_NODES,
            stehfest_nodes: DEFAULT_STEHFEST_NODES,
            gate: DEFAULT_DISAGREEMENT_GATE,
        }
    }
}

/// Inverts with both methods and returns the Talbot value if they agree.
pub fn inverse_laplace_checked(image: &LaplaceImage, t: f64, cfg: &InversionConfig) -> Result<f64> {
    let talbot = inverse_laplace(image, t, InversionMethod::Talbot, cfg.talbot_nodes)?;
    let stehfest = inverse_laplace(image, t, InversionMethod::Stehfest, cfg.stehfest_nodes)?;
    let rel = (talbot - stehfest).abs() / talbot.abs().max(f64::MIN_POSITIVE);
    if rel > cfg.gate {
        return Err(Error::MethodDisagreement {
            talbot,
            stehfest,
            rel,
            gate: cfg.gate,
        });
    }
    Ok(talbot)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardOptions {
    /// f(t) ~ t^{p-1} near the origin; the [0, 1] piece is integrated in
    /// u = t^p.
    pub endpoint_exponent: f64,
    pub quad: QuadOptions,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        ForwardOptions {
            endpoint_exponent: 1.0,
            quad: QuadOptions::default(),
        }
    }
}

/// ∫_0^∞ e^{-st} f(t) dt by adaptive Gauss-Kronrod quadrature.
pub fn forward_laplace<F: Fn(f64) -> f64>(f: F, s: Complex64, opts: &ForwardOptions) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::invalid(format!("forward transform needs Re s > 0, got {s}")));
    }
    if !(opts.endpoint_exponent > 0.0) {
        return Err(Error::invalid("endpoint exponent must be > 0 for integrability"));
    }
    let g = |t: f64| {
        let w = (-s * t).exp();
        // skip f where the weight has underflowed; f may not be evaluable there
        if w == Complex64::new(0.0, 0.0) {
            w
        } else {
            w * f(t)
        }
    };
    let head = integrate_power_origin(g, 1.0, opts.endpoint_exponent, &opts.quad)?;
    let tail = integrate_to_infinity(g, 1.0, &opts.quad)?;
    Ok(head.value + tail.value)
}

/// Limits of k̂ and s·k̂ at both ends of the real axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvabilityReport {
    /// Analytic power of k̂(s) as s → 0⁺ and s → ∞.
    pub exponent_at_zero: f64,
    pub exponent_at_infinity: f64,
    /// Local log-log slopes of |k̂| measured at s = 1e-6 and s = 1e6.
    pub probed_exponent_at_zero: f64,
    pub probed_exponent_at_infinity: f64,
    pub k_at_zero: f64,
    pub sk_at_zero: f64,
    pub k_at_infinity: f64,
    pub sk_at_infinity: f64,
    pub k_diverges_at_zero: bool,
    pub sk_vanishes_at_zero: bool,
    pub k_vanishes_at_infinity: bool,
    pub sk_diverges_at_infinity: bool,
    /// [s k̂(s)]^{-1} → 0 as s → ∞.
    pub fading_memory: bool,
}

impl SolvabilityReport {
    /// All four limits required for a completely monotone solution hold.
    pub fn solvable(&self) -> bool {
        self.k_diverges_at_zero
            && self.sk_vanishes_at_zero
            && self.k_vanishes_at_infinity
            && self.sk_diverges_at_infinity
    }

    /// Probed slopes agree with the analytic exponents.
    pub fn probes_consistent(&self, tol: f64) -> bool {
        (self.probed_exponent_at_zero - self.exponent_at_zero).abs() <= tol
            && (self.probed_exponent_at_infinity - self.exponent_at_infinity).abs() <= tol
    }
}

const SLOPE_EPS: f64 = 1e-9;

/// Checks the small/large-s limits of k̂ and s·k̂ for the kernel.
pub fn solvability_check(kernel: &PrabhakarKernel) -> SolvabilityReport {
    let k = |s: f64| kernel_image_unchecked(kernel, Complex64::new(s, 0.0)).re;
    let (lo, hi) = (1e-6, 1e6);
    let slope = |s: f64| (k(10.0 * s) / k(s)).log10();

    // k̂ ~ a^ν s^{μ-αν-1} near zero when a > 0, s^{μ-1} otherwise; s^{μ-1} at infinity
    let exponent_at_zero = if kernel.a > 0.0 {
        kernel.mu - kernel.alpha * kernel.nu - 1.0
    } else {
        kernel.mu - 1.0
    };
    let exponent_at_infinity = kernel.mu - 1.0;

    SolvabilityReport {
        exponent_at_zero,
        exponent_at_infinity,
        probed_exponent_at_zero: slope(lo),
        probed_exponent_at_infinity: slope(hi / 10.0),
        k_at_zero: k(lo),
        sk_at_zero: lo * k(lo),
        k_at_infinity: k(hi),
        sk_at_infinity: hi * k(hi),
        k_diverges_at_zero: exponent_at_zero < -SLOPE_EPS,
        sk_vanishes_at_zero: exponent_at_zero + 1.0 > SLOPE_EPS,
        k_vanishes_at_infinity: exponent_at_infinity < -SLOPE_EPS,
        sk_diverges_at_infinity: exponent_at_infinity + 1.0 > SLOPE_EPS,
        fading_memory: exponent_at_infinity + 1.0 > SLOPE_EPS,
    }
}

/// ∫_0^∞ x^{d+m} e^{-ax} E^{-n}_{α,1+d}((bx)^α) dx as the finite Gamma-ratio sum.
pub fn ml_poly_moment(alpha: f64, d: f64, n: u32, a: f64, b: f64, m: u32) -> f64 {
    let y = (b / a).powf(alpha);
    let mf = m as f64;
    let sum: f64 = (0..=n)
        .map(|r| {
            let rf = r as f64;
            let g = crate::special::ln_gamma_signed(1.0 + d + mf + alpha * rf).0
                - crate::special::ln_gamma_signed(1.0 + d + alpha * rf).0;
            binomial(n, r) * (-y).powi(r as i32) * g.exp()
        })
        .sum();
    a.powf(-1.0 - d - mf) * sum
}

/// Factored forms of [`ml_poly_moment`] for m = 0 and m = 1.
pub fn ml_poly_moment_factored(alpha: f64, d: f64, n: u32, a: f64, b: f64, m: u32) -> Result<f64> {
    let nf = n as f64;
    let (aa, ba) = (a.powf(alpha), b.powf(alpha));
    match m {
        0 => Ok(a.powf(-1.0 - d - alpha * nf) * (aa - ba).powi(n as i32)),
        1 if n >= 1 => Ok(a.powf(-2.0 - d - alpha * nf)
            * (aa - ba).powi(n as i32 - 1)
            * ((1.0 + d) * aa - (1.0 + d + alpha * nf) * ba)),
        1 => Ok(a.powf(-2.0 - d) * (1.0 + d)),
        _ => Err(Error::invalid(format!("factored moment only for m = 0, 1; got {m}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kernel_image_special_cases() {
        let k = PrabhakarKernel::new(0.6, 0.7, 0.8, 0.0).unwrap();
        let s = Complex64::new(1.3, 0.4);
        let expect = s.powf(0.8 - 1.0);
        assert!((kernel_image(&k, s).unwrap() - expect).norm() < 1e-14);

        let k = PrabhakarKernel::new(0.6, 1.0, 0.6, 2.0).unwrap();
        let expect = (s.powf(0.6) + 2.0) / s;
        assert!((kernel_image(&k, s).unwrap() - expect).norm() < 1e-14);

        let k = PrabhakarKernel::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(kernel_image(&k, c(2.0)).unwrap().re, 1.0, max_relative = 1e-15);
        assert!(kernel_image(&k, c(-1.0)).is_err());
    }

    #[test]
    fn kernel_rejects_bad_params() {
        assert!(PrabhakarKernel::new(0.0, 0.5, 0.5, 1.0).is_err());
        assert!(PrabhakarKernel::new(0.5, 1.5, 0.5, 1.0).is_err());
        assert!(PrabhakarKernel::new(0.5, 0.5, 0.5, -1.0).is_err());
    }

    #[test]
    fn conjugate_symmetry() {
        let k = PrabhakarKernel::new(0.7, 0.4, 0.9, 1.5).unwrap();
        for s in [Complex64::new(0.3, 2.0), Complex64::new(5.0, -7.0)] {
            let lhs = kernel_image(&k, s.conj()).unwrap();
            let rhs = kernel_image(&k, s).unwrap().conj();
            assert!((lhs - rhs).norm() <= 1e-14 * rhs.norm());
        }
    }

    #[test]
    fn elementary_inversions() {
        let one_over_s = LaplaceImage::new("1/s", |s| 1.0 / s);
        let decay = LaplaceImage::new("1/(s+1)", |s| 1.0 / (s + 1.0));
        for t in [0.1, 1.0, 7.0] {
            let v = inverse_laplace(&one_over_s, t, InversionMethod::Talbot, 32).unwrap();
            assert_relative_eq!(v, 1.0, max_relative = 1e-10);
            let v = inverse_laplace(&one_over_s, t, InversionMethod::Stehfest, 14).unwrap();
            assert_relative_eq!(v, 1.0, max_relative = 1e-8);
        }
        let v = inverse_laplace(&decay, 1.0, InversionMethod::Talbot, 32).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn growing_function_uses_shifted_contour() {
        // e^{2t}: pole at s = 2
        let img = LaplaceImage::new("1/(s-2)", |s| 1.0 / (s - 2.0)).with_abscissa(2.0);
        let v = inverse_laplace(&img, 3.0, InversionMethod::Talbot, 32).unwrap();
        assert_relative_eq!(v, 6.0f64.exp(), max_relative = 1e-9);
        assert!(!talbot_contour_clears(0.5, 4.0, 10.0, 32));
        assert!(talbot_contour_clears(0.5, 4.0, 0.1, 32));
    }

    #[test]
    fn checked_inversion_gate() {
        let img = LaplaceImage::new("1/(s+1)", |s| 1.0 / (s + 1.0));
        assert!(inverse_laplace_checked(&img, 1.0, &InversionConfig::default()).is_ok());
        // a discontinuous original defeats Stehfest
        let step = LaplaceImage::new("e^{-s}/s", |s| (-s).exp() / s);
        let r = inverse_laplace_checked(&step, 1.2, &InversionConfig::default());
        assert!(matches!(r, Err(Error::MethodDisagreement { .. })));
    }

    #[test]
    fn forward_of_constant() {
        let v = forward_laplace(|_| 1.0, c(2.0), &ForwardOptions::default()).unwrap();
        assert!((v - c(0.5)).norm() < 1e-10);
        assert!(forward_laplace(|_| 1.0, c(0.0), &ForwardOptions::default()).is_err());
    }

    #[test]
    fn solvability_cases() {
        let debye = solvability_check(&PrabhakarKernel::new(1.0, 1.0, 1.0, 0.0).unwrap());
        assert!(!debye.solvable());
        assert!(!debye.k_diverges_at_zero && !debye.k_vanishes_at_infinity);

        let cc = solvability_check(&PrabhakarKernel::cole_cole(0.75, 0.0).unwrap());
        assert!(cc.solvable() && cc.fading_memory);
        assert!(cc.probes_consistent(1e-3));

        // with a > 0 and μ = αν, s k̂(s) tends to a^ν instead of 0
        let cc3 = solvability_check(&PrabhakarKernel::cole_cole(0.75, 3.0).unwrap());
        assert!(cc3.k_diverges_at_zero && cc3.k_vanishes_at_infinity && cc3.sk_diverges_at_infinity);
        assert!(!cc3.sk_vanishes_at_zero);
        assert_relative_eq!(cc3.sk_at_zero, 3.0, max_relative = 1e-3);
        assert!(cc3.fading_memory);
    }

    #[test]
    fn moment_forms_agree() {
        for &(alpha, d, n) in &[(0.5, 0.0, 3u32), (0.75, 0.4, 2), (1.3, 1.0, 4)] {
            for m in 0..2 {
                let s = ml_poly_moment(alpha, d, n, 1.7, 0.9, m);
                let f = ml_poly_moment_factored(alpha, d, n, 1.7, 0.9, m).unwrap();
                assert_relative_eq!(s, f, max_relative = 1e-12);
            }
        }
    }
}
