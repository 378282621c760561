//! Frequency-domain response of the relaxation equation, Jonscher slope fits,
//! the Laplace exponent Ψ(s) = s k̂(s) and its dual memory κ.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laplace::{inverse_laplace, InversionMethod, LaplaceImage, PrabhakarKernel, DEFAULT_TALBOT_NODES};
use crate::mlfun::{prabhakar, MLParams};

pub const DEFAULT_POINTS_PER_DECADE: usize = 20;
/// Default grid half-width in decades around 1/τ.
pub const DEFAULT_DECADES: f64 = 4.0;
/// Minimum span, in decades on each side of 1/τ, for a slope fit.
pub const MIN_FIT_DECADES: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub omega_grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn new(omega_grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if omega_grid.len() != values.len() {
            return Err(Error::invalid(format!(
                "spectrum has {} frequencies but {} values",
                omega_grid.len(),
                values.len()
            )));
        }
        if omega_grid.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid("frequencies must be finite and > 0"));
        }
        if omega_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("frequency grid must be strictly ascending"));
        }
        Ok(ComplexSpectrum { omega_grid, values })
    }

    pub fn len(&self) -> usize {
        self.omega_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_grid.is_empty()
    }
}

/// Log-spaced grid from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || !hi.is_finite() {
        return Err(Error::invalid(format!("log grid needs 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if points_per_decade == 0 {
        return Err(Error::invalid("points per decade must be >= 1"));
    }
    let decades = (hi / lo).log10();
    let n = (decades * points_per_decade as f64).round().max(1.0) as usize;
    let step = decades / n as f64;
    Ok((0..=n).map(|i| lo * 10f64.powf(i as f64 * step)).collect())
}

/// Default grid [1e-4/τ, 1e4/τ] at 20 points per decade.
pub fn default_omega_grid(tau: f64) -> Result<Vec<f64>> {
    check_tau(tau)?;
    let w = 10f64.powf(DEFAULT_DECADES);
    log_grid(1.0 / (w * tau), w / tau, DEFAULT_POINTS_PER_DECADE)
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!("tau = {tau} must be finite and > 0")));
    }
    Ok(())
}

/// Coupling that turns the a = 0 kernel into Cole-Cole with relaxation time τ.
pub fn cole_cole_coupling(mu: f64, tau: f64) -> f64 {
    tau.powf(-mu)
}

/// Ψ(s) = s k̂(s) = s^{μ-αν}(s^α + a)^ν without the Re s > 0 check.
fn exponent_unchecked(k: &PrabhakarKernel, s: Complex64) -> Complex64 {
    let ln_s = s.ln();
    let base = (k.alpha * ln_s).exp() + k.a;
    ((k.mu - k.alpha * k.nu) * ln_s + k.nu * base.ln()).exp()
}

pub fn laplace_exponent(kernel: &PrabhakarKernel, s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::invalid(format!("laplace exponent needs Re s > 0, got {s}")));
    }
    Ok(exponent_unchecked(kernel, s))
}

fn check_b(b: f64) -> Result<()> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("coupling B = {b} must be finite and > 0")));
    }
    Ok(())
}

/// φ̂ = B / (B + Ψ(s)) at any s off the negative real axis. On the imaginary
/// axis this is the spectral function; principal branches throughout.
pub fn spectral_function_at(kernel: &PrabhakarKernel, b: f64, s: Complex64) -> Result<Complex64> {
    check_b(b)?;
    if s.im == 0.0 && s.re <= 0.0 {
        return Err(Error::invalid(format!("spectral function undefined at s = {s}")));
    }
    Ok(b / (b + exponent_unchecked(kernel, s)))
}

/// φ̂(iω) = B / (B + (iω)^{μ-αν}[a + (iω)^α]^ν).
pub fn spectral_function(kernel: &PrabhakarKernel, b: f64, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid(format!("omega = {omega} must be finite and > 0")));
    }
    // iω built in polar form so that arg is exactly π/2
    spectral_function_at(kernel, b, Complex64::from_polar(omega, FRAC_PI_2))
}

pub fn spectrum(kernel: &PrabhakarKernel, b: f64, omega_grid: &[f64]) -> Result<ComplexSpectrum> {
    let values = omega_grid
        .par_iter()
        .map(|&w| spectral_function(kernel, b, w))
        .collect::<Result<Vec<_>>>()?;
    ComplexSpectrum::new(omega_grid.to_vec(), values)
}

/// Least-squares slope of y against x.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Fits (m, 1-n) of Jonscher's law: |1 - φ̂| ~ ω^m over the lowest decade and
/// |φ̂| ~ ω^{-(1-n)} over the highest decade of the grid.
pub fn jonscher_exponents(spectrum: &ComplexSpectrum, tau: f64) -> Result<(f64, f64)> {
    check_tau(tau)?;
    let w = &spectrum.omega_grid;
    if w.len() < 4 {
        return Err(Error::GridTooNarrow(format!("{} frequencies", w.len())));
    }
    let (lo, hi) = (w[0] * tau, w[w.len() - 1] * tau);
    let need = 10f64.powf(MIN_FIT_DECADES) * (1.0 - 1e-9);
    if lo * need > 1.0 || hi < need {
        return Err(Error::GridTooNarrow(format!(
            "ωτ spans [{lo:.3e}, {hi:.3e}]; need [1e-2, 1e2] or wider"
        )));
    }
    let fit = |range: std::ops::Range<usize>, f: &dyn Fn(Complex64) -> f64| -> Result<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = range
            .map(|i| (w[i].ln(), f(spectrum.values[i]).ln()))
            .filter(|(_, y)| y.is_finite())
            .unzip();
        if xs.len() < 2 {
            return Err(Error::GridTooNarrow(
                "fewer than two usable points in a fit decade".into(),
            ));
        }
        Ok(slope(&xs, &ys))
    };
    let low_end = w.partition_point(|&x| x <= w[0] * 10.0 * (1.0 + 1e-12));
    let high_start = w.partition_point(|&x| x < w[w.len() - 1] / 10.0 * (1.0 - 1e-12));
    let m = fit(0..low_end, &|v| (1.0 - v).norm())?;
    let one_minus_n = -fit(high_start..w.len(), &|v| v.norm())?;
    Ok((m, one_minus_n))
}

/// κ(t) = t^{μ-1} E^ν_{α,μ}(-a t^α), the inverse transform of 1/Ψ(s).
pub fn kappa_kernel(kernel: &PrabhakarKernel, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("kappa needs t > 0, got {t}")));
    }
    prabhakar(&MLParams::new(kernel.alpha, kernel.mu, kernel.nu)?, -kernel.a, t)
}

/// κ(t) by Talbot inversion of 1/Ψ(s), independent of the series routes.
pub fn kappa_kernel_numeric(kernel: &PrabhakarKernel, t: f64) -> Result<f64> {
    let k = *kernel;
    let image = LaplaceImage::new("1/Psi", move |s: Complex64| 1.0 / exponent_unchecked(&k, s));
    inverse_laplace(&image, t, InversionMethod::Talbot, DEFAULT_TALBOT_NODES)
}

/// Relaxation curve from the spectrum: f = L^{-1}[(1 - φ̂(s)) / s].
pub fn relaxation_from_spectrum(kernel: &PrabhakarKernel, b: f64, t: f64) -> Result<f64> {
    check_b(b)?;
    let k = *kernel;
    let image = LaplaceImage::new("(1-phi)/s", move |s: Complex64| {
        let psi = exponent_unchecked(&k, s);
        psi / (b + psi) / s
    });
    inverse_laplace(&image, t, InversionMethod::Talbot, DEFAULT_TALBOT_NODES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplace::forward_laplace;
    use crate::laplace::ForwardOptions;
    use crate::special::gamma;
    use crate::volterra::{solve_laplace_numeric, VolterraProblem};
    use approx::assert_relative_eq;

    #[test]
    fn reduces_to_cole_cole_and_debye() {
        let tau = 0.4;
        let k = PrabhakarKernel::cole_cole(0.75, 0.0).unwrap();
        let b = cole_cole_coupling(0.75, tau);
        for w in [0.01, 1.0, 30.0] {
            let want = 1.0 / (1.0 + Complex64::new(0.0, w * tau).powf(0.75));
            let got = spectral_function(&k, b, w).unwrap();
            assert!((got - want).norm() < 1e-13 * want.norm());
        }
        let debye = PrabhakarKernel::new(1.0, 1.0, 1.0, 0.0).unwrap();
        let got = spectral_function(&debye, 1.0 / tau, 2.0).unwrap();
        let want = 1.0 / Complex64::new(1.0, 2.0 * tau);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn low_frequency_limits() {
        let k = PrabhakarKernel::cole_cole(0.75, 0.0).unwrap();
        let tau = 1.0;
        let v = spectral_function(&k, cole_cole_coupling(0.75, tau), 1e-6 / tau).unwrap();
        assert!((v - 1.0).norm() < 1e-4);
        let k = PrabhakarKernel::cole_cole(0.75, 2.0).unwrap();
        let v = spectral_function(&k, 1.0, 1e-9).unwrap();
        assert!((v - 1.0 / 3.0).norm() < 1e-6);
    }

    #[test]
    fn hermitian_symmetry() {
        let k = PrabhakarKernel::new(0.6, 0.7, 0.8, 1.5).unwrap();
        for w in [0.1, 2.0, 50.0] {
            let up = spectral_function_at(&k, 2.0, Complex64::new(0.0, w)).unwrap();
            let down = spectral_function_at(&k, 2.0, Complex64::new(0.0, -w)).unwrap();
            assert!((up.conj() - down).norm() < 1e-14);
        }
    }

    #[test]
    fn jonscher_slopes() {
        let tau = 1.0;
        let grid = default_omega_grid(tau).unwrap();
        let k = PrabhakarKernel::cole_cole(0.75, 0.0).unwrap();
        let (m, one_n) = jonscher_exponents(&spectrum(&k, 1.0, &grid).unwrap(), tau).unwrap();
        assert!((m - 0.75).abs() < 0.02 && (one_n - 0.75).abs() < 0.02, "{m} {one_n}");

        let k = PrabhakarKernel::cole_cole(0.75, 1.0).unwrap();
        let (m, _) = jonscher_exponents(&spectrum(&k, 1.0, &grid).unwrap(), tau).unwrap();
        assert!(m.abs() < 0.02, "{m}");

        let k = PrabhakarKernel::new(0.5, 1.0, 0.9, 1.0).unwrap();
        let (m, one_n) = jonscher_exponents(&spectrum(&k, 1.0, &grid).unwrap(), tau).unwrap();
        assert!((m - 0.4).abs() < 0.02 && (one_n - 0.9).abs() < 0.02, "{m} {one_n}");
    }

    #[test]
    fn narrow_grid_rejected() {
        let k = PrabhakarKernel::cole_cole(0.75, 0.0).unwrap();
        let grid = log_grid(0.1, 1e3, 20).unwrap();
        let r = jonscher_exponents(&spectrum(&k, 1.0, &grid).unwrap(), 1.0);
        assert!(matches!(r, Err(Error::GridTooNarrow(_))));
    }

    #[test]
    fn exponent_and_kappa() {
        let k = PrabhakarKernel::new(0.7, 0.4, 0.5, 0.0).unwrap();
        let s = Complex64::new(2.0, 1.0);
        assert!((laplace_exponent(&k, s).unwrap() - s.powf(0.5)).norm() < 1e-14);
        assert_relative_eq!(kappa_kernel(&k, 1.0).unwrap(), 1.0 / gamma(0.5), max_relative = 1e-14);
        let one = PrabhakarKernel::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((laplace_exponent(&one, Complex64::new(3.0, 0.0)).unwrap() - 3.0).norm() < 1e-14);
        for t in [0.3, 4.0] {
            assert_relative_eq!(
                kappa_kernel(&PrabhakarKernel::new(0.5, 0.5, 1.0, 0.0).unwrap(), t).unwrap(),
                1.0
            );
        }
        assert!(laplace_exponent(&k, Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn kappa_duality() {
        let k = PrabhakarKernel::new(0.6, 0.5, 0.7, 1.3).unwrap();
        for t in [0.2, 1.0, 5.0] {
            assert_relative_eq!(
                kappa_kernel(&k, t).unwrap(),
                kappa_kernel_numeric(&k, t).unwrap(),
                max_relative = 1e-8
            );
        }
        let s = 1.7;
        let opts = ForwardOptions {
            endpoint_exponent: k.mu,
            ..ForwardOptions::default()
        };
        let fwd = forward_laplace(|t| kappa_kernel(&k, t).unwrap(), Complex64::new(s, 0.0), &opts).unwrap();
        let prod = fwd * laplace_exponent(&k, Complex64::new(s, 0.0)).unwrap();
        assert!((prod - 1.0).norm() < 1e-5, "{prod}");
    }

    #[test]
    fn time_domain_consistency() {
        let p = VolterraProblem::cole_cole(0.75, 0.5, 1.25).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let f = relaxation_from_spectrum(&p.kernel, p.b, t).unwrap();
            assert!((f - solve_laplace_numeric(&p, t).unwrap()).abs() < 1e-4);
        }
    }
}
