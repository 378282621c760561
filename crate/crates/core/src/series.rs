//! Term accumulator with the stopping rule shared by every power series here.
//!
//! A series is declared converged after three consecutive terms that are each
//! below `tol * |partial sum|` and no larger than their predecessor. Exact
//! zero terms (Γ poles) count as small. The largest term seen is kept so that
//! callers can judge cancellation.

use num_complex::Complex64;

use crate::error::Error;

pub const MAX_TERMS: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-13;
const SMALL_RUN: usize = 3;

/// Result of a summed series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Largest |term| encountered.
    pub max_term: f64,
    /// Number of terms added.
    pub terms: usize,
    /// Magnitude of the last term added (truncation estimate).
    pub last_term: f64,
}

impl SeriesValue {
    /// max|term| / |sum|: digits lost to cancellation are roughly log10 of this.
    pub fn cancellation(&self) -> f64 {
        let s = self.value.norm();
        if s == 0.0 {
            if self.max_term == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.max_term / s
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SeriesSum {
    sum: Complex64,
    max_term: f64,
    prev: f64,
    run: usize,
    terms: usize,
    last: f64,
    tol: f64,
}

impl SeriesSum {
    pub fn new(tol: f64) -> Self {
        SeriesSum {
            sum: Complex64::new(0.0, 0.0),
            max_term: 0.0,
            prev: f64::INFINITY,
            run: 0,
            terms: 0,
            last: 0.0,
            tol,
        }
    }

    /// Adds a term; returns true once the stopping rule is met.
    pub fn push(&mut self, term: Complex64) -> bool {
        self.sum += term;
        self.terms += 1;
        let mag = term.norm();
        self.last = mag;
        self.max_term = self.max_term.max(mag);
        if mag <= self.tol * self.sum.norm() && mag <= self.prev {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.prev = mag;
        self.run >= SMALL_RUN
    }

    pub fn finish(&self) -> SeriesValue {
        SeriesValue {
            value: self.sum,
            max_term: self.max_term,
            terms: self.terms,
            last_term: self.last,
        }
    }

    pub fn non_convergent(&self, op: &'static str) -> Error {
        Error::NonConvergent {
            op,
            terms: self.terms,
            reason: format!("last |term| = {:.3e}, |sum| = {:.3e}", self.last, self.sum.norm()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_stops() {
        let mut s = SeriesSum::new(1e-13);
        let mut t = 1.0;
        let mut done = false;
        for _ in 0..200 {
            if s.push(Complex64::new(t, 0.0)) {
                done = true;
                break;
            }
            t *= 0.5;
        }
        assert!(done);
        assert!((s.finish().value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn humped_terms_do_not_stop_early() {
        // terms 10^k / k! grow before they shrink; a tiny leading term must not stop the sum
        let mut s = SeriesSum::new(1e-13);
        s.push(Complex64::new(0.0, 0.0));
        let mut t: f64 = 1.0;
        let mut k = 0usize;
        while !s.push(Complex64::new(t, 0.0)) {
            k += 1;
            t *= 10.0 / k as f64;
        }
        assert!((s.finish().value.re - 10f64.exp()).abs() / 10f64.exp() < 1e-12);
    }
}
