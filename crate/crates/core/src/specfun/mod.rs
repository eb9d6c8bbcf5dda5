//! Special functions: Gamma, Mittag-Leffler E_α / E_{α,β}, and the Wright
//! function Φ_α on the real line.
//!
//! All functions are pure and deterministic.

mod gamma;
mod mittag_leffler;
mod wright;

pub use gamma::{gamma, ln_gamma, rgamma, sinpi, MAX_GAMMA_ARG};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_two, mittag_leffler_with};
pub use wright::{wright, wright_moment, wright_with};

use crate::error::{Error, Result};

/// Fractional order α ∈ (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub const ONE: Alpha = Alpha(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Alpha(value))
        } else {
            Err(Error::Domain(format!("alpha must lie in (0,1], got {value}")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_markov(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

/// Controls when the power series is trusted and how hard it is pushed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    pub max_terms: usize,
    pub abs_tol: f64,
    /// |z| above which the series is never attempted.
    pub switch_radius: f64,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self {
            max_terms: 2000,
            abs_tol: 1e-14,
            switch_radius: 5.0,
        }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0 || !(self.abs_tol > 0.0) || !(self.switch_radius > 0.0) {
            return Err(Error::Domain(format!("invalid series policy {self:?}")));
        }
        Ok(())
    }
}

/// Neumaier-compensated running sum that also tracks Σ|term| for roundoff bounds.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub(crate) fn abs_total(&self) -> f64 {
        self.abs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_range() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(1.5).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(1.0).unwrap().is_markov());
        assert_eq!(Alpha::try_from(0.25).unwrap().get(), 0.25);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }

    #[test]
    fn policy_validation() {
        assert!(SeriesPolicy::default().validate().is_ok());
        let bad = SeriesPolicy {
            max_terms: 0,
            ..SeriesPolicy::default()
        };
        assert!(bad.validate().is_err());
    }
}
