//! Truncation control and compensated summation for the series loops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation control for every infinite sum in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl SeriesControl {
    pub fn new(max_terms: usize, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if max_terms == 0 {
            return Err(Error::InvalidParam {
                field: "max_terms",
                constraint: "must be >= 1".into(),
            });
        }
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) {
            return Err(Error::InvalidParam {
                field: "tolerances",
                constraint: "rel_tol and abs_tol must be > 0".into(),
            });
        }
        Ok(Self {
            max_terms,
            rel_tol,
            abs_tol,
        })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 500,
            rel_tol: 1e-15,
            abs_tol: 1e-300,
        }
    }
}

/// Kahan compensated accumulator. The GCH sums alternate in sign and plain
/// summation loses digits to cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, term: f64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Stops when |term| < abs_tol + rel_tol * |partial| holds for two terms in a
/// row; a single accidentally small term in an alternating series must not
/// end the sum.
#[derive(Debug, Clone, Copy)]
pub struct TailStop {
    ctl: SeriesControl,
    consecutive_small: u8,
}

impl TailStop {
    pub fn new(ctl: SeriesControl) -> Self {
        Self {
            ctl,
            consecutive_small: 0,
        }
    }

    /// Feed the term just added; returns true once the stop condition is met.
    #[inline]
    pub fn converged(&mut self, term: f64, partial: f64) -> bool {
        if term.abs() < self.ctl.abs_tol + self.ctl.rel_tol * partial.abs() {
            self.consecutive_small += 1;
        } else {
            self.consecutive_small = 0;
        }
        self.consecutive_small >= 2
    }

    pub fn non_convergence(&self, last_term: f64) -> Error {
        Error::NonConvergence {
            max_terms: self.ctl.max_terms,
            last_term: last_term.abs(),
        }
    }
}

/// True when `x` is within `tol` of a non-positive integer.
#[inline]
pub fn is_nonpositive_integer(x: f64, tol: f64) -> bool {
    x <= tol && (x - x.round()).abs() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_control_rejects_bad_inputs() {
        assert!(SeriesControl::new(0, 1e-12, 1e-300).is_err());
        assert!(SeriesControl::new(10, 0.0, 1e-300).is_err());
        assert!(SeriesControl::new(10, 1e-12, -1.0).is_err());
    }

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        // sum of (-1)^k / (k+1) in Kahan order stays close to ln 2
        let mut k = KahanSum::new();
        for i in 0..2_000_000u64 {
            let t = if i % 2 == 0 { 1.0 } else { -1.0 } / (i as f64 + 1.0);
            k.add(t);
        }
        assert!((k.value() - std::f64::consts::LN_2).abs() < 3e-7);
    }

    #[test]
    fn tail_stop_needs_two_small_terms() {
        let mut stop = TailStop::new(SeriesControl::new(100, 1e-10, 1e-30).unwrap());
        assert!(!stop.converged(1e-20, 1.0));
        assert!(!stop.converged(0.5, 1.0)); // resets
        assert!(!stop.converged(1e-20, 1.0));
        assert!(stop.converged(1e-20, 1.0));
    }
}
