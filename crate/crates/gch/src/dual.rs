//! First- and second-order jets for differentiation in the indicial
//! parameter.
//!
//! The recurrence coefficients are rational in lambda, so threading a jet
//! through them gives derivatives exact to rounding. A first-order [`Dual`]
//! covers plain d/d-lambda queries; the logarithmic Frobenius construction
//! divides two quantities that both vanish at the resonant index, which
//! consumes one jet order, so the engine carries [`Jet`] with terms through
//! t^2.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Minimal scalar interface shared by f64 and the jet types so the
/// recurrence coefficient formulas can be written once.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    /// Value part (the coefficient of t^0).
    fn re(&self) -> f64;
    /// Division that reports a pole instead of producing infinities.
    fn checked_div(self, rhs: Self) -> Result<Self>;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self / rhs)
    }
}

/// Value plus first derivative with respect to lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub de: f64,
}

impl Dual {
    pub const fn new(re: f64, de: f64) -> Self {
        Self { re, de }
    }

    /// The differentiation variable itself: value `x`, derivative 1.
    pub const fn variable(x: f64) -> Self {
        Self { re: x, de: 1.0 }
    }

    pub const fn constant(x: f64) -> Self {
        Self { re: x, de: 0.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    #[inline]
    fn add(self, r: Dual) -> Dual {
        Dual::new(self.re + r.re, self.de + r.de)
    }
}

impl Sub for Dual {
    type Output = Dual;
    #[inline]
    fn sub(self, r: Dual) -> Dual {
        Dual::new(self.re - r.re, self.de - r.de)
    }
}

impl Mul for Dual {
    type Output = Dual;
    #[inline]
    fn mul(self, r: Dual) -> Dual {
        Dual::new(self.re * r.re, self.re * r.de + self.de * r.re)
    }
}

impl Div for Dual {
    type Output = Dual;
    #[inline]
    fn div(self, r: Dual) -> Dual {
        let v = self.re / r.re;
        Dual::new(v, (self.de - v * r.de) / r.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    #[inline]
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.de)
    }
}

impl Scalar for Dual {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dual::constant(x)
    }
    #[inline]
    fn re(&self) -> f64 {
        self.re
    }
    #[inline]
    fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.re == 0.0 {
            return Err(Error::Domain(
                "dual division by zero value part".into(),
            ));
        }
        Ok(self / rhs)
    }
}

/// Truncated jet a0 + a1 t + a2 t^2 around the expansion point of lambda.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; 3],
}

impl Jet {
    pub const fn new(c0: f64, c1: f64, c2: f64) -> Self {
        Self { c: [c0, c1, c2] }
    }

    /// lambda itself around base: base + t.
    pub const fn variable(base: f64) -> Self {
        Self {
            c: [base, 1.0, 0.0],
        }
    }

    pub const fn constant(x: f64) -> Self {
        Self { c: [x, 0.0, 0.0] }
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, r: Jet) -> Jet {
        Jet::new(
            self.c[0] + r.c[0],
            self.c[1] + r.c[1],
            self.c[2] + r.c[2],
        )
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, r: Jet) -> Jet {
        Jet::new(
            self.c[0] - r.c[0],
            self.c[1] - r.c[1],
            self.c[2] - r.c[2],
        )
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, r: Jet) -> Jet {
        let a = self.c;
        let b = r.c;
        Jet::new(
            a[0] * b[0],
            a[0] * b[1] + a[1] * b[0],
            a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
        )
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        Jet::new(-self.c[0], -self.c[1], -self.c[2])
    }
}

impl Scalar for Jet {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Jet::constant(x)
    }
    #[inline]
    fn re(&self) -> f64 {
        self.c[0]
    }

    /// Jet division. When numerator and denominator both vanish at t = 0
    /// (the resonant index of the logarithmic construction) the common
    /// factor t cancels; the t^2 slot of the quotient is then unknown and
    /// set to zero. At most one such division occurs per solution branch,
    /// and only the t^0 and t^1 slots are read afterwards, so nothing
    /// downstream observes the missing order.
    fn checked_div(self, rhs: Self) -> Result<Self> {
        let a = self.c;
        let b = rhs.c;
        if b[0] != 0.0 {
            let q0 = a[0] / b[0];
            let q1 = (a[1] - q0 * b[1]) / b[0];
            let q2 = (a[2] - q0 * b[2] - q1 * b[1]) / b[0];
            return Ok(Jet::new(q0, q1, q2));
        }
        if a[0] != 0.0 {
            return Err(Error::Domain(
                "jet division: pole (numerator nonzero, denominator zero)".into(),
            ));
        }
        if b[1] == 0.0 {
            return Err(Error::Domain(
                "jet division: denominator vanishes to second order".into(),
            ));
        }
        let q0 = a[1] / b[1];
        let q1 = (a[2] - q0 * b[2]) / b[1];
        Ok(Jet::new(q0, q1, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_differentiates_rational_functions() {
        // f(x) = (x + 2) / (x * (x + 1)); f'(x) by hand at x = 2
        let x = Dual::variable(2.0);
        let f = (x + Dual::constant(2.0)) / (x * (x + Dual::constant(1.0)));
        let fx = |x: f64| (x + 2.0) / (x * (x + 1.0));
        assert!((f.re - fx(2.0)).abs() < 1e-15);
        let h = 1e-6;
        let fd = (fx(2.0 + h) - fx(2.0 - h)) / (2.0 * h);
        assert!((f.de - fd).abs() < 1e-9);
    }

    #[test]
    fn jet_cancels_common_t_factor() {
        // (t + 3 t^2) / (2 t - t^2) = 1/2 + (7/4) t + O(t^2)
        let num = Jet::new(0.0, 1.0, 3.0);
        let den = Jet::new(0.0, 2.0, -1.0);
        let q = num.checked_div(den).unwrap();
        assert!((q.c[0] - 0.5).abs() < 1e-15);
        assert!((q.c[1] - 1.75).abs() < 1e-15);
    }

    #[test]
    fn jet_reports_true_pole() {
        let num = Jet::new(1.0, 0.0, 0.0);
        let den = Jet::new(0.0, 2.0, 0.0);
        assert!(num.checked_div(den).is_err());
    }
}
