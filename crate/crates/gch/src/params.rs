//! Coefficient bundle of the generalized equation
//! x g'' + (mu x^2 + eps x + nu) g' + (Omega x + eps omega) g = 0
//! and the eigennumber pair that terminates its series solutions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ODE coefficients. `omega = nu/2` is enforced at construction: the
/// physics mapping guarantees it and the closed forms rely on it, so a free
/// omega is rejected rather than silently accepted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GchParams {
    pub mu: f64,
    pub eps: f64,
    pub nu: f64,
    pub omega: f64,
    pub cap_omega: f64,
}

impl GchParams {
    /// Build from (mu, eps, nu, Omega); omega is derived as nu/2.
    pub fn new(mu: f64, eps: f64, nu: f64, cap_omega: f64) -> Result<Self> {
        if !(mu < 0.0) {
            return Err(Error::InvalidParam {
                field: "mu",
                constraint: format!("must be negative for normalizable solutions, got {mu}"),
            });
        }
        if !mu.is_finite() || !eps.is_finite() || !nu.is_finite() || !cap_omega.is_finite() {
            return Err(Error::InvalidParam {
                field: "params",
                constraint: "all coefficients must be finite".into(),
            });
        }
        Ok(Self {
            mu,
            eps,
            nu,
            omega: nu / 2.0,
            cap_omega,
        })
    }

    /// Same bundle specified through gamma = (1+nu)/2 instead of nu.
    pub fn from_gamma(mu: f64, eps: f64, gamma: f64, cap_omega: f64) -> Result<Self> {
        Self::new(mu, eps, 2.0 * gamma - 1.0, cap_omega)
    }

    /// Derived gamma = (1+nu)/2; never stored independently.
    #[inline]
    pub fn gamma(&self) -> f64 {
        (1.0 + self.nu) / 2.0
    }

    /// True when |eps/2| is outside the perturbative regime the expansion
    /// assumes.
    pub fn large_eps_warning(&self) -> bool {
        (self.eps / 2.0).abs() >= 0.1
    }

    /// Eigenvalue that terminates the even (eps^0) family at power 2*alpha0.
    pub fn omega_even(&self, alpha0: u32) -> f64 {
        -2.0 * self.mu * alpha0 as f64
    }

    /// Eigenvalue that terminates the odd (eps^1) family at power 2*alpha1+1.
    pub fn omega_odd(&self, alpha1: u32) -> f64 {
        -2.0 * self.mu * (alpha1 as f64 + 0.5)
    }

    /// z = -mu x^2 / 2, non-negative along the real line for mu < 0.
    #[inline]
    pub fn z_of_x(&self, x: f64) -> f64 {
        -self.mu * x * x / 2.0
    }

    /// x = sqrt(2 z / |mu|), the inverse of [`Self::z_of_x`] on x >= 0.
    #[inline]
    pub fn x_of_z(&self, z: f64) -> f64 {
        (2.0 * z / self.mu.abs()).sqrt()
    }
}

/// Eigennumber pair (|alpha0|, |alpha1|) of a first-kind polynomial; the
/// solution exists only for alpha0 <= alpha1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TerminationSpec {
    pub alpha0: u32,
    pub alpha1: u32,
}

impl TerminationSpec {
    pub fn new(alpha0: u32, alpha1: u32) -> Result<Self> {
        if alpha0 > alpha1 {
            return Err(Error::InvalidParam {
                field: "alpha0",
                constraint: format!("termination requires alpha0 <= alpha1, got ({alpha0}, {alpha1})"),
            });
        }
        Ok(Self { alpha0, alpha1 })
    }
}
