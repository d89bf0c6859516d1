//! Series-solution coefficients from the three-term recurrence
//! C_{n+1} = A_n C_n + B_n C_{n-1},
//!   A_n = -eps (n + lambda + omega) / ((n + lambda + 1)(n + lambda + nu)),
//!   B_n = -(Omega + mu (n + lambda - 1)) / ((n + lambda + 1)(n + lambda + nu)),
//! split to first order in eps into even/odd families, plus polynomial
//! termination detection.
//!
//! The two termination conditions Omega = -2 mu alpha0 and
//! Omega = -2 mu (alpha1 + 1/2) cannot hold for one Omega, so the
//! polynomial construction applies them per family: odd-index B factors
//! (which build even powers) carry the alpha0 eigenvalue, even-index B
//! factors carry the alpha1 one. That is the only reading under which both
//! families terminate simultaneously, and it reproduces the closed forms
//! exactly.

use crate::dual::{Dual, Scalar};
use crate::error::{Error, Result};
use crate::params::{GchParams, TerminationSpec};
use crate::series::KahanSum;
use crate::special::{gamma_ratio, pochhammer};

const INTEGER_TOL: f64 = 1e-9;

/// A_n of the recurrence at the given indicial shift.
pub fn coeff_a(n: u32, lambda: f64, p: &GchParams) -> Result<f64> {
    let den = denom(n, lambda, p);
    if den == 0.0 {
        return Err(Error::Resonance { n, lambda });
    }
    Ok(-p.eps * (n as f64 + lambda + p.omega) / den)
}

/// A_n with the eps factor removed; finite and meaningful at eps = 0.
pub fn coeff_a_reduced(n: u32, lambda: f64, p: &GchParams) -> Result<f64> {
    let den = denom(n, lambda, p);
    if den == 0.0 {
        return Err(Error::Resonance { n, lambda });
    }
    Ok(-(n as f64 + lambda + p.omega) / den)
}

/// B_n of the recurrence; `which_omega` selects the eigenvalue the factor
/// carries (the even and odd families terminate under different ones).
pub fn coeff_b(n: u32, lambda: f64, p: &GchParams, which_omega: f64) -> Result<f64> {
    let den = denom(n, lambda, p);
    if den == 0.0 {
        return Err(Error::Resonance { n, lambda });
    }
    Ok(-(which_omega + p.mu * (n as f64 + lambda - 1.0)) / den)
}

#[inline]
fn denom(n: u32, lambda: f64, p: &GchParams) -> f64 {
    (n as f64 + lambda + 1.0) * (n as f64 + lambda + p.nu)
}

/// One exact recurrence pass in any scalar (value, dual, jet), full in eps,
/// single Omega. Organized numerator-over-denominator so that the resonant
/// step of the logarithmic construction cancels its common factor inside
/// the jet division.
pub(crate) fn raw_series<S: Scalar>(p: &GchParams, lam: S, c0: S, cap: usize) -> Result<Vec<S>> {
    let mut c: Vec<S> = Vec::with_capacity(cap + 1);
    c.push(c0);
    let zero = S::from_f64(0.0);
    for m in 0..cap {
        let mf = S::from_f64(m as f64);
        let prev = if m == 0 { zero } else { c[m - 1] };
        let num = -(S::from_f64(p.eps) * (mf + lam + S::from_f64(p.omega))) * c[m]
            - (S::from_f64(p.cap_omega) + S::from_f64(p.mu) * (mf + lam - S::from_f64(1.0)))
                * prev;
        let den = (mf + lam + S::from_f64(1.0)) * (mf + lam + S::from_f64(p.nu));
        let next = num.checked_div(den).map_err(|_| Error::Resonance {
            n: m as u32 + 1,
            lambda: lam.re(),
        })?;
        c.push(next);
    }
    Ok(c)
}

/// Exact coefficients C_0..C_cap at a fixed indicial root (C_0 = 1).
pub fn series_at(p: &GchParams, lambda: f64, cap: usize) -> Result<Vec<f64>> {
    raw_series(p, lambda, 1.0, cap)
}

/// Exact coefficients carrying d/d-lambda, for derivative checks against
/// finite differences.
pub fn series_with_lambda_derivative(
    p: &GchParams,
    lambda: f64,
    cap: usize,
) -> Result<Vec<Dual>> {
    raw_series(p, Dual::variable(lambda), Dual::constant(1.0), cap)
}

/// Which family a single-Omega termination lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermFamily {
    /// B_{2k+1} vanishes: the even-power (eps^0) series terminates.
    Even,
    /// B_{2k+2} vanishes: the odd-power (eps^1) series terminates.
    Odd,
}

/// Termination found for the stored Omega on one indicial branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TerminationHit {
    pub family: TermFamily,
    pub index: u32,
}

/// Indicial branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaBranch {
    Root0,
    Root1MinusNu,
}

/// Tests the stored Omega against the eigenvalue ladders of the chosen
/// branch. Returns `None` when neither ratio is a non-negative integer
/// within 1e-9 (the infinite-series regime).
pub fn detect_termination(p: &GchParams, branch: LambdaBranch) -> Option<TerminationHit> {
    let base = -p.cap_omega / (2.0 * p.mu);
    let (even_idx, odd_idx) = match branch {
        LambdaBranch::Root0 => (base, base - 0.5),
        LambdaBranch::Root1MinusNu => (base + p.gamma() - 1.0, base + p.gamma() - 1.5),
    };
    for (family, v) in [(TermFamily::Even, even_idx), (TermFamily::Odd, odd_idx)] {
        let r = v.round();
        if (v - r).abs() <= INTEGER_TOL && r >= 0.0 {
            return Some(TerminationHit {
                family,
                index: r as u32,
            });
        }
    }
    None
}

/// Series solution: coefficients of x^{power+lambda}, split by eps order,
/// with an optional ln(x) part for the logarithmic constructions.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub lambda: f64,
    /// eps^0 coefficients by power (for the generic engine these are the
    /// full coefficients, not an eps split).
    pub eps0: Vec<f64>,
    /// eps^1 coefficients by power, with the eps factor taken out.
    pub eps1: Vec<f64>,
    /// Coefficients of ln(x) * x^{power+lambda}; empty when no log part.
    pub log_coeffs: Vec<f64>,
    pub truncated_at: Option<u32>,
    pub terminated: bool,
}

impl SeriesSolution {
    pub fn coeff(&self, eps_order: u8, power: u32) -> f64 {
        let v = match eps_order {
            0 => &self.eps0,
            1 => &self.eps1,
            _ => return 0.0,
        };
        v.get(power as usize).copied().unwrap_or(0.0)
    }

    pub fn log_coeff(&self, power: u32) -> f64 {
        self.log_coeffs.get(power as usize).copied().unwrap_or(0.0)
    }

    pub fn has_log(&self) -> bool {
        self.log_coeffs.iter().any(|&c| c != 0.0)
    }

    /// x^lambda (P0(x) + eps P1(x)) + ln(x) x^lambda PL(x)
    pub fn eval(&self, x: f64, eps: f64) -> f64 {
        let xl = x.powf(self.lambda);
        let mut v = xl * (poly(&self.eps0, x) + eps * poly(&self.eps1, x));
        if !self.log_coeffs.is_empty() {
            v += x.ln() * xl * poly(&self.log_coeffs, x);
        }
        v
    }

    /// Analytic derivative of [`Self::eval`] with respect to x.
    pub fn eval_deriv(&self, x: f64, eps: f64) -> f64 {
        let xl = x.powf(self.lambda);
        let mut v = xl / x
            * (poly_shifted_deriv(&self.eps0, x, self.lambda)
                + eps * poly_shifted_deriv(&self.eps1, x, self.lambda));
        if !self.log_coeffs.is_empty() {
            let pl = poly(&self.log_coeffs, x);
            v += xl / x * (pl + x.ln() * poly_shifted_deriv(&self.log_coeffs, x, self.lambda));
        }
        v
    }
}

fn poly(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &ck in c.iter().rev() {
        acc = acc * x + ck;
    }
    acc
}

/// sum (power + lambda) c_p x^p, i.e. x^{1-lambda} d/dx applied to
/// x^lambda P(x).
fn poly_shifted_deriv(c: &[f64], x: f64, lambda: f64) -> f64 {
    let mut acc = 0.0;
    for (p, &ck) in c.iter().enumerate().rev() {
        acc = acc * x + (p as f64 + lambda) * ck;
    }
    acc
}

/// First-order split coefficients from the recurrence. With a
/// `TerminationSpec` the per-family eigenvalues are used and the result
/// terminates exactly; without one the stored Omega drives both families up
/// to `power_cap`.
pub fn build_coefficients(
    p: &GchParams,
    lambda: f64,
    term: Option<TerminationSpec>,
    power_cap: u32,
) -> Result<SeriesSolution> {
    if power_cap < 1 {
        return Err(Error::InvalidParam {
            field: "power_cap",
            constraint: "must be >= 1".into(),
        });
    }
    let cap = power_cap as usize;
    let (omega_even, omega_odd) = match term {
        Some(t) => (p.omega_even(t.alpha0), p.omega_odd(t.alpha1)),
        None => (p.cap_omega, p.cap_omega),
    };

    // even family: C_{2n} = prod_{k<n} B_{2k+1}
    let mut eps0 = vec![0.0; cap + 1];
    eps0[0] = 1.0;
    let n_even_max = cap / 2;
    let mut b_odd_prefix = Vec::with_capacity(n_even_max + 1); // prefix products of B_{2k+1}
    b_odd_prefix.push(1.0);
    for n in 1..=n_even_max {
        let b = coeff_b(2 * (n as u32) - 1, lambda, p, omega_even)?;
        let prod = b_odd_prefix[n - 1] * b;
        b_odd_prefix.push(prod);
        eps0[2 * n] = prod;
    }

    // odd family, eps factored out:
    // C_{2n+1}/eps = sum_{j=0}^{n} a_red(2j) prod_{p=j}^{n-1} B_{2p+2} prod_{k<j} B_{2k+1}
    let mut eps1 = vec![0.0; cap + 1];
    let n_odd_max = (cap.saturating_sub(1)) / 2;
    if p.eps != 0.0 {
        // suffix products of B_{2p+2} are rebuilt per n; cap is small
        for n in 0..=n_odd_max {
            let mut total = KahanSum::new();
            for j in 0..=n {
                let mut t = coeff_a_reduced(2 * j as u32, lambda, p)?;
                for q in j..n {
                    t *= coeff_b(2 * (q as u32) + 2, lambda, p, omega_odd)?;
                }
                t *= b_odd_prefix[j.min(b_odd_prefix.len() - 1)];
                total.add(t);
            }
            eps1[2 * n + 1] = total.value();
        }
    }

    let terminated = term.is_some();
    Ok(SeriesSolution {
        lambda,
        eps0,
        eps1,
        log_coeffs: Vec::new(),
        truncated_at: if terminated { None } else { Some(power_cap) },
        terminated,
    })
}

/// Closed-form coefficients of the first-kind polynomial, re-expressed in
/// powers of x through z = -mu x^2/2 and normalized with
/// C_0 = Gamma(gamma + alpha0)/Gamma(gamma).
pub fn closed_form_coefficients(term: TerminationSpec, p: &GchParams) -> Result<SeriesSolution> {
    let g = p.gamma();
    let a0 = term.alpha0;
    let a1 = term.alpha1;
    let c0 = gamma_ratio(&[g + a0 as f64], &[g])?;
    let half_mu = -p.mu / 2.0; // z = half_mu * x^2

    let cap = (2 * a1 + 1).max(2 * a0) as usize;
    let mut eps0 = vec![0.0; cap + 1];
    for n in 0..=a0 {
        let v = c0 * pochhammer(-(a0 as f64), n)
            / (factorial_f(n) * pochhammer(g, n))
            * half_mu.powi(n as i32);
        eps0[2 * n as usize] = v;
    }

    let mut eps1 = vec![0.0; cap + 1];
    if p.eps != 0.0 {
        for cap_n in 0..=a1 {
            let mut sum = KahanSum::new();
            for n in 0..=cap_n.min(a0) {
                let k = cap_n - n;
                if k > a1 - n {
                    continue;
                }
                let ratio = gamma_ratio(
                    &[n as f64 + 0.5, n as f64 + g - 0.5],
                    &[cap_n as f64 + 1.5, cap_n as f64 + g + 0.5],
                )?;
                sum.add(
                    pochhammer(-(a0 as f64), n) / (factorial_f(n) * pochhammer(g, n))
                        * (n as f64 + p.omega / 2.0)
                        * ratio
                        * pochhammer(n as f64 - a1 as f64, k),
                );
            }
            eps1[2 * cap_n as usize + 1] = -0.5 * c0 * half_mu.powi(cap_n as i32) * sum.value();
        }
    }

    Ok(SeriesSolution {
        lambda: 0.0,
        eps0,
        eps1,
        log_coeffs: Vec::new(),
        truncated_at: None,
        terminated: true,
    })
}

fn factorial_f(n: u32) -> f64 {
    let mut p = 1.0;
    for k in 2..=n {
        p *= k as f64;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(gamma: f64, mu: f64, eps: f64) -> GchParams {
        GchParams::from_gamma(mu, eps, gamma, 0.0).unwrap()
    }

    #[test]
    fn a0_is_minus_half_eps() {
        // omega = nu/2 forces A_0 = -eps/2 at lambda = 0
        for nu in [0.5, 2.0, 3.7] {
            let p = GchParams::new(-1.0, 0.01, nu, 0.0).unwrap();
            let a0 = coeff_a(0, 0.0, &p).unwrap();
            assert!((a0 + 0.005).abs() < 1e-17, "nu={nu}");
        }
    }

    #[test]
    fn coeff_a_vanishes_at_zero_eps() {
        let p = GchParams::new(-1.0, 0.0, 2.0, 0.0).unwrap();
        assert_eq!(coeff_a(5, 0.0, &p).unwrap(), 0.0);
    }

    #[test]
    fn coeff_a_direct_substitution() {
        // n=2, lambda=0, nu=3, omega=1.5, eps=0.01
        let p = GchParams::new(-1.0, 0.01, 3.0, 0.0).unwrap();
        let want = -0.01 * 3.5 / (3.0 * 5.0);
        assert!((coeff_a(2, 0.0, &p).unwrap() - want).abs() < 1e-18);
    }

    #[test]
    fn coeff_b_termination_zeros() {
        let p = GchParams::new(-1.5, 0.001, 2.4, 0.0).unwrap();
        // Omega = -2 mu alpha0 makes B_{2 alpha0 + 1} vanish
        for alpha0 in [0u32, 1, 3] {
            let b = coeff_b(2 * alpha0 + 1, 0.0, &p, p.omega_even(alpha0)).unwrap();
            assert_eq!(b, 0.0, "alpha0={alpha0}");
        }
        // Omega = -2 mu (alpha1 + 1/2) makes B_{2 alpha1 + 2} vanish
        for alpha1 in [0u32, 2] {
            let b = coeff_b(2 * alpha1 + 2, 0.0, &p, p.omega_odd(alpha1)).unwrap();
            assert_eq!(b, 0.0, "alpha1={alpha1}");
        }
    }

    #[test]
    fn resonance_raises() {
        let p = GchParams::new(-1.0, 0.01, 2.0, 0.0).unwrap();
        // lambda = 1 - nu = -1: denominator (n+lambda+1)(n+lambda+nu) = n(n+1) = 0 at n=0
        assert!(matches!(
            coeff_b(0, -1.0, &p, 1.0),
            Err(Error::Resonance { .. })
        ));
        assert!(build_coefficients(&p, -1.0, None, 8).is_err());
    }

    #[test]
    fn build_matches_bracket_examples() {
        let p = GchParams::new(-1.0, 1e-3, 2.0, 0.0).unwrap();
        let t = TerminationSpec::new(2, 3).unwrap();
        let s = build_coefficients(&p, 0.0, Some(t), 12).unwrap();
        // C_2 = B_1
        let b1 = coeff_b(1, 0.0, &p, p.omega_even(2)).unwrap();
        assert!((s.coeff(0, 2) - b1).abs() < 1e-16);
        // C_3 = eps (a0_red B_2 + a2_red B_1)
        let want = coeff_a_reduced(0, 0.0, &p).unwrap() * coeff_b(2, 0.0, &p, p.omega_odd(3)).unwrap()
            + coeff_a_reduced(2, 0.0, &p).unwrap() * b1;
        assert!((s.coeff(1, 3) - want).abs() < 1e-15 * want.abs());
    }

    #[test]
    fn termination_zeroes_beyond_cutoff() {
        let p = GchParams::new(-2.0, 1e-3, 4.0, 0.0).unwrap();
        let t = TerminationSpec::new(1, 2).unwrap();
        let s = build_coefficients(&p, 0.0, Some(t), 16).unwrap();
        for n in 2..=8u32 {
            assert_eq!(s.coeff(0, 2 * n), 0.0, "even power {}", 2 * n);
        }
        for n in 3..=7u32 {
            assert_eq!(s.coeff(1, 2 * n + 1), 0.0, "odd power {}", 2 * n + 1);
        }
        assert!(s.terminated);
    }

    #[test]
    fn closed_form_agrees_with_recurrence() {
        // the stated grid of the recurrence oracle
        for gamma in [0.3, 1.5, 2.7] {
            for a0 in 0..=6u32 {
                for a1 in a0..=6u32 {
                    let p = GchParams::from_gamma(-1.0, 1e-3, gamma, 0.0).unwrap();
                    let t = TerminationSpec::new(a0, a1).unwrap();
                    let built = build_coefficients(&p, 0.0, Some(t), 2 * a1 + 2).unwrap();
                    let closed = closed_form_coefficients(t, &p).unwrap();
                    let c0 = gamma_ratio(&[gamma + a0 as f64], &[gamma]).unwrap();
                    for pw in 0..=(2 * a1 + 1) {
                        for ord in [0u8, 1] {
                            let b = built.coeff(ord, pw) * c0;
                            let c = closed.coeff(ord, pw);
                            let scale = b.abs().max(c.abs());
                            if scale > 0.0 {
                                assert!(
                                    (b - c).abs() <= 1e-12 * scale,
                                    "gamma={gamma} a=({a0},{a1}) ord={ord} power={pw}: {b} vs {c}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn zero_eps_zeroes_odd_family() {
        let p = GchParams::new(-1.0, 0.0, 2.0, 0.0).unwrap();
        let t = TerminationSpec::new(2, 3).unwrap();
        let s = build_coefficients(&p, 0.0, Some(t), 12).unwrap();
        assert!(s.eps1.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn detection_examples() {
        // Omega = 6, mu = -1: even family at alpha0 = 3
        let p = GchParams::new(-1.0, 0.0, 2.0, 6.0).unwrap();
        assert_eq!(
            detect_termination(&p, LambdaBranch::Root0),
            Some(TerminationHit {
                family: TermFamily::Even,
                index: 3
            })
        );
        // Omega = 5: odd family at alpha1 = 2
        let p = GchParams::new(-1.0, 0.0, 2.0, 5.0).unwrap();
        assert_eq!(
            detect_termination(&p, LambdaBranch::Root0),
            Some(TerminationHit {
                family: TermFamily::Odd,
                index: 2
            })
        );
        // irrational ratio: none
        let p = GchParams::new(-1.0, 0.0, 2.0, std::f64::consts::PI).unwrap();
        assert_eq!(detect_termination(&p, LambdaBranch::Root0), None);
        // second branch shifts by gamma
        let p = GchParams::new(-1.0, 0.0, 4.0, 2.0 * (3.0 - 2.5 + 1.0)).unwrap();
        // gamma = 2.5; psi0 = -Omega/(2 mu) + gamma - 1 = 1.5 + 1.5 = 3
        assert_eq!(
            detect_termination(&p, LambdaBranch::Root1MinusNu),
            Some(TerminationHit {
                family: TermFamily::Even,
                index: 3
            })
        );
    }

    #[test]
    fn dual_derivative_matches_finite_difference() {
        let p = GchParams::new(-1.0, 1e-3, 2.4, 1.7).unwrap();
        let lam = 0.3;
        let cap = 10;
        let dual = series_with_lambda_derivative(&p, lam, cap).unwrap();
        let h = 1e-6;
        let up = series_at(&p, lam + h, cap).unwrap();
        let dn = series_at(&p, lam - h, cap).unwrap();
        for n in 1..=cap {
            let fd = (up[n] - dn[n]) / (2.0 * h);
            assert!(
                (dual[n].de - fd).abs() <= 1e-6 * fd.abs().max(1e-8),
                "n={n}: {} vs {fd}",
                dual[n].de
            );
        }
    }
}
