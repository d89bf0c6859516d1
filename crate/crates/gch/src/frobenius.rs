//! Generic Frobenius solver at the regular singular point x = 0, covering
//! the five indicial configurations: distinct non-integer roots, a double
//! root, and roots separated by an integer. The logarithmic branches come
//! from differentiating (lambda - lambda_small) G(x, lambda) in lambda with
//! jet arithmetic; no symbolic algebra and no finite differences.
//!
//! Unlike the first-order split of `recurrence`, this engine runs the exact
//! three-term recurrence with the stored Omega, so its output solves the
//! full equation to rounding and the Abel identity holds at every eps.

use crate::dual::Jet;
use crate::error::{Error, Result};
use crate::params::GchParams;
use crate::recurrence::{raw_series, SeriesSolution};

const INTEGER_TOL: f64 = 1e-9;

/// Indicial classification cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem1Case {
    /// nu < 1, non-integer root difference: two plain Frobenius solutions.
    A,
    /// nu = 1: double root, second solution carries d/d-lambda.
    B,
    /// nu a non-positive integer: integer separation, log branch at 0.
    C,
    /// nu > 1, non-integer difference: two plain solutions.
    D,
    /// nu an integer >= 2: integer separation, log branch at 1 - nu.
    E,
}

/// The case the indicial roots 0 and 1-nu actually select.
pub fn expected_case(nu: f64) -> Theorem1Case {
    let diff = nu - 1.0; // |lambda1 - lambda2|
    let integer = (diff - diff.round()).abs() <= INTEGER_TOL;
    if !integer {
        return if nu < 1.0 {
            Theorem1Case::A
        } else {
            Theorem1Case::D
        };
    }
    if (nu - 1.0).abs() <= INTEGER_TOL {
        Theorem1Case::B
    } else if nu < 1.0 {
        Theorem1Case::C
    } else {
        Theorem1Case::E
    }
}

/// Two independent solutions of the full equation.
///
/// The first comes from a plain series at the larger root. For non-integer
/// separation the second is the plain series at the smaller root; for
/// integer separation N it is d/d-lambda of (lambda - lambda_small)^min(N,1)
/// G(x, lambda) at the smaller root, whose ln(x) part appears in
/// `log_coeffs` (and is identically zero exactly when no log is needed).
pub fn frobenius_solve(
    p: &GchParams,
    which_case: Theorem1Case,
    power_cap: u32,
) -> Result<(SeriesSolution, SeriesSolution)> {
    let expected = expected_case(p.nu);
    if which_case != expected {
        return Err(Error::CaseMismatch(format!(
            "nu = {} selects case {:?}, not {:?}",
            p.nu, expected, which_case
        )));
    }
    let cap = power_cap as usize;
    let root_a = 0.0;
    let root_b = 1.0 - p.nu;
    let (hi, lo) = if root_a >= root_b {
        (root_a, root_b)
    } else {
        (root_b, root_a)
    };
    let delta = hi - lo;

    let g1 = plain_solution(p, hi, cap)?;

    let integer_sep = (delta - delta.round()).abs() <= INTEGER_TOL;
    if !integer_sep {
        let g2 = plain_solution(p, lo, cap)?;
        return Ok((g1, g2));
    }

    let n_sep = delta.round() as usize;
    let c0 = if n_sep == 0 {
        Jet::constant(1.0)
    } else {
        // the (lambda - lo) prefactor that regularizes the resonant step
        Jet::new(0.0, 1.0, 0.0)
    };
    let jets = raw_series(p, Jet::variable(lo), c0, cap)?;
    let log_coeffs: Vec<f64> = jets.iter().map(|j| j.c[0]).collect();
    let series: Vec<f64> = jets.iter().map(|j| j.c[1]).collect();
    let has_log = log_coeffs.iter().any(|&c| c != 0.0);
    let g2 = SeriesSolution {
        lambda: lo,
        eps0: series,
        eps1: Vec::new(),
        log_coeffs: if has_log { log_coeffs } else { Vec::new() },
        truncated_at: Some(power_cap),
        terminated: false,
    };
    Ok((g1, g2))
}

fn plain_solution(p: &GchParams, lambda: f64, cap: usize) -> Result<SeriesSolution> {
    Ok(SeriesSolution {
        lambda,
        eps0: raw_series(p, lambda, 1.0, cap)?,
        eps1: Vec::new(),
        log_coeffs: Vec::new(),
        truncated_at: Some(cap as u32),
        terminated: false,
    })
}

/// Residual of the full equation at one point for a candidate solution.
pub fn ode_residual(sol: &SeriesSolution, p: &GchParams, x: f64) -> f64 {
    // second derivative from the series directly
    let eps = p.eps;
    let h = 1e-5 * x.max(1e-3);
    // analytic first derivative; second by central difference of it
    let d1 = sol.eval_deriv(x, eps);
    let d2 = (sol.eval_deriv(x + h, eps) - sol.eval_deriv(x - h, eps)) / (2.0 * h);
    let g = sol.eval(x, eps);
    x * d2 + (p.mu * x * x + eps * x + p.nu) * d1 + (p.cap_omega * x + eps * p.omega) * g
}

/// W(g1, g2)(x) * x^nu * exp(mu x^2/2 + eps x); constant along x for true
/// solution pairs by the Abel identity.
pub fn abel_product(g1: &SeriesSolution, g2: &SeriesSolution, p: &GchParams, x: f64) -> f64 {
    let w = g1.eval(x, p.eps) * g2.eval_deriv(x, p.eps)
        - g2.eval(x, p.eps) * g1.eval_deriv(x, p.eps);
    w * x.powf(p.nu) * (p.mu * x * x / 2.0 + p.eps * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nu: f64, eps: f64, cap_omega: f64) -> GchParams {
        GchParams::new(-1.0, eps, nu, cap_omega).unwrap()
    }

    /// Exact-series second derivative residual, all terms analytic.
    fn residual_analytic(sol: &SeriesSolution, p: &GchParams, x: f64) -> f64 {
        // evaluate term-wise: for series sum c_n x^{n+lam} (+ log part)
        let lam = sol.lambda;
        let mut acc = 0.0;
        for (n, &c) in sol.eps0.iter().enumerate() {
            let e = n as f64 + lam;
            acc += c
                * (x.powf(e - 1.0) * e * (e - 1.0)
                    + (p.mu * x * x + p.eps * x + p.nu) * e * x.powf(e - 1.0)
                    + (p.cap_omega * x + p.eps * p.omega) * x.powf(e));
        }
        for (n, &c) in sol.log_coeffs.iter().enumerate() {
            let e = n as f64 + lam;
            let lx = x.ln();
            // L[x^e ln x] = ln x L[x^e] + 2 e x^{e-1} - x^{e-1} + (mu x^2 + eps x + nu) x^{e-1}
            acc += c
                * (lx
                    * (x.powf(e - 1.0) * e * (e - 1.0)
                        + (p.mu * x * x + p.eps * x + p.nu) * e * x.powf(e - 1.0)
                        + (p.cap_omega * x + p.eps * p.omega) * x.powf(e))
                    + x.powf(e - 1.0) * (2.0 * e - 1.0)
                    + (p.mu * x * x + p.eps * x + p.nu) * x.powf(e - 1.0));
        }
        acc
    }

    #[test]
    fn case_selection() {
        assert_eq!(expected_case(0.5), Theorem1Case::A);
        assert_eq!(expected_case(1.0), Theorem1Case::B);
        assert_eq!(expected_case(0.0), Theorem1Case::C);
        assert_eq!(expected_case(-2.0), Theorem1Case::C);
        assert_eq!(expected_case(2.5), Theorem1Case::D);
        assert_eq!(expected_case(3.0), Theorem1Case::E);
        let p = params(0.5, 1e-3, 1.0);
        assert!(frobenius_solve(&p, Theorem1Case::B, 16).is_err());
    }

    #[test]
    fn non_integer_nu_gives_two_plain_solutions() {
        let p = params(0.5, 1e-3, 1.3);
        let (g1, g2) = frobenius_solve(&p, Theorem1Case::A, 60).unwrap();
        assert!(!g1.has_log());
        assert!(!g2.has_log());
        assert_eq!(g1.lambda, 0.5); // 1 - nu is the larger root here
        assert_eq!(g2.lambda, 0.0);
        for x in [0.3, 0.7, 1.2] {
            assert!(residual_analytic(&g1, &p, x).abs() < 1e-10, "x={x}");
            assert!(residual_analytic(&g2, &p, x).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn double_root_has_log_second_solution() {
        let p = params(1.0, 1e-3, 2.0);
        let (g1, g2) = frobenius_solve(&p, Theorem1Case::B, 60).unwrap();
        assert!(g2.has_log());
        for x in [0.3, 0.7, 1.2] {
            assert!(residual_analytic(&g1, &p, x).abs() < 1e-9, "x={x}");
            assert!(residual_analytic(&g2, &p, x).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn integer_separations_solve_the_equation() {
        for nu in [-2.0, 0.0, 3.0] {
            let p = params(nu, 1e-3, 1.7);
            let case = expected_case(nu);
            let (g1, g2) = frobenius_solve(&p, case, 70).unwrap();
            for x in [0.3, 0.7, 1.2] {
                let r1 = residual_analytic(&g1, &p, x).abs();
                let r2 = residual_analytic(&g2, &p, x).abs();
                assert!(r1 < 1e-9, "nu={nu} x={x} r1={r1}");
                assert!(r2 < 1e-9, "nu={nu} x={x} r2={r2}");
            }
        }
    }

    #[test]
    fn abel_product_constant_for_engine_pairs() {
        for nu in [0.5, 1.0, 3.0] {
            let p = params(nu, 1e-3, 1.1);
            let (g1, g2) = frobenius_solve(&p, expected_case(nu), 80).unwrap();
            let base = abel_product(&g1, &g2, &p, 1.0);
            assert!(base.abs() > 1e-12, "independent pair expected, nu={nu}");
            let mut x = 0.2;
            while x <= 3.0 {
                let v = abel_product(&g1, &g2, &p, x);
                assert!(
                    (v - base).abs() <= 1e-8 * base.abs(),
                    "nu={nu} x={x}: {v} vs {base}"
                );
                x += 0.2;
            }
        }
    }
}
