//! Scalar special-function primitives consumed by every other module:
//! gamma family, Pochhammer, beta, Laguerre polynomials, Kummer M and U,
//! Gauss 2F1, Appell F1, the error function, and the Kummer addition
//! theorem.
//!
//! All gamma ratios go through [`log_gamma`] differences; arguments such as
//! Gamma(alpha0 + gamma) overflow long before the ratios do.

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk;
use crate::series::{is_nonpositive_integer, KahanSum, SeriesControl, TailStop};

const INTEGER_TOL: f64 = 1e-9;

/// ln |Gamma(x)| together with the sign of Gamma(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogGamma {
    pub ln_abs: f64,
    pub sign: f64,
}

// B_{2k} / (2k (2k-1)) for the Stirling tail, k = 1..=7.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_74;

fn stirling_ln_gamma(x: f64) -> f64 {
    let mut tail = 0.0;
    let x2 = x * x;
    let mut xp = x;
    for c in STIRLING {
        tail += c / xp;
        xp *= x2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + tail
}

/// Natural log of |Gamma(x)| with the sign carried separately.
///
/// Stirling with Bernoulli correction for x >= 10, upward recurrence below,
/// reflection for negative arguments. Errors at the poles.
pub fn log_gamma(x: f64) -> Result<SignedLogGamma> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma of non-finite {x}")));
    }
    if is_nonpositive_integer(x, 0.0) {
        return Err(Error::GammaPole { arg: x });
    }
    if x > 0.0 {
        if x >= 10.0 {
            return Ok(SignedLogGamma {
                ln_abs: stirling_ln_gamma(x),
                sign: 1.0,
            });
        }
        // shift into [10, 11)
        let mut shift = 0.0f64;
        let mut y = x;
        while y < 10.0 {
            shift += y.ln();
            y += 1.0;
        }
        return Ok(SignedLogGamma {
            ln_abs: stirling_ln_gamma(y) - shift,
            sign: 1.0,
        });
    }
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    let refl = log_gamma(1.0 - x)?;
    // sin(pi x) via the fractional part for accuracy at large |x|
    let r = x - x.floor();
    let sin_pi = (std::f64::consts::PI * r).sin();
    if sin_pi == 0.0 {
        return Err(Error::GammaPole { arg: x });
    }
    // floor(x) even => sin(pi x) > 0
    let sign_sin = if (x.floor() as i64) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(SignedLogGamma {
        ln_abs: std::f64::consts::PI.ln() - sin_pi.abs().ln() - refl.ln_abs,
        sign: sign_sin * refl.sign,
    })
}

/// Gamma(x) itself; overflows to an error above ~171.6.
pub fn gamma_fn(x: f64) -> Result<f64> {
    let lg = log_gamma(x)?;
    let v = lg.sign * lg.ln_abs.exp();
    if !v.is_finite() {
        return Err(Error::Domain(format!("Gamma({x}) overflows f64")));
    }
    Ok(v)
}

/// prod Gamma(num_i) / prod Gamma(den_j) evaluated entirely in log space.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &a in num {
        let g = log_gamma(a)?;
        ln += g.ln_abs;
        sign *= g.sign;
    }
    for &b in den {
        let g = log_gamma(b)?;
        ln -= g.ln_abs;
        sign *= g.sign;
    }
    Ok(sign * ln.exp())
}

/// Rising factorial (x)_n. Exact product for n <= 30, log-gamma beyond.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if n <= 30 {
        let mut p = 1.0;
        for k in 0..n {
            p *= x + k as f64;
        }
        return p;
    }
    // a zero factor somewhere in [x, x+n)
    if is_nonpositive_integer(x, 0.0) && -x < n as f64 {
        return 0.0;
    }
    match gamma_ratio(&[x + n as f64], &[x]) {
        Ok(v) => v,
        Err(_) => {
            // pole in Gamma(x) but not in Gamma(x+n): fall back to the product
            let mut p = 1.0;
            for k in 0..n {
                p *= x + k as f64;
            }
            p
        }
    }
}

/// Beta function B(p, q) = Gamma(p) Gamma(q) / Gamma(p+q), computed in an
/// argument order symmetric in (p, q).
pub fn beta(p: f64, q: f64) -> Result<f64> {
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    gamma_ratio(&[lo, hi], &[lo + hi])
}

/// Laguerre polynomial L_n(z).
pub fn laguerre(n: u32, z: f64) -> f64 {
    assoc_laguerre(n, 0, z)
}

/// Associated Laguerre polynomial L_n^k(z) by its terminating sum.
pub fn assoc_laguerre(n: u32, k: u32, z: f64) -> f64 {
    let mut sum = KahanSum::new();
    // term_j = (-1)^j (n+k)! / ((n-j)! (k+j)! j!) z^j, built incrementally
    let mut term = pochhammer(k as f64 + 1.0, n) / factorial(n);
    for j in 0..=n {
        sum.add(term);
        if j < n {
            let jf = j as f64;
            term *= -(n as f64 - jf) / ((k as f64 + jf + 1.0) * (jf + 1.0)) * z;
        }
    }
    sum.value()
}

fn factorial(n: u32) -> f64 {
    let mut p = 1.0;
    for k in 2..=n {
        p *= k as f64;
    }
    p
}

/// Error function, |erf| <= 1. Series below 3, continued fraction above.
pub fn erf(x: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return 0.0;
    }
    if ax < 3.0 {
        // 2/sqrt(pi) sum (-1)^n x^(2n+1) / (n! (2n+1))
        let mut sum = KahanSum::new();
        let mut term = ax;
        let mut n = 0u32;
        loop {
            sum.add(term / (2.0 * n as f64 + 1.0));
            n += 1;
            term *= -ax * ax / n as f64;
            if term.abs() / (2.0 * n as f64 + 1.0) < 1e-18 * sum.value().abs() {
                break;
            }
        }
        let v = 2.0 / std::f64::consts::PI.sqrt() * sum.value();
        return if x > 0.0 { v } else { -v };
    }
    // erfc(x) sqrt(pi) e^{x^2} = 1/(x + (1/2)/(x + (2/2)/(x + (3/2)/(x + ...))))
    // evaluated by modified Lentz; then erf = 1 - erfc
    let mut c = 1e308;
    let mut d = 1.0 / ax;
    let mut h = d;
    for i in 1..300 {
        let a = 0.5 * i as f64;
        d = 1.0 / (ax + a * d);
        c = ax + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    let erfc = (-ax * ax).exp() / std::f64::consts::PI.sqrt() * h;
    let v = 1.0 - erfc;
    if x > 0.0 {
        v
    } else {
        -v
    }
}

/// First Kummer function M(a, b, z) as the confluent series. Terminating
/// when a is a non-positive integer; tolerance-truncated otherwise.
pub fn kummer_m(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if is_nonpositive_integer(b, INTEGER_TOL) {
        return Err(Error::GammaPole { arg: b });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if is_nonpositive_integer(a, INTEGER_TOL) {
        // exact polynomial; never truncated early
        let n_max = (-a.round()) as u32;
        let mut sum = KahanSum::new();
        let mut term = 1.0;
        for n in 0..=n_max {
            sum.add(term);
            if n < n_max {
                let nf = n as f64;
                term *= (a + nf) / ((b + nf) * (nf + 1.0)) * z;
            }
        }
        return Ok(sum.value());
    }
    let mut sum = KahanSum::new();
    let mut term = 1.0;
    let mut stop = TailStop::new(*ctl);
    for n in 0..ctl.max_terms {
        sum.add(term);
        if stop.converged(term, sum.value()) {
            return Ok(sum.value());
        }
        let nf = n as f64;
        term *= (a + nf) / ((b + nf) * (nf + 1.0)) * z;
    }
    Err(stop.non_convergence(term))
}

/// Second Kummer function U(a, b, z) for z > 0.
///
/// Uses the two-M combination when the gamma factors avoid poles, otherwise
/// the real integral representation (valid for a > 0).
pub fn kummer_u(a: f64, b: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if z <= 0.0 {
        return Err(Error::Domain(format!("kummer_u requires z > 0, got {z}")));
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    let poles = is_nonpositive_integer(1.0 - b, INTEGER_TOL)
        || is_nonpositive_integer(a - b + 1.0, INTEGER_TOL)
        || is_nonpositive_integer(b - 1.0, INTEGER_TOL)
        || is_nonpositive_integer(a, INTEGER_TOL);
    if !poles {
        let t1 = gamma_ratio(&[1.0 - b], &[a - b + 1.0])? * kummer_m(a, b, z, ctl)?;
        let t2 = gamma_ratio(&[b - 1.0], &[a])?
            * z.powf(1.0 - b)
            * kummer_m(a - b + 1.0, 2.0 - b, z, ctl)?;
        return Ok(t1 + t2);
    }
    if a > 0.0 {
        return kummer_u_integral(a, b, z);
    }
    Err(Error::PoleConfiguration(format!(
        "kummer_u(a={a}, b={b}): gamma poles and a <= 0"
    )))
}

/// 1/Gamma(a) * integral_0^inf e^{-z t} t^{a-1} (1+t)^{b-a-1} dt, a > 0.
fn kummer_u_integral(a: f64, b: f64, z: f64) -> Result<f64> {
    let t_max = (750.0 + (b - a - 1.0).abs().max(a) * 20.0) / z;
    let g = log_gamma(a)?;
    let integrand = |t: f64| -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        ((a - 1.0) * t.ln() - z * t + (b - a - 1.0) * t.ln_1p() - g.ln_abs).exp()
    };
    let r = adaptive_gk(&integrand, 0.0, t_max, 1e-306, 1e-12)?;
    Ok(r.value)
}

/// Gauss hypergeometric 2F1(a, b; c; z) inside |z| < 1 or terminating.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if is_nonpositive_integer(c, INTEGER_TOL) {
        return Err(Error::GammaPole { arg: c });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let terms = terminating_order(a).or_else(|| terminating_order(b));
    if let Some(n_max) = terms {
        let mut sum = KahanSum::new();
        let mut term = 1.0;
        for k in 0..=n_max {
            sum.add(term);
            if k < n_max {
                let kf = k as f64;
                term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
            }
        }
        return Ok(sum.value());
    }
    if z.abs() >= 1.0 {
        return Err(Error::Divergence(format!(
            "2F1 series diverges for |z| = {} >= 1 without terminating parameters",
            z.abs()
        )));
    }
    let mut sum = KahanSum::new();
    let mut term = 1.0;
    let mut stop = TailStop::new(*ctl);
    for k in 0..ctl.max_terms {
        sum.add(term);
        if stop.converged(term, sum.value()) {
            return Ok(sum.value());
        }
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
    }
    Err(stop.non_convergence(term))
}

fn terminating_order(a: f64) -> Option<u32> {
    if is_nonpositive_integer(a, INTEGER_TOL) {
        Some((-a.round()) as u32)
    } else {
        None
    }
}

/// First Appell function F1(alpha; beta, beta'; gamma; x, y).
///
/// A non-positive-integer beta or beta' terminates the corresponding sum and
/// lifts the |x| or |y| restriction on that variable, which is how the
/// generating-function series uses it (beta' = -n with y = 1/v1).
pub fn appell_f1(
    alpha: f64,
    beta: f64,
    beta_p: f64,
    gamma: f64,
    x: f64,
    y: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    if is_nonpositive_integer(gamma, INTEGER_TOL) {
        return Err(Error::GammaPole { arg: gamma });
    }
    if let Some(n) = terminating_order(beta_p) {
        return appell_f1_terminating(alpha, beta, n, gamma, x, y, ctl);
    }
    if let Some(n) = terminating_order(beta) {
        return appell_f1_terminating(alpha, beta_p, n, gamma, y, x, ctl);
    }
    if x.abs() >= 1.0 || y.abs() >= 1.0 {
        return Err(Error::Divergence(format!(
            "F1 double series needs |x|, |y| < 1 (got {x}, {y}) unless a beta terminates"
        )));
    }
    // row sums over k, each row a 2F1-style j sum
    let mut total = KahanSum::new();
    let mut stop = TailStop::new(*ctl);
    let mut pref = 1.0; // (alpha)_k (beta')_k y^k / (k! (gamma)_k)
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        let row = gauss_2f1(alpha + kf, beta, gamma + kf, x, ctl)?;
        let term = pref * row;
        total.add(term);
        if stop.converged(term, total.value()) {
            return Ok(total.value());
        }
        pref *= (alpha + kf) * (beta_p + kf) / ((gamma + kf) * (kf + 1.0)) * y;
    }
    Err(stop.non_convergence(pref))
}

fn appell_f1_terminating(
    alpha: f64,
    beta: f64,
    n: u32,
    gamma: f64,
    x: f64,
    y: f64,
    ctl: &SeriesControl,
) -> Result<f64> {
    // F1 = sum_{k=0}^{n} (alpha)_k (-n)_k y^k / (k! (gamma)_k) 2F1(alpha+k, beta; gamma+k; x)
    let mut sum = KahanSum::new();
    let mut pref = 1.0;
    for k in 0..=n {
        let kf = k as f64;
        sum.add(pref * gauss_2f1(alpha + kf, beta, gamma + kf, x, ctl)?);
        if k < n {
            pref *= (alpha + kf) * (kf - n as f64) / ((gamma + kf) * (kf + 1.0)) * y;
        }
    }
    Ok(sum.value())
}

/// Which side of the Kummer addition theorem to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdditionVariant {
    A,
    B,
}

/// Addition theorem for M(a, b, x + y), truncated to tolerance.
pub fn kummer_addition(
    a: f64,
    b: f64,
    x: f64,
    y: f64,
    variant: AdditionVariant,
    ctl: &SeriesControl,
) -> Result<f64> {
    if is_nonpositive_integer(b, INTEGER_TOL) {
        return Err(Error::GammaPole { arg: b });
    }
    let mut sum = KahanSum::new();
    let mut stop = TailStop::new(*ctl);
    let mut pref = 1.0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        let term = match variant {
            AdditionVariant::A => pref * kummer_m(a + nf, b + nf, x, ctl)?,
            AdditionVariant::B => pref * kummer_m(a, b + nf, x, ctl)?,
        };
        sum.add(term);
        if stop.converged(term, sum.value()) {
            return Ok(match variant {
                AdditionVariant::A => sum.value(),
                AdditionVariant::B => y.exp() * sum.value(),
            });
        }
        pref *= match variant {
            AdditionVariant::A => (a + nf) / (b + nf) * y / (nf + 1.0),
            AdditionVariant::B => (b - a + nf) / (b + nf) * (-y) / (nf + 1.0),
        };
    }
    Err(stop.non_convergence(pref))
}
