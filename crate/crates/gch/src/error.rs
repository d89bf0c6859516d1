//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("gamma pole: argument {arg} is a non-positive integer")]
    GammaPole { arg: f64 },

    #[error("series did not converge within {max_terms} terms (last |term| = {last_term:e})")]
    NonConvergence { max_terms: usize, last_term: f64 },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resonant denominator in recurrence at n = {n}, lambda = {lambda}")]
    Resonance { n: u32, lambda: f64 },

    #[error("no evaluation path applies: {0}")]
    PoleConfiguration(String),

    #[error("invalid parameter `{field}`: {constraint}")]
    InvalidParam {
        field: &'static str,
        constraint: String,
    },

    #[error("quadrature tolerance not met: error estimate {estimate:e} > {tol:e} (best value {value})")]
    ToleranceNotMet {
        value: f64,
        estimate: f64,
        tol: f64,
    },

    #[error("first solution changes sign inside [{lo}, {hi}]; reduction of order undefined")]
    ZeroCrossing { lo: f64, hi: f64 },

    #[error("case mismatch: {0}")]
    CaseMismatch(String),

    #[error("vanishing bracket denominator at k = {k} for quantum number {quantum_number}")]
    BracketPole { k: i64, quantum_number: i64 },

    #[error("complex exponent: (a0-1)^2 - 4 d1 = {discriminant} < 0")]
    ComplexExponent { discriminant: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
