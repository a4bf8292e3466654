//! Exact arithmetic in the ring of arithmetic functions under pointwise sum
//! and Dirichlet convolution.

pub mod builtins;
pub mod factor;
mod func;
mod gauss;
mod logpoly;
mod multiplicative;
mod poly;

use thiserror::Error;

pub use builtins::{builtin, dirichlet_character, quartic_characters};
pub use func::{
    add, convolve, derivative, dirichlet_inverse, divisor_bound_constant, growth_check,
    log_power_bound, power, scale, ArithFunc, GrowthAudit, GrowthCert, GROWTH_SLACK,
};
pub use gauss::{parse_rational, GaussRational};
pub use logpoly::{Coeff, CoeffField, CoeffRing, LogMonomial, LogPoly, LogScalar};
pub use multiplicative::{
    equivalent, from_prime_powers, from_prime_powers_with_limit, is_multiplicative,
    EquivalenceVerdict, Multiplicativity, EQUIVALENCE_PRECHECK_HORIZON,
};
pub use poly::PolyCoeff;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("arithmetic functions are indexed from 1 (got {0})")]
    InvalidIndex(u64),
    #[error("cannot factor {n}: above the factorization limit {limit}")]
    FactorizationOverflow { n: u64, limit: u64 },
    #[error("not invertible: α(1) = {0} is not a nonzero constant")]
    NotInvertible(String),
    #[error("{0} is not multiplicative")]
    NotMultiplicative(String),
    #[error("bad rational literal {0:?}")]
    BadRational(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
}

/// `α(n)`; see [`ArithFunc::coeff`].
pub fn eval_coeff(a: &ArithFunc, n: u64) -> Coeff {
    a.coeff(n)
}
