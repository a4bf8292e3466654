//! Multiplicative functions: construction from prime powers, horizon checks,
//! and equivalence up to finitely many primes.

use std::sync::Arc;

use serde::Serialize;

use super::factor::{factor_limit, gcd, primes_up_to};
use super::func::ArithFunc;
use super::gauss::GaussRational;
use super::logpoly::Coeff;
use super::ArithError;

/// The multiplicative function with `α(p^a) = rule(p, a)` and `α(1) = 1`,
/// factorizing `n` by trial division up to the current [`factor_limit`].
pub fn from_prime_powers(rule: impl Fn(u64, u32) -> GaussRational + Send + Sync + 'static) -> ArithFunc {
    from_prime_powers_with_limit(rule, factor_limit())
}

/// As [`from_prime_powers`]; values at `n > limit` fail with
/// [`ArithError::FactorizationOverflow`].
pub fn from_prime_powers_with_limit(
    rule: impl Fn(u64, u32) -> GaussRational + Send + Sync + 'static,
    limit: u64,
) -> ArithFunc {
    ArithFunc::from_prime_power_rule(Arc::new(rule), limit)
}

/// Outcome of [`is_multiplicative`].
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplicativity {
    Holds,
    /// `α(1) ≠ 1`.
    UnitFails(Coeff),
    /// First coprime pair (ordered by `nm`, then `n`) with `α(nm) ≠ α(n)α(m)`.
    PairFails { n: u64, m: u64 },
}

impl Multiplicativity {
    pub fn holds(&self) -> bool {
        matches!(self, Multiplicativity::Holds)
    }
}

/// Checks `α(1) = 1` and `α(nm) = α(n)α(m)` for coprime `1 < n < m`, `nm ≤ horizon`.
pub fn is_multiplicative(a: &ArithFunc, horizon: u64) -> Result<Multiplicativity, ArithError> {
    let unit = a.try_coeff(1)?;
    if !unit.is_one() {
        return Ok(Multiplicativity::UnitFails(unit));
    }
    for prod in 6..=horizon {
        let mut n = 2;
        while n * n < prod {
            if prod % n == 0 {
                let m = prod / n;
                if gcd(n, m) == 1 && a.try_coeff(prod)? != &a.try_coeff(n)? * &a.try_coeff(m)? {
                    return Ok(Multiplicativity::PairFails { n, m });
                }
            }
            n += 1;
        }
    }
    Ok(Multiplicativity::Holds)
}

/// Primes `p ≤ horizon_p` where `α(p^j) ≠ β(p^j)` for some `1 ≤ j ≤ horizon_j`.
///
/// Equivalence (agreement at all but finitely many primes) is only
/// semi-decidable; a small exceptional set that does not reach the top of
/// the horizon is evidence for it, never a proof.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub exceptional_primes: Vec<u64>,
    pub horizon_p: u64,
    pub horizon_j: u32,
    pub primes_checked: usize,
}

impl EquivalenceVerdict {
    /// Exceptions persist into the upper half of the prime horizon, which is
    /// evidence against equivalence.
    pub fn exceptions_reach_horizon(&self) -> bool {
        self.exceptional_primes.iter().any(|&p| 2 * p > self.horizon_p)
    }
}

/// Horizon on which [`equivalent`] verifies that both inputs are multiplicative.
pub const EQUIVALENCE_PRECHECK_HORIZON: u64 = 64;

pub fn equivalent(
    a: &ArithFunc,
    b: &ArithFunc,
    horizon_p: u64,
    horizon_j: u32,
) -> Result<EquivalenceVerdict, ArithError> {
    for f in [a, b] {
        if !is_multiplicative(f, EQUIVALENCE_PRECHECK_HORIZON)?.holds() {
            return Err(ArithError::NotMultiplicative(f.label()));
        }
    }
    let primes = primes_up_to(horizon_p);
    let mut exceptional = Vec::new();
    for &p in &primes {
        for j in 1..=horizon_j {
            if a.try_prime_power(p, j)? != b.try_prime_power(p, j)? {
                exceptional.push(p);
                break;
            }
        }
    }
    Ok(EquivalenceVerdict {
        exceptional_primes: exceptional,
        horizon_p,
        horizon_j,
        primes_checked: primes.len(),
    })
}
