//! Trial-division factorization and small sieves.

use std::sync::atomic::{AtomicU64, Ordering};

use super::ArithError;

/// Default bound on `n` for factorization-backed values.
pub const DEFAULT_FACTOR_LIMIT: u64 = 100_000_000;

static FACTOR_LIMIT: AtomicU64 = AtomicU64::new(DEFAULT_FACTOR_LIMIT);

/// Limit given to functions built by [`from_prime_powers`](super::from_prime_powers)
/// and the multiplicative built-ins.
pub fn factor_limit() -> u64 {
    FACTOR_LIMIT.load(Ordering::Relaxed)
}

/// Sets the limit for functions built afterwards; existing functions keep theirs.
pub fn set_factor_limit(limit: u64) {
    FACTOR_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

/// `n = Π p^a`, primes ascending. `factorize(1)` is empty.
pub fn factorize(n: u64, limit: u64) -> Result<Vec<(u64, u32)>, ArithError> {
    if n == 0 {
        return Err(ArithError::InvalidIndex(0));
    }
    if n > limit {
        return Err(ArithError::FactorizationOverflow { n, limit });
    }
    Ok(factorize_unbounded(n))
}

pub(crate) fn factorize_unbounded(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut strip = |n: &mut u64, p: u64| {
        let mut a = 0;
        while *n % p == 0 {
            *n /= p;
            a += 1;
        }
        if a > 0 {
            out.push((p, a));
        }
    };
    strip(&mut n, 2);
    strip(&mut n, 3);
    let mut p = 5;
    while p * p <= n {
        strip(&mut n, p);
        strip(&mut n, p + 2);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize_unbounded(n).first() == Some(&(n, 1))
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Smallest-prime-factor table for `0..=n` (entries 0 and 1 are 0).
pub(crate) fn spf_sieve(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorizations() {
        assert!(factorize(1, 10).unwrap().is_empty());
        assert_eq!(factorize(360, 1000).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97, 1000).unwrap(), vec![(97, 1)]);
        assert!(matches!(
            factorize(1001, 1000),
            Err(ArithError::FactorizationOverflow { n: 1001, limit: 1000 })
        ));
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn sieve_matches_trial_division() {
        let spf = spf_sieve(1000);
        for n in 2..=1000u64 {
            assert_eq!(spf[n as usize] as u64, factorize_unbounded(n)[0].0);
        }
    }
}
