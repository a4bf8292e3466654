//! Named arithmetic functions with declared growth certificates.

use std::sync::Arc;

use num::complex::Complex64;

use super::factor::{factorize_unbounded, gcd};
use super::func::{divisor_bound_constant, log_power_bound, ArithFunc, GrowthCert, GROWTH_SLACK};
use super::gauss::GaussRational;
use super::logpoly::{Coeff, LogMonomial, LogPoly};
use super::multiplicative::from_prime_powers;
use super::poly::PolyCoeff;
use super::ArithError;

/// The unity `e`: `e(1) = 1`, `e(n) = 0` otherwise.
pub fn unity() -> ArithFunc {
    ArithFunc::scalar_table(vec![GaussRational::one()]).with_name("e")
}

pub fn zero() -> ArithFunc {
    ArithFunc::table(Vec::new()).with_name("zero")
}

/// The constant function `1` (whose series is ζ).
pub fn one() -> ArithFunc {
    ArithFunc::from_rules(
        Arc::new(|_| Ok(Coeff::from_int(1))),
        Some(Arc::new(|_, _| Complex64::new(1.0, 0.0))),
        Some(GrowthCert::constant(0.0, 1.0)),
    )
    .with_name("one")
}

/// `N(n) = n`.
pub fn identity() -> ArithFunc {
    ArithFunc::from_rules(
        Arc::new(|n| Ok(Coeff::from_int(n as i64))),
        Some(Arc::new(|n, _| Complex64::new(n as f64, 0.0))),
        Some(GrowthCert::constant(1.0, 1.0)),
    )
    .with_name("N")
}

pub fn mobius() -> ArithFunc {
    from_prime_powers(|_, a| GaussRational::from_int(if a == 1 { -1 } else { 0 }))
        .with_growth(GrowthCert::constant(0.0, 1.0))
        .with_name("mu")
}

/// Divisor count `d = one·one`, bounded by `D(ε) n^ε` with `ε = 1/4`.
pub fn divisor_count() -> ArithFunc {
    from_prime_powers(|_, a| GaussRational::from_int(a as i64 + 1))
        .with_growth(GrowthCert::constant(GROWTH_SLACK, divisor_bound_constant(GROWTH_SLACK)))
        .with_name("d")
}

pub fn liouville() -> ArithFunc {
    from_prime_powers(|_, a| GaussRational::from_int(if a % 2 == 0 { 1 } else { -1 }))
        .with_growth(GrowthCert::constant(0.0, 1.0))
        .with_name("lambda_liouville")
}

/// `Λ(p^a) = log p`, zero off prime powers. Values carry the formal symbol `log p`.
pub fn von_mangoldt() -> ArithFunc {
    fn prime_base(n: u64) -> Option<u64> {
        match factorize_unbounded(n).as_slice() {
            [(p, _)] => Some(*p),
            _ => None,
        }
    }
    ArithFunc::from_rules(
        Arc::new(|n| {
            Ok(match prime_base(n) {
                Some(p) => LogPoly::term(LogMonomial::log_of(p), PolyCoeff::one()),
                None => Coeff::zero(),
            })
        }),
        Some(Arc::new(|n, _| Complex64::new(prime_base(n).map_or(0.0, |p| (p as f64).ln()), 0.0))),
        Some(GrowthCert::constant(GROWTH_SLACK, log_power_bound(1, GROWTH_SLACK))),
    )
    .with_name("vonmangoldt")
}

/// Dirichlet characters mod `q` whose values lie in `{0, ±1, ±i}`, each
/// given as the exponent of `i` on residues coprime to `q` (`None` elsewhere).
/// The principal character comes first; the rest follow in lexicographic order.
pub fn quartic_characters(q: u64) -> Vec<Vec<Option<u8>>> {
    assert!(q >= 1);
    let units: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
    // greedy generating set
    let mut gens: Vec<u64> = Vec::new();
    let mut span: Vec<bool> = vec![false; q as usize];
    span[(1 % q) as usize] = true;
    for &a in &units {
        if span[a as usize] {
            continue;
        }
        gens.push(a);
        let mut frontier: Vec<u64> = (0..q).filter(|&x| span[x as usize]).collect();
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                let y = x * g % q;
                if !span[y as usize] {
                    span[y as usize] = true;
                    frontier.push(y);
                }
            }
        }
    }
    let mut out = Vec::new();
    for code in 0..4usize.pow(gens.len() as u32) {
        let exps: Vec<u8> = (0..gens.len()).map(|i| ((code >> (2 * i)) & 3) as u8).collect();
        let mut table: Vec<Option<u8>> = vec![None; q as usize];
        table[(1 % q) as usize] = Some(0);
        let mut queue = vec![1 % q];
        let mut consistent = true;
        'bfs: while let Some(x) = queue.pop() {
            let ex = table[x as usize].expect("visited");
            for (g, eg) in gens.iter().zip(&exps) {
                let y = x * g % q;
                let ey = (ex + eg) % 4;
                match table[y as usize] {
                    Some(prev) if prev != ey => {
                        consistent = false;
                        break 'bfs;
                    }
                    Some(_) => {}
                    None => {
                        table[y as usize] = Some(ey);
                        queue.push(y);
                    }
                }
            }
        }
        if consistent {
            out.push(table);
        }
    }
    out.sort();
    out
}

/// The `index`-th character of [`quartic_characters`] as an arithmetic function.
pub fn dirichlet_character(q: u64, index: usize) -> Result<ArithFunc, ArithError> {
    let name = format!("chi_{q}_{index}");
    if q == 0 || q > 100 {
        return Err(ArithError::UnknownFunction(name));
    }
    let table = quartic_characters(q)
        .into_iter()
        .nth(index)
        .ok_or_else(|| ArithError::UnknownFunction(name.clone()))?;
    let table = Arc::new(table);
    let units = [
        GaussRational::one(),
        GaussRational::i(),
        GaussRational::from_int(-1),
        -GaussRational::i(),
    ];
    let float_units = units.clone().map(|u| u.to_complex());
    let t1 = Arc::clone(&table);
    let t2 = table;
    Ok(ArithFunc::from_rules(
        Arc::new(move |n| {
            Ok(match t1[(n % q) as usize] {
                Some(e) => Coeff::from_gauss(units[e as usize].clone()),
                None => Coeff::zero(),
            })
        }),
        Some(Arc::new(move |n, _| match t2[(n % q) as usize] {
            Some(e) => float_units[e as usize],
            None => Complex64::new(0.0, 0.0),
        })),
        Some(GrowthCert::constant(0.0, 1.0)),
    )
    .with_name(name))
}

/// Looks up a built-in by name: `e`, `zero`, `one`, `N`, `mu`, `d`,
/// `lambda_liouville`, `vonmangoldt`, `chi_<q>_<index>`.
pub fn builtin(name: &str) -> Result<ArithFunc, ArithError> {
    Ok(match name {
        "e" => unity(),
        "zero" => zero(),
        "one" => one(),
        "N" => identity(),
        "mu" => mobius(),
        "d" => divisor_count(),
        "lambda_liouville" | "liouville" => liouville(),
        "vonmangoldt" | "Lambda" => von_mangoldt(),
        _ => {
            let parts: Vec<&str> = name.split('_').collect();
            match parts.as_slice() {
                ["chi", q, i] => {
                    let bad = || ArithError::UnknownFunction(name.to_string());
                    let q: u64 = q.parse().map_err(|_| bad())?;
                    let i: usize = i.parse().map_err(|_| bad())?;
                    dirichlet_character(q, i)?
                }
                _ => return Err(ArithError::UnknownFunction(name.to_string())),
            }
        }
    })
}
