use proptest::prelude::*;

use dforge::arith::builtins::builtin;
use dforge::arith::{
    factor, from_prime_powers_with_limit, is_multiplicative, Coeff, LogMonomial, LogPoly,
    Multiplicativity,
};
use dforge::{
    add, convolve, derivative, dirichlet_inverse, equivalent, eval_coeff, from_prime_powers,
    growth_check, scale, ArithError, ArithFunc, Complex64, GaussRational, PolyCoeff,
};

fn f(name: &str) -> ArithFunc {
    builtin(name).unwrap()
}

fn g(v: i64) -> GaussRational {
    GaussRational::from_int(v)
}

fn mobius_oracle(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        -sign
    } else {
        sign
    }
}

/// Tables `a + b·i + c·z` with entries in `{−10..10}`.
fn poly_table(len: usize) -> impl Strategy<Value = ArithFunc> {
    prop::collection::vec((-10i64..=10, -10i64..=10, -10i64..=10), len).prop_map(|v| {
        ArithFunc::table(
            v.into_iter()
                .map(|(a, b, c)| {
                    let re_im = &g(a) + &(&g(b) * &GaussRational::i());
                    Coeff::from_poly(PolyCoeff::from_coeffs(vec![re_im, g(c)]))
                })
                .collect(),
        )
    })
}

fn int_table(len: usize) -> impl Strategy<Value = ArithFunc> {
    prop::collection::vec(-10i64..=10, len).prop_map(|v| ArithFunc::scalar_table(v.into_iter().map(g).collect()))
}

fn unit_table(len: usize) -> impl Strategy<Value = ArithFunc> {
    (prop_oneof![-10i64..=-1, 1i64..=10], prop::collection::vec(-10i64..=10, len - 1)).prop_map(|(u, rest)| {
        ArithFunc::scalar_table(std::iter::once(u).chain(rest).map(g).collect())
    })
}

fn multiplicative() -> impl Strategy<Value = ArithFunc> {
    (any::<u64>(), -3i64..=3).prop_map(|(seed, shift)| {
        from_prime_powers(move |p, a| g(((seed ^ p.wrapping_mul(31) ^ u64::from(a)) % 7) as i64 - 3 + shift))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in poly_table(64), b in poly_table(64), c in poly_table(64)) {
        let e = f("e");
        let ab_c = convolve(&convolve(&a, &b), &c);
        let a_bc = convolve(&a, &convolve(&b, &c));
        let (ab, ba) = (convolve(&a, &b), convolve(&b, &a));
        let left = convolve(&a, &add(&b, &c));
        let right = add(&convolve(&a, &b), &convolve(&a, &c));
        for n in 1..=64 {
            prop_assert_eq!(ab_c.coeff(n), a_bc.coeff(n));
            prop_assert_eq!(ab.coeff(n), ba.coeff(n));
            prop_assert_eq!(left.coeff(n), right.coeff(n));
            prop_assert_eq!(convolve(&e, &a).coeff(n), a.coeff(n));
            prop_assert_eq!(convolve(&a, &e).coeff(n), a.coeff(n));
        }
    }

    #[test]
    fn additive_inverse(a in poly_table(64)) {
        let neg = add(&a, &scale(PolyCoeff::from_int(-1), &a));
        for n in 1..=64 {
            prop_assert!(neg.coeff(n).is_zero());
        }
    }

    #[test]
    fn no_zero_divisors_at_one(a in unit_table(8), b in unit_table(8)) {
        prop_assert!(!convolve(&a, &b).coeff(1).is_zero());
    }

    #[test]
    fn inverse_round_trip(a in unit_table(32)) {
        let inv = dirichlet_inverse(&a).unwrap();
        let prod = convolve(&a, &inv);
        for n in 1..=256u64 {
            prop_assert_eq!(prod.scalar(n), Some(g(i64::from(n == 1))), "n = {}", n);
        }
    }

    #[test]
    fn derivation_identity(a in int_table(128), b in int_table(128)) {
        let lhs = derivative(&convolve(&a, &b), 1);
        let rhs = add(&convolve(&derivative(&a, 1), &b), &convolve(&a, &derivative(&b, 1)));
        for n in 1..=128 {
            prop_assert_eq!(lhs.coeff(n), rhs.coeff(n), "n = {}", n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn multiplicative_closure(a in multiplicative(), b in multiplicative()) {
        prop_assert!(is_multiplicative(&a, 1000).unwrap().holds());
        prop_assert!(is_multiplicative(&convolve(&a, &b), 1000).unwrap().holds());
    }
}

#[test]
fn mobius_inversion_to_ten_thousand() {
    let inv = dirichlet_inverse(&f("one")).unwrap();
    let mu = f("mu");
    for n in 1..=10_000 {
        let want = Some(g(mobius_oracle(n)));
        assert_eq!(inv.scalar(n), want, "n = {n}");
        assert_eq!(mu.scalar(n), want, "n = {n}");
    }
}

#[test]
fn coefficient_examples() {
    assert_eq!(eval_coeff(&f("e"), 1), Coeff::from_int(1));
    assert_eq!(eval_coeff(&f("e"), 5), Coeff::zero());
    assert_eq!(eval_coeff(&f("one"), 7), Coeff::from_int(1));
    assert_eq!(eval_coeff(&f("N"), 12), Coeff::from_int(12));
}

#[test]
fn add_examples() {
    let s = add(&f("e"), &f("zero"));
    for n in 1..=32 {
        assert_eq!(s.coeff(n), f("e").coeff(n));
    }
    let s = add(&f("one"), &f("mu"));
    assert_eq!(s.scalar(1), Some(g(2)));
    assert_eq!(s.scalar(2), Some(g(0)));
}

#[test]
fn convolve_examples() {
    assert_eq!(convolve(&f("one"), &f("one")).scalar(6), Some(g(4)));
    let mu_one = convolve(&f("mu"), &f("one"));
    for n in 1..=10_000 {
        assert_eq!(mu_one.scalar(n), Some(g(i64::from(n == 1))), "n = {n}");
    }
}

#[test]
fn inverse_examples() {
    let e_inv = dirichlet_inverse(&f("e")).unwrap();
    for n in 1..=64 {
        assert_eq!(e_inv.coeff(n), f("e").coeff(n));
    }
    let a = ArithFunc::scalar_table(vec![g(2), g(1), g(-3)]);
    assert_eq!(dirichlet_inverse(&a).unwrap().scalar(1), Some(GaussRational::ratio(1, 2)));
    let zero_unit = ArithFunc::scalar_table(vec![g(0), g(1)]);
    assert!(matches!(dirichlet_inverse(&zero_unit), Err(ArithError::NotInvertible(_))));
    let z_unit = ArithFunc::table(vec![Coeff::from_poly(PolyCoeff::z())]);
    assert!(matches!(dirichlet_inverse(&z_unit), Err(ArithError::NotInvertible(_))));
}

#[test]
fn derivative_examples() {
    let a = ArithFunc::scalar_table(vec![g(3), g(-1), g(4), g(1), g(5)]);
    let d0 = derivative(&a, 0);
    for n in 1..=8 {
        assert_eq!(d0.coeff(n), a.coeff(n));
    }
    let de = derivative(&f("e"), 1);
    assert!((1..=64).all(|n| de.coeff(n).is_zero()));
    let minus_log2: Coeff = LogPoly::term(LogMonomial::log_of(2), PolyCoeff::from_int(-1));
    assert_eq!(derivative(&f("one"), 1).coeff(2), minus_log2);
    // (−log 12)² = (2 log 2 + log 3)²
    let log12: Coeff = LogPoly::log_of_factorization(&[(2, 2), (3, 1)]);
    assert_eq!(derivative(&f("one"), 2).coeff(12), log12.pow(2));
}

#[test]
fn prime_power_builder_examples() {
    let one = from_prime_powers(|_, _| g(1));
    let mu = from_prime_powers(|_, a| g(if a == 1 { -1 } else { 0 }));
    let n_fn = from_prime_powers(|p, a| g(p.pow(a) as i64));
    for n in 1..=10_000u64 {
        assert_eq!(mu.scalar(n), Some(g(mobius_oracle(n))));
        if n <= 1000 {
            assert_eq!(one.scalar(n), Some(g(1)));
            assert_eq!(n_fn.scalar(n), Some(g(n as i64)));
        }
    }
    let capped = from_prime_powers_with_limit(|_, _| g(1), 100);
    assert_eq!(capped.try_coeff(101), Err(ArithError::FactorizationOverflow { n: 101, limit: 100 }));
}

#[test]
fn multiplicativity_examples() {
    assert!(is_multiplicative(&f("mu"), 100).unwrap().holds());
    assert_eq!(
        is_multiplicative(&add(&f("one"), &f("e")), 10).unwrap(),
        Multiplicativity::UnitFails(Coeff::from_int(2))
    );
    assert_eq!(is_multiplicative(&f("vonmangoldt"), 30).unwrap(), Multiplicativity::UnitFails(Coeff::zero()));
    let broken = ArithFunc::scalar_table(vec![g(1), g(1), g(1), g(1), g(1), g(2)]);
    assert_eq!(is_multiplicative(&broken, 10).unwrap(), Multiplicativity::PairFails { n: 2, m: 3 });
}

#[test]
fn equivalence_examples() {
    let v = equivalent(&f("one"), &f("one"), 100, 5).unwrap();
    assert!(v.exceptional_primes.is_empty());
    let v = equivalent(&f("one"), &f("mu"), 100, 5).unwrap();
    assert_eq!(v.exceptional_primes, factor::primes_up_to(100));
    assert!(v.exceptions_reach_horizon());
    let mu2 = from_prime_powers(|p, a| match (p, a) {
        (2, 1) => g(5),
        (_, 1) => g(-1),
        _ => g(0),
    });
    let v = equivalent(&f("mu"), &mu2, 100, 5).unwrap();
    assert_eq!(v.exceptional_primes, vec![2]);
    assert!(!v.exceptions_reach_horizon());
    assert!(matches!(
        equivalent(&f("vonmangoldt"), &f("one"), 100, 5),
        Err(ArithError::NotMultiplicative(_))
    ));
}

#[test]
fn growth_examples() {
    let two = [Complex64::new(2.0, 0.0)];
    assert_eq!(growth_check(&f("one"), 0.0, 10_000, &two).unwrap().constant, 1.0);
    // divisor counts up to 64 by brute force
    let (best, at) = (1..=64u64)
        .map(|n| ((1..=n).filter(|d| n % d == 0).count(), n))
        .max_by_key(|&(c, n)| (c, std::cmp::Reverse(n)))
        .unwrap();
    let audit = growth_check(&f("d"), 0.0, 64, &two).unwrap();
    assert_eq!((audit.constant, audit.at_n), (best as f64, at));
    assert_eq!((audit.constant, audit.at_n), (12.0, 60));
    assert_eq!(growth_check(&f("N"), 1.0, 1000, &two).unwrap().constant, 1.0);
}

#[test]
fn concurrent_readers_agree() {
    let inv = dirichlet_inverse(&f("one")).unwrap();
    let results: Vec<Vec<Coeff>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4)
            .map(|t| {
                let inv = inv.clone();
                s.spawn(move || {
                    let order: Vec<u64> = if t % 2 == 0 { (1..=2000).collect() } else { (1..=2000).rev().collect() };
                    let mut out = vec![Coeff::zero(); 2000];
                    for n in order {
                        out[n as usize - 1] = inv.coeff(n);
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}
